"""Test package markers and shared helpers."""
