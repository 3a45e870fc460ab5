"""Versioned data files: unification table, prompt templates, record dialects and app scripts."""
