"""Shared pytest configuration for the test suite."""

from __future__ import annotations

import os

import pytest
from hypothesis import settings

from guiag.env import AppScript, bundled_scripts
from guiag.fixtures import make_trajectories
from guiag.synthesis import RawTrajectory, StubChatClient

settings.register_profile("ci", max_examples=50)
if os.environ.get("CI"):
  settings.load_profile("ci")


@pytest.fixture
def settings_app() -> AppScript:
  return bundled_scripts()["settings"]


@pytest.fixture
def stub_client() -> StubChatClient:
  return StubChatClient()


@pytest.fixture(scope="session")
def trajectories() -> list[RawTrajectory]:
  return make_trajectories()
