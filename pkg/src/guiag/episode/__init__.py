"""Episode loop package."""

from .results import EpisodeResult as EpisodeResult
from .runner import run_episode as run_episode
from .statistics import EpisodeStatistics as EpisodeStatistics
from .statistics import format_success_table as format_success_table
from .statistics import success_rate as success_rate
