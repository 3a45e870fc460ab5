"""Agent implementations and registry."""

from .base import BaseAgent as BaseAgent
from .chat import ChatAgent as ChatAgent
from .oracle import GroundingOracleAgent as GroundingOracleAgent
from .oracle import OracleAgent as OracleAgent
from .random import RandomAgent as RandomAgent

# provide a dictionary of agents
AGENTS: dict[str, type[BaseAgent]] = {
  "random": RandomAgent,
  "oracle": OracleAgent,
  "grounding_oracle": GroundingOracleAgent,
  "chat": ChatAgent,
}
