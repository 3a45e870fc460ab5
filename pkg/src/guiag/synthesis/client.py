"""Chat-completion clients used by the synthesis pipeline and the chat agent."""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Literal, Protocol

import openai

from guiag.errors import ClientTransportError
from guiag.logging import get_logger

if TYPE_CHECKING:
  from collections.abc import Mapping, Sequence

  from guiag.protocol import ChatMessage

logger = get_logger()


@dataclass(frozen=True, slots=True)
class ClientInfo:
  """Capability descriptor of a chat backend."""

  model: str
  max_context: int = 32768


@dataclass(frozen=True, slots=True)
class DecodeParams:
  """Sampling parameters for one completion."""

  temperature: float = 0.0
  max_tokens: int = 1024
  top_p: float = 1.0


class ChatClient(Protocol):
  """Anything that turns a message list into assistant text."""

  info: ClientInfo

  def complete(self, messages: Sequence[ChatMessage], params: DecodeParams | None = None) -> str:
    """Return the assistant reply to ``messages``."""
    ...


def content_digest(messages: Sequence[ChatMessage]) -> str:
  """Return a short sha256 digest of the messages' roles and contents."""
  payload = json.dumps([message.as_dict() for message in messages], sort_keys=True, ensure_ascii=False)
  return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]


def _last_user(messages: Sequence[ChatMessage]) -> str:
  return next((message.content for message in reversed(messages) if message.role == "user"), "")


@dataclass
class StubChatClient:
  """Deterministic offline client.

  ``canned`` maps a substring to a fixed reply; the first key found in any message wins. Otherwise
  ``echo`` mode returns the last user message and ``template`` mode fills ``template`` with the
  content digest, the last user message and the system message.
  """

  mode: Literal["template", "echo"] = "template"
  canned: Mapping[str, str] = field(default_factory=dict)
  template: str = "[{digest}] {user}"
  info: ClientInfo = field(default_factory=lambda: ClientInfo(model="stub"))
  calls: list[list[ChatMessage]] = field(default_factory=list)
  _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

  def complete(self, messages: Sequence[ChatMessage], params: DecodeParams | None = None) -> str:  # noqa: ARG002
    """Return the deterministic reply for ``messages``."""
    with self._lock:
      self.calls.append(list(messages))
    joined = "\n".join(message.content for message in messages)
    for key, reply in self.canned.items():
      if key in joined:
        return reply
    user = _last_user(messages)
    if self.mode == "echo":
      return user
    system = next((message.content for message in messages if message.role == "system"), "")
    return self.template.format(digest=content_digest(messages), user=user, system=system)


class OpenAIChatClient:
  """Client for any OpenAI-compatible chat-completion endpoint.

  Timeouts and retries with exponential backoff are handled by the ``openai`` SDK; ``max_retries=2``
  gives three attempts in total.
  """

  def __init__(
    self,
    model: str,
    base_url: str | None = None,
    api_key: str | None = None,
    timeout: float = 60.0,
    max_retries: int = 2,
    max_context: int = 32768,
  ) -> None:
    """Create the SDK client; the key falls back to ``OPENAI_API_KEY``."""
    self.info = ClientInfo(model=model, max_context=max_context)
    self._client = openai.OpenAI(
      base_url=base_url,
      api_key=api_key or os.environ.get("OPENAI_API_KEY", "EMPTY"),
      timeout=timeout,
      max_retries=max_retries,
    )
    logger.info("Initialized chat client model=%s base_url=%s", model, base_url or "default")

  def complete(self, messages: Sequence[ChatMessage], params: DecodeParams | None = None) -> str:
    """Send one chat-completion request.

    Raises:
      ClientTransportError: The request failed after all retries.
    """
    params = params or DecodeParams()
    try:
      completion = self._client.chat.completions.create(
        model=self.info.model,
        messages=[message.as_dict() for message in messages],
        temperature=params.temperature,
        max_tokens=params.max_tokens,
        top_p=params.top_p,
      )
    except openai.APIError as err:
      msg = f"chat completion failed: {err}"
      raise ClientTransportError(msg) from err
    choice = completion.choices[0] if completion.choices else None
    content = choice.message.content if choice is not None and choice.message else None
    return content or ""
