"""Chat-completion and web-retrieval providers behind small interfaces.

Everything generative in the pipeline goes through these, so the whole
system runs deterministically with scripted providers and degrades
gracefully when live endpoints are unreachable.
"""

import logging
import os
import time
from typing import Protocol

import requests

from .errors import ProviderUnavailable

logger = logging.getLogger(__name__)

Message = dict[str, str]  # {"role": ..., "content": ...}


class ChatProvider(Protocol):
    def complete(self, messages: list[Message]) -> str: ...


class RetrievalProvider(Protocol):
    def search(self, query: str, limit: int) -> list[tuple[str, str]]:
        """Return up to `limit` (locator, text) results for the query."""
        ...


class ScriptedChatProvider:
    """Replays canned replies in order; the deterministic offline mock."""

    def __init__(self, replies: list[str]):
        self._replies = list(replies)
        self.calls: list[list[Message]] = []

    def complete(self, messages: list[Message]) -> str:
        self.calls.append(messages)
        if not self._replies:
            raise ProviderUnavailable("scripted provider has no replies left")
        return self._replies.pop(0)


class UnavailableChatProvider:
    """Stands in when no chat endpoint is configured."""

    def complete(self, messages: list[Message]) -> str:
        raise ProviderUnavailable("no chat provider configured")


class HttpChatProvider:
    """Client for a chat-completions endpoint.

    POST {model, messages} and expect {"choices": [{"message": {"content"}}]}.
    API key via environment variable; bounded retries with backoff.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key_env: str = "CODESCOUT_API_KEY",
        session=None,
        max_attempts: int = 3,
        backoff: float = 1.0,
        sleep=time.sleep,
    ):
        self.endpoint = endpoint
        self.model = model
        self.api_key_env = api_key_env
        self._session = session if session is not None else requests.Session()
        self._max_attempts = max_attempts
        self._backoff = backoff
        self._sleep = sleep

    def complete(self, messages: list[Message]) -> str:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        last_error = "no attempt made"
        for attempt in range(self._max_attempts):
            if attempt:
                self._sleep(self._backoff * 2 ** (attempt - 1))
            try:
                resp = self._session.post(
                    self.endpoint,
                    json={"model": self.model, "messages": messages},
                    headers=headers,
                    timeout=120,
                )
            except requests.RequestException as exc:
                last_error = str(exc)
                continue
            if resp.status_code != 200:
                last_error = f"HTTP {resp.status_code}"
                if 400 <= resp.status_code < 500 and resp.status_code != 429:
                    break
                continue
            return resp.json()["choices"][0]["message"]["content"]
        raise ProviderUnavailable(f"chat endpoint {self.endpoint}: {last_error}")


class NoopRetrievalProvider:
    """Offline stand-in: never finds anything."""

    def search(self, query: str, limit: int) -> list[tuple[str, str]]:
        return []


class ScriptedRetrievalProvider:
    def __init__(self, results: list[tuple[str, str]]):
        self._results = list(results)
        self.queries: list[str] = []

    def search(self, query: str, limit: int) -> list[tuple[str, str]]:
        self.queries.append(query)
        return self._results[:limit]


class HttpRetrievalProvider:
    """Client for a web-search endpoint.

    GET {endpoint}?q=... expecting {"results": [{"url": ..., "text": ...}]}.
    """

    def __init__(
        self,
        endpoint: str,
        api_key_env: str = "CODESCOUT_SEARCH_API_KEY",
        session=None,
    ):
        self.endpoint = endpoint
        self.api_key_env = api_key_env
        self._session = session if session is not None else requests.Session()

    def search(self, query: str, limit: int) -> list[tuple[str, str]]:
        headers = {}
        key = os.environ.get(self.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        try:
            resp = self._session.get(
                self.endpoint, params={"q": query, "limit": limit},
                headers=headers, timeout=60,
            )
        except requests.RequestException as exc:
            raise ProviderUnavailable(f"search endpoint {self.endpoint}: {exc}") from exc
        if resp.status_code != 200:
            raise ProviderUnavailable(
                f"search endpoint {self.endpoint}: HTTP {resp.status_code}"
            )
        results = resp.json().get("results", [])
        return [(item.get("url", ""), item.get("text", "")) for item in results[:limit]]
