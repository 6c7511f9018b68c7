import pytest
import requests

from codescout import (
    HttpChatProvider,
    HttpRetrievalProvider,
    NoopRetrievalProvider,
    ProviderUnavailable,
    ScriptedChatProvider,
    ScriptedRetrievalProvider,
)


class StubResponse:
    def __init__(self, status_code, payload=None):
        self.status_code = status_code
        self._payload = payload or {}

    def json(self):
        return self._payload


class StubSession:
    def __init__(self, script):
        self.script = list(script)
        self.calls = []

    def post(self, url, json=None, headers=None, timeout=None):
        self.calls.append(("post", json, headers))
        item = self.script.pop(0)
        if isinstance(item, Exception):
            raise item
        return item

    def get(self, url, params=None, headers=None, timeout=None):
        self.calls.append(("get", params, headers))
        item = self.script.pop(0)
        if isinstance(item, Exception):
            raise item
        return item


def chat_payload(text):
    return {"choices": [{"message": {"content": text}}]}


def test_scripted_chat_replays_in_order():
    chat = ScriptedChatProvider(["one", "two"])
    assert chat.complete([{"role": "user", "content": "a"}]) == "one"
    assert chat.complete([{"role": "user", "content": "b"}]) == "two"
    with pytest.raises(ProviderUnavailable):
        chat.complete([{"role": "user", "content": "c"}])
    assert len(chat.calls) == 3


def test_http_chat_success():
    session = StubSession([StubResponse(200, chat_payload("hello"))])
    chat = HttpChatProvider("http://c", "model-x", session=session, sleep=lambda s: None)
    reply = chat.complete([{"role": "user", "content": "hi"}])
    assert reply == "hello"
    _, body, _ = session.calls[0]
    assert body["model"] == "model-x"
    assert body["messages"][0]["content"] == "hi"


def test_http_chat_retries_then_gives_up():
    session = StubSession([requests.ConnectionError("x")] * 3)
    chat = HttpChatProvider("http://c", "m", session=session, sleep=lambda s: None)
    with pytest.raises(ProviderUnavailable):
        chat.complete([{"role": "user", "content": "hi"}])
    assert len(session.calls) == 3


def test_http_chat_client_error_fails_fast():
    session = StubSession([StubResponse(403)])
    chat = HttpChatProvider("http://c", "m", session=session, sleep=lambda s: None)
    with pytest.raises(ProviderUnavailable):
        chat.complete([{"role": "user", "content": "hi"}])
    assert len(session.calls) == 1


def test_http_chat_sends_key_from_env(monkeypatch):
    monkeypatch.setenv("CHAT_KEY", "k123")
    session = StubSession([StubResponse(200, chat_payload("ok"))])
    chat = HttpChatProvider(
        "http://c", "m", api_key_env="CHAT_KEY", session=session, sleep=lambda s: None
    )
    chat.complete([{"role": "user", "content": "hi"}])
    headers = session.calls[0][2]
    assert headers["Authorization"] == "Bearer k123"


def test_noop_retrieval_finds_nothing():
    assert NoopRetrievalProvider().search("anything", limit=5) == []


def test_scripted_retrieval_respects_limit():
    provider = ScriptedRetrievalProvider([("a", "ta"), ("b", "tb"), ("c", "tc")])
    assert provider.search("q", limit=2) == [("a", "ta"), ("b", "tb")]
    assert provider.queries == ["q"]


def test_http_retrieval_success_and_failure():
    session = StubSession(
        [
            StubResponse(200, {"results": [{"url": "u1", "text": "t1"}]}),
            StubResponse(500),
        ]
    )
    provider = HttpRetrievalProvider("http://s", session=session)
    assert provider.search("q", limit=3) == [("u1", "t1")]
    with pytest.raises(ProviderUnavailable):
        provider.search("q", limit=3)
