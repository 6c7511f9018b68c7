"""Embedding providers, on-disk cache, and similarity primitives.

Two providers ship: a deterministic offline one for reproducible runs and
tests, and an HTTP client speaking the common embeddings REST contract
(batch of texts in, vectors out, in input order). Vectors carry a provider
tag so results from different models are never mixed.
"""

import hashlib
import logging
import os
import re
import struct
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import requests

from .errors import DimensionMismatch, EmptyInput, ProviderUnavailable, ZeroVector

logger = logging.getLogger(__name__)

OFFLINE_DIM = 256
HTTP_BATCH_SIZE = 64

_TOKEN_RE = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class EmbeddingVector:
    values: np.ndarray
    dim: int
    provider_tag: str

    def __post_init__(self):
        if len(self.values) != self.dim:
            raise DimensionMismatch(f"vector has {len(self.values)} values, dim says {self.dim}")


def fnv1a_32(token: str) -> int:
    """32-bit FNV-1a over the token's UTF-8 bytes."""
    h = 0x811C9DC5
    for byte in token.encode("utf-8"):
        h ^= byte
        h = (h * 0x01000193) & 0xFFFFFFFF
    return h


def offline_token_dims(text: str) -> dict[int, int]:
    """Dimension -> count mapping the offline provider accumulates."""
    counts: dict[int, int] = {}
    for token in _TOKEN_RE.findall(text.lower()):
        dim = fnv1a_32(token) % OFFLINE_DIM
        counts[dim] = counts.get(dim, 0) + 1
    return counts


class OfflineEmbeddingProvider:
    """Deterministic hashed bag-of-words embedding.

    Lowercase, split on non-alphanumeric boundaries, FNV-1a each token into
    one of 256 dimensions, accumulate counts, L2-normalize.
    """

    tag = "offline-fnv1a-256"
    dim = OFFLINE_DIM

    def embed_batch(self, texts: list[str]) -> list[np.ndarray]:
        vectors = []
        for text in texts:
            counts = offline_token_dims(text)
            if not counts:
                raise EmptyInput("no tokens after normalization")
            vec = np.zeros(self.dim, dtype=np.float64)
            for dim, count in counts.items():
                vec[dim] = float(count)
            vectors.append(vec / np.linalg.norm(vec))
        return vectors


class HttpEmbeddingProvider:
    """Client for a hosted embeddings endpoint.

    POST {model, input: [texts]} and expect {"data": [{"embedding": [...]}]}
    in input order. Batches of 64, three attempts with exponential backoff.
    The API key is read from an environment variable, never from flags.
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
        self.tag = f"http:{model}"
        self.api_key_env = api_key_env
        self._session = session if session is not None else requests.Session()
        self._max_attempts = max_attempts
        self._backoff = backoff
        self._sleep = sleep

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def _post_batch(self, chunk: list[str]) -> list[np.ndarray]:
        last_error = "no attempt made"
        for attempt in range(self._max_attempts):
            if attempt:
                self._sleep(self._backoff * 2 ** (attempt - 1))
            try:
                resp = self._session.post(
                    self.endpoint,
                    json={"model": self.model, "input": chunk},
                    headers=self._headers(),
                    timeout=120,
                )
            except requests.RequestException as exc:
                last_error = str(exc)
                continue
            if resp.status_code != 200:
                last_error = f"HTTP {resp.status_code}"
                if 400 <= resp.status_code < 500 and resp.status_code != 429:
                    break  # client errors won't improve with retries
                continue
            data = resp.json()["data"]
            data = sorted(data, key=lambda item: item.get("index", 0))
            return [np.asarray(item["embedding"], dtype=np.float64) for item in data]
        raise ProviderUnavailable(f"embeddings endpoint {self.endpoint}: {last_error}")

    def embed_batch(self, texts: list[str]) -> list[np.ndarray]:
        vectors: list[np.ndarray] = []
        for start in range(0, len(texts), HTTP_BATCH_SIZE):
            vectors.extend(self._post_batch(texts[start : start + HTTP_BATCH_SIZE]))
        return vectors


class EmbeddingCache:
    """Disk cache keyed by (provider tag, content hash).

    Each entry is one binary record guarded by a checksum; a corrupt record
    reads as a miss. Writes go through a temp file plus atomic rename so
    concurrent writers of the same key cannot tear a record.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def _path(self, tag: str, content_hash: str) -> Path:
        safe_tag = re.sub(r"[^A-Za-z0-9._-]", "_", tag)
        return self.root / safe_tag / content_hash[:2] / f"{content_hash}.vec"

    @staticmethod
    def content_hash(text: str) -> str:
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def get(self, tag: str, content_hash: str) -> np.ndarray | None:
        path = self._path(tag, content_hash)
        try:
            blob = path.read_bytes()
        except OSError:
            return None
        if len(blob) < 36:
            return None
        checksum, payload = blob[:32], blob[32:]
        if hashlib.sha256(payload).digest() != checksum:
            logger.warning("corrupt cache record %s; treating as miss", path)
            return None
        (dim,) = struct.unpack("<I", payload[:4])
        vec = np.frombuffer(payload[4:], dtype="<f8")
        if len(vec) != dim:
            return None
        return vec.copy()

    def put(self, tag: str, content_hash: str, vector: np.ndarray) -> None:
        path = self._path(tag, content_hash)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = struct.pack("<I", len(vector)) + np.asarray(vector, dtype="<f8").tobytes()
        blob = hashlib.sha256(payload).digest() + payload
        tmp = path.with_suffix(f".tmp{os.getpid()}")
        tmp.write_bytes(blob)
        tmp.replace(path)


class Embedder:
    """Provider plus optional cache; the unit every pipeline stage holds."""

    def __init__(self, provider, cache: EmbeddingCache | None = None):
        self.provider = provider
        self.cache = cache
        self.hits = 0
        self.misses = 0

    @property
    def tag(self) -> str:
        return self.provider.tag

    def embed(self, text: str) -> EmbeddingVector:
        return self.embed_many([text])[0]

    def embed_many(self, texts: list[str]) -> list[EmbeddingVector]:
        results: list[np.ndarray | None] = [None] * len(texts)
        misses: list[int] = []
        hashes = [EmbeddingCache.content_hash(t) for t in texts]
        if self.cache is not None:
            for i, content_hash in enumerate(hashes):
                cached = self.cache.get(self.tag, content_hash)
                if cached is None:
                    misses.append(i)
                else:
                    results[i] = cached
                    self.hits += 1
        else:
            misses = list(range(len(texts)))
        if misses:
            fresh = self.provider.embed_batch([texts[i] for i in misses])
            for i, vec in zip(misses, fresh):
                results[i] = vec
                self.misses += 1
                if self.cache is not None:
                    self.cache.put(self.tag, hashes[i], vec)
        return [
            EmbeddingVector(values=vec, dim=len(vec), provider_tag=self.tag)
            for vec in results
        ]


def cosine_similarity(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """a.b / (|a||b|); defined only for same-provider, same-dim vectors."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"dims differ: {a.dim} vs {b.dim}")
    if a.provider_tag != b.provider_tag:
        raise DimensionMismatch(
            f"provider tags differ: {a.provider_tag!r} vs {b.provider_tag!r}"
        )
    norm_a = float(np.linalg.norm(a.values))
    norm_b = float(np.linalg.norm(b.values))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroVector("cosine similarity undefined for all-zero vector")
    return float(np.dot(a.values, b.values) / (norm_a * norm_b))


def top_k(
    query: EmbeddingVector,
    candidates: list[tuple[str, EmbeddingVector]],
    k: int,
) -> list[tuple[str, float]]:
    """The k candidates most similar to the query, descending.

    Ties break by ascending id; fewer than k candidates returns them all.
    """
    if k < 1:
        raise ValueError("k must be positive")
    scored = [(cid, cosine_similarity(query, vec)) for cid, vec in candidates]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:k]
