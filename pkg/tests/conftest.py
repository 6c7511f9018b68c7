import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the oracles module

from codescout import Embedder, OfflineEmbeddingProvider, SearchEngine

FIXTURES = Path(__file__).parent / "fixtures"
MINIUTIL = FIXTURES / "miniutil"
LABELED = FIXTURES / "labeled"
PLANTED = FIXTURES / "planted"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def miniutil() -> Path:
    return MINIUTIL


@pytest.fixture
def labeled_dir() -> Path:
    return LABELED


@pytest.fixture
def labels() -> dict:
    return json.loads((LABELED / "labels.json").read_text())


@pytest.fixture
def planted_dir() -> Path:
    return PLANTED


@pytest.fixture
def planted_queries() -> list[dict]:
    return json.loads((FIXTURES / "planted_queries.json").read_text())


@pytest.fixture
def offline_embedder() -> Embedder:
    return Embedder(OfflineEmbeddingProvider())


@pytest.fixture
def engine(tmp_path) -> SearchEngine:
    """Offline engine with an isolated data dir; no chat, no retrieval."""
    return SearchEngine(data_dir=tmp_path / "data", provider=OfflineEmbeddingProvider())
