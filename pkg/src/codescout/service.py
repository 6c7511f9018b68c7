"""HTTP API over the search engine.

POST /repos registers a source and returns a handle id; indexing runs on a
worker thread behind GET /repos/{id}/status, whose states move monotonically
pending -> indexing -> (ready | failed). Search is synchronous against a
ready index. Error bodies are always {"code", "message"}.
"""

import hashlib
import logging
import threading
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import EmptyInput, ProviderUnavailable, SizeLimitExceeded, SourceUnavailable
from .pipeline import IndexedRepo, SearchEngine, SearchOptions

logger = logging.getLogger(__name__)


class RegisterRequest(BaseModel):
    source: str


class SearchOptionsModel(BaseModel):
    rerank: bool = False
    stream1: str = "augmented"
    mode: str = "passthrough"
    top: int | None = None


class SearchRequest(BaseModel):
    query: str
    options: SearchOptionsModel = SearchOptionsModel()


@dataclass
class RepoRecord:
    repo_id: str
    source: str
    status: str = "pending"  # pending | indexing | ready | failed
    reason: str | None = None
    indexed: IndexedRepo | None = None
    history: list[str] = field(default_factory=list)


class Registry:
    """Tracks registered repositories; one build per repo at a time."""

    def __init__(self, engine: SearchEngine):
        self.engine = engine
        self._lock = threading.Lock()
        self._records: dict[str, RepoRecord] = {}

    @staticmethod
    def handle_for(source: str) -> str:
        return hashlib.sha256(f"repo:{source}".encode("utf-8")).hexdigest()[:12]

    def get(self, repo_id: str) -> RepoRecord | None:
        with self._lock:
            return self._records.get(repo_id)

    def _transition(self, record: RepoRecord, status: str, reason: str | None = None) -> None:
        with self._lock:
            record.status = status
            record.reason = reason
            record.history.append(status)

    def register(self, source: str) -> str:
        """Enqueue ingest+index; duplicate registrations of a repo already
        building coalesce onto the running build."""
        repo_id = self.handle_for(source)
        with self._lock:
            record = self._records.get(repo_id)
            if record is not None and record.status in ("pending", "indexing", "ready"):
                return repo_id
            record = RepoRecord(repo_id=repo_id, source=source)
            record.history.append("pending")
            self._records[repo_id] = record
        worker = threading.Thread(target=self._build, args=(record,), daemon=True)
        worker.start()
        return repo_id

    def _build(self, record: RepoRecord) -> None:
        self._transition(record, "indexing")
        try:
            indexed = self.engine.index_repo(record.source)
        except SizeLimitExceeded as exc:
            self._transition(record, "failed", f"size limit: {exc}")
            return
        except SourceUnavailable as exc:
            self._transition(record, "failed", f"source unavailable: {exc}")
            return
        except Exception as exc:  # keep the service alive on any build failure
            logger.exception("index build failed for %s", record.source)
            self._transition(record, "failed", str(exc))
            return
        with self._lock:
            record.indexed = indexed
        self._transition(record, "ready")


def _error(status_code: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status_code, content={"code": status_code, "message": message})


def create_app(engine: SearchEngine, registry: Registry | None = None) -> FastAPI:
    app = FastAPI(title="codescout")
    app.state.registry = registry or Registry(engine)
    # The browser client is served from its own origin (static files), so
    # the API must answer cross-origin requests.
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(HTTPException)
    async def handle_http_error(request: Request, exc: HTTPException):
        return _error(exc.status_code, str(exc.detail))

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError):
        return _error(422, str(exc.errors()))

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/repos")
    def register(body: RegisterRequest):
        repo_id = app.state.registry.register(body.source)
        return {"id": repo_id}

    @app.get("/repos/{repo_id}/status")
    def status(repo_id: str):
        record = app.state.registry.get(repo_id)
        if record is None:
            raise HTTPException(404, f"unknown repo id: {repo_id}")
        payload = {"id": record.repo_id, "status": record.status}
        if record.status == "failed":
            payload["reason"] = record.reason
        if record.status == "ready" and record.indexed is not None:
            payload["functions"] = len(record.indexed.index.functions)
            payload["classes"] = len(record.indexed.index.classes)
        return payload

    @app.post("/repos/{repo_id}/search")
    def search(repo_id: str, body: SearchRequest):
        record = app.state.registry.get(repo_id)
        if record is None:
            raise HTTPException(404, f"unknown repo id: {repo_id}")
        if not body.query.strip():
            raise HTTPException(422, "query is empty")
        if record.status != "ready" or record.indexed is None:
            raise HTTPException(409, f"repo is not ready (status: {record.status})")
        options = SearchOptions(
            rerank=body.options.rerank,
            stream1=body.options.stream1,
            mode=body.options.mode,
            top=body.options.top,
        )
        try:
            results = engine.search(record.indexed, body.query, options)
        except EmptyInput as exc:
            raise HTTPException(422, str(exc))
        except ProviderUnavailable as exc:
            raise HTTPException(503, str(exc))
        return {
            "results": [
                {
                    "rank": r.rank,
                    "snippet_id": r.snippet_id,
                    "kind": r.kind,
                    "qualified_name": r.qualified_name,
                    "relative_path": r.relative_path,
                    "span": list(r.span),
                    "raw_text": r.raw_text,
                    "best_similarity": r.best_similarity,
                    "streams": list(r.streams),
                }
                for r in results
            ]
        }

    return app
