"""End-to-end search engine: ingest, extract, embed, rank, persist.

Each indexed repository gets one directory under the data dir holding the
snippet record file (JSONL, one record per snippet) and the embedding
cache; no external database. Indexing an unchanged repository is served
entirely from the cache.
"""

import hashlib
import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path

from .augment import (
    DEFAULT_AUGMENT_PROMPT,
    DEFAULT_RELEVANCE_THRESHOLD,
    AgentBudget,
    AugmentedQuery,
    augment_query,
)
from .embed import Embedder, EmbeddingCache, EmbeddingVector
from .errors import EmptyIndex, EmptyInput, EmptySet, SourceUnavailable
from .extract import Snippet, SnippetIndex, build_index
from .generate import generate_code
from .ingest import DEFAULT_SIZE_LIMIT, Repository, acquire_repo, list_python_sources
from .rank import (
    EmbeddedIndex,
    build_final_target_set,
    rank_final_set,
    rerank_with_chat,
    stream_code_vs_snippets,
    stream_components_vs_functions,
    stream_query_vs_functions,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchOptions:
    rerank: bool = False
    stream1: str = "augmented"  # which query vector stream 1 compares: "augmented" | "raw"
    mode: str = "passthrough"  # augmentation mode: "live" | "passthrough"
    top: int | None = None

    def with_rerank(self, value: bool) -> "SearchOptions":
        return replace(self, rerank=value)


@dataclass(frozen=True)
class SearchResult:
    rank: int
    snippet_id: str
    kind: str
    qualified_name: str
    relative_path: str
    span: tuple[int, int]
    raw_text: str
    best_similarity: float
    streams: tuple[str, ...]


@dataclass
class IndexedRepo:
    repository: Repository
    index: SnippetIndex
    embedded: EmbeddedIndex

    def snippet_by_id(self) -> dict[str, Snippet]:
        return self.index.by_id()


class SearchEngine:
    """Owns providers, per-repo persistence, and the search pipeline."""

    def __init__(
        self,
        data_dir: str | Path,
        provider,
        chat=None,
        retrieval=None,
        budget: AgentBudget = AgentBudget(),
        relevance_threshold: float = DEFAULT_RELEVANCE_THRESHOLD,
        size_limit: int = DEFAULT_SIZE_LIMIT,
        augment_prompt: str = DEFAULT_AUGMENT_PROMPT,
    ):
        self.data_dir = Path(data_dir)
        self.provider = provider
        self.chat = chat
        self.retrieval = retrieval
        self.budget = budget
        self.relevance_threshold = relevance_threshold
        self.size_limit = size_limit
        self.augment_prompt = augment_prompt
        self.last_cache_hits = 0
        self.last_cache_misses = 0

    # ---- persistence -----------------------------------------------------

    def repo_dir(self, repo_id: str) -> Path:
        return self.data_dir / "index" / repo_id

    def _embedder_for(self, repo_id: str) -> Embedder:
        return Embedder(self.provider, EmbeddingCache(self.repo_dir(repo_id) / "embeddings"))

    def _write_store(self, repo: Repository, index: SnippetIndex) -> None:
        repo_dir = self.repo_dir(repo.id)
        repo_dir.mkdir(parents=True, exist_ok=True)
        records = []
        for snippet in index.all_snippets():
            records.append(
                {
                    "id": snippet.id,
                    "kind": snippet.kind,
                    "qualified_name": snippet.qualified_name,
                    "relative_path": snippet.relative_path,
                    "span": list(snippet.span),
                    "raw_sha256": hashlib.sha256(snippet.raw_text.encode()).hexdigest(),
                    "stripped_sha256": hashlib.sha256(snippet.stripped_text.encode()).hexdigest(),
                    "raw_text": snippet.raw_text,
                    "stripped_text": snippet.stripped_text,
                    "enclosing_class": snippet.enclosing_class,
                }
            )
        with open(repo_dir / "snippets.jsonl", "w", encoding="utf-8") as handle:
            for record in records:
                handle.write(json.dumps(record, sort_keys=True) + "\n")
        meta = {
            "repo_id": repo.id,
            "source": repo.source,
            "root": str(repo.root),
            "file_count": repo.file_count,
            "total_bytes": repo.total_bytes,
            "provider_tag": self.provider.tag,
            "functions": len(index.functions),
            "classes": len(index.classes),
            "skipped_files": index.skipped_files,
        }
        (repo_dir / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True))

    def _embed_index(self, repo_id: str, index: SnippetIndex) -> EmbeddedIndex:
        embedder = self._embedder_for(repo_id)
        pools: dict[str, list[tuple[str, EmbeddingVector]]] = {"function": [], "class": []}
        snippets = index.all_snippets()
        vectors = embedder.embed_many([s.stripped_text for s in snippets])
        for snippet, vector in zip(snippets, vectors):
            pools[snippet.kind].append((snippet.id, vector))
        self.last_cache_hits = embedder.hits
        self.last_cache_misses = embedder.misses
        return EmbeddedIndex(functions=pools["function"], classes=pools["class"])

    def index_repo(self, source: str) -> IndexedRepo:
        """Acquire, extract, embed and persist a repository."""
        repo = acquire_repo(source, limit=self.size_limit, cache_dir=self.data_dir)
        sources = list_python_sources(repo)
        index = build_index(repo.id, sources)
        self._write_store(repo, index)
        embedded = self._embed_index(repo.id, index)
        return IndexedRepo(repository=repo, index=index, embedded=embedded)

    def load_index(self, repo_id: str) -> IndexedRepo | None:
        """Rehydrate a persisted index; embeddings come back from the cache."""
        repo_dir = self.repo_dir(repo_id)
        meta_path = repo_dir / "meta.json"
        records_path = repo_dir / "snippets.jsonl"
        if not meta_path.exists() or not records_path.exists():
            return None
        meta = json.loads(meta_path.read_text())
        if meta.get("provider_tag") != self.provider.tag:
            logger.warning(
                "index %s was built with provider %r, engine uses %r; re-embedding",
                repo_id, meta.get("provider_tag"), self.provider.tag,
            )
        index = SnippetIndex(repo_id=repo_id, skipped_files=meta.get("skipped_files", []))
        with open(records_path, encoding="utf-8") as handle:
            for line in handle:
                if not line.strip():
                    continue
                record = json.loads(line)
                snippet = Snippet(
                    id=record["id"],
                    repo_id=repo_id,
                    kind=record["kind"],
                    qualified_name=record["qualified_name"],
                    relative_path=record["relative_path"],
                    span=tuple(record["span"]),
                    raw_text=record["raw_text"],
                    stripped_text=record["stripped_text"],
                    enclosing_class=record.get("enclosing_class"),
                )
                if record.get("raw_sha256") != hashlib.sha256(
                    snippet.raw_text.encode()
                ).hexdigest():
                    logger.warning("checksum mismatch for snippet %s; skipping", snippet.id)
                    continue
                if snippet.kind == "class":
                    index.classes.append(snippet)
                else:
                    index.functions.append(snippet)
        repo = Repository(
            id=meta["repo_id"],
            source=meta["source"],
            root=Path(meta["root"]),
            file_count=meta["file_count"],
            total_bytes=meta["total_bytes"],
        )
        embedded = self._embed_index(repo_id, index)
        return IndexedRepo(repository=repo, index=index, embedded=embedded)

    def ensure_indexed(self, source_or_id: str) -> IndexedRepo:
        """Load a persisted index by id, or acquire and index a source."""
        if self.repo_dir(source_or_id).exists():
            loaded = self.load_index(source_or_id)
            if loaded is not None:
                return loaded
        return self.index_repo(source_or_id)

    # ---- search ----------------------------------------------------------

    def augment(self, indexed: IndexedRepo, query: str, options: SearchOptions) -> AugmentedQuery:
        a = augment_query(
            query,
            repo_label=indexed.repository.source,
            chat=self.chat,
            retrieval=self.retrieval,
            embedder=self._embedder_for(indexed.repository.id),
            budget=self.budget,
            threshold=self.relevance_threshold,
            mode=options.mode,
            prompt_template=self.augment_prompt,
        )
        embedder = self._embedder_for(indexed.repository.id)
        raw_vec = embedder.embed(a.raw)
        aug_vec = raw_vec if a.augmented == a.raw else embedder.embed(a.augmented)
        return replace(a, raw_vector=raw_vec, augmented_vector=aug_vec)

    def _ranked_ids(self, indexed: IndexedRepo, query: str, options: SearchOptions):
        if not query.strip():
            raise EmptyInput("query is empty")
        a = self.augment(indexed, query, options)
        generated = generate_code(a, self.chat)
        embedder = self._embedder_for(indexed.repository.id)

        qvec = a.augmented_vector if options.stream1 == "augmented" else a.raw_vector
        candidates = []
        try:
            candidates.extend(stream_query_vs_functions(qvec, indexed.embedded))
        except EmptyIndex:
            logger.warning("no functions in index; query stream skipped")
        try:
            cvec = embedder.embed(generated.text)
        except EmptyInput:
            cvec = None
            logger.warning("generated code has no embeddable tokens; code streams skipped")
        if cvec is not None:
            try:
                candidates.extend(stream_code_vs_snippets(cvec, indexed.embedded))
            except EmptyIndex:
                pass
            component_vectors = []
            for component in generated.components:
                try:
                    component_vectors.append(embedder.embed(component))
                except EmptyInput:
                    continue
            if component_vectors:
                try:
                    candidates.extend(
                        stream_components_vs_functions(component_vectors, indexed.embedded)
                    )
                except EmptyIndex:
                    pass

        try:
            target_set = build_final_target_set(candidates, query=query)
        except EmptySet:
            return [], {}, a
        members = {m.snippet_id: m for m in target_set.members}
        if options.rerank:
            texts = {s.id: s.raw_text for s in indexed.index.all_snippets()}
            ordered = rerank_with_chat(target_set, a, self.chat, texts)
        else:
            ordered = rank_final_set(target_set)
        return ordered, members, a

    def search_snippets(
        self, indexed: IndexedRepo, query: str, options: SearchOptions | None = None
    ) -> list[Snippet]:
        """Ranked snippets, for callers that score rather than render."""
        options = options or SearchOptions()
        ordered, _, _ = self._ranked_ids(indexed, query, options)
        by_id = indexed.snippet_by_id()
        ranked = [by_id[sid] for sid in ordered if sid in by_id]
        if options.top is not None:
            ranked = ranked[: options.top]
        return ranked

    def search(
        self, indexed: IndexedRepo, query: str, options: SearchOptions | None = None
    ) -> list[SearchResult]:
        options = options or SearchOptions()
        ordered, members, _ = self._ranked_ids(indexed, query, options)
        by_id = indexed.snippet_by_id()
        pairs = [
            (by_id[sid], members[sid]) for sid in ordered if sid in by_id and sid in members
        ]
        results = []
        for position, (snippet, member) in enumerate(pairs, start=1):
            if options.top is not None and position > options.top:
                break
            results.append(
                SearchResult(
                    rank=position,
                    snippet_id=snippet.id,
                    kind=snippet.kind,
                    qualified_name=snippet.qualified_name,
                    relative_path=snippet.relative_path,
                    span=snippet.span,
                    raw_text=snippet.raw_text,
                    best_similarity=member.best_similarity,
                    streams=tuple(sorted({c.stream for c in member.provenance})),
                )
            )
        return results


def resolve_repo_source(data_dir: str | Path, source_or_id: str) -> str:
    """Accept either an indexed repo id or a source path/URL."""
    candidate = Path(data_dir) / "index" / source_or_id / "meta.json"
    if candidate.exists():
        return source_or_id
    if Path(source_or_id).exists() or "://" in source_or_id or source_or_id.startswith("git@"):
        return source_or_id
    raise SourceUnavailable(f"{source_or_id}: not an indexed repo id or readable source")
