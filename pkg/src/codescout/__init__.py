"""Repository-scoped semantic code search.

A query is optionally augmented with repository context, candidate code is
generated from it, and three embedding comparison streams (query vs
functions, code vs functions and classes, components vs functions) are
unioned into a small final target set, ranked by best cosine similarity.
"""

from .augment import AgentBudget, AugmentedQuery, RetrievalDoc, augment_query, filter_retrieved
from .embed import (
    Embedder,
    EmbeddingCache,
    EmbeddingVector,
    HttpEmbeddingProvider,
    OfflineEmbeddingProvider,
    cosine_similarity,
    top_k,
)
from .errors import (
    CodeScoutError,
    DimensionMismatch,
    EmptyIndex,
    EmptyInput,
    EmptySet,
    FileUnreadable,
    ParseFailure,
    ProviderUnavailable,
    SizeLimitExceeded,
    SourceUnavailable,
    ZeroVector,
)
from .evaluate import EvalReport, EvalRow, aggregate, load_rows, run_eval, success_at_k
from .extract import (
    DecomposedCode,
    Snippet,
    SnippetIndex,
    build_index,
    decompose_generated_code,
    extract_snippets,
    strip_comments,
)
from .generate import GeneratedCode, generate_code
from .ingest import Repository, SourceFile, acquire_repo, list_python_sources
from .pipeline import IndexedRepo, SearchEngine, SearchOptions, SearchResult
from .providers import (
    HttpChatProvider,
    HttpRetrievalProvider,
    NoopRetrievalProvider,
    ScriptedChatProvider,
    ScriptedRetrievalProvider,
    UnavailableChatProvider,
)
from .rank import (
    EmbeddedIndex,
    FinalTargetSet,
    RankedCandidate,
    TargetMember,
    build_final_target_set,
    rank_final_set,
    rerank_with_chat,
    stream_code_vs_snippets,
    stream_components_vs_functions,
    stream_query_vs_functions,
)

__version__ = "0.1.0"

__all__ = [
    "AgentBudget",
    "AugmentedQuery",
    "CodeScoutError",
    "DecomposedCode",
    "DimensionMismatch",
    "EmbeddedIndex",
    "Embedder",
    "EmbeddingCache",
    "EmbeddingVector",
    "EmptyIndex",
    "EmptyInput",
    "EmptySet",
    "EvalReport",
    "EvalRow",
    "FileUnreadable",
    "FinalTargetSet",
    "GeneratedCode",
    "HttpChatProvider",
    "HttpEmbeddingProvider",
    "HttpRetrievalProvider",
    "IndexedRepo",
    "NoopRetrievalProvider",
    "ParseFailure",
    "ProviderUnavailable",
    "RankedCandidate",
    "Repository",
    "RetrievalDoc",
    "ScriptedChatProvider",
    "ScriptedRetrievalProvider",
    "SearchEngine",
    "SearchOptions",
    "SearchResult",
    "SizeLimitExceeded",
    "Snippet",
    "SnippetIndex",
    "SourceFile",
    "SourceUnavailable",
    "TargetMember",
    "UnavailableChatProvider",
    "ZeroVector",
    "aggregate",
    "augment_query",
    "build_final_target_set",
    "build_index",
    "cosine_similarity",
    "decompose_generated_code",
    "extract_snippets",
    "filter_retrieved",
    "generate_code",
    "list_python_sources",
    "load_rows",
    "rank_final_set",
    "rerank_with_chat",
    "run_eval",
    "stream_code_vs_snippets",
    "stream_components_vs_functions",
    "stream_query_vs_functions",
    "strip_comments",
    "success_at_k",
    "top_k",
    "acquire_repo",
]
