"""Three comparison streams, their union, and final ranking.

Stream 1 compares the query embedding against every function; stream 2
compares the generated-code embedding against functions and classes;
stream 3 pairs each generated component function with its single nearest
function. The deduplicated union of all selections is the final target
set, at most 9 + p members for p components, which keeps it small enough
to hand to a chat provider for an optional rerank.
"""

import logging
import re
from dataclasses import dataclass

from .augment import AugmentedQuery
from .embed import EmbeddingVector, top_k
from .errors import EmptyIndex, EmptySet, ProviderUnavailable
from .providers import ChatProvider

logger = logging.getLogger(__name__)

STREAM_QUERY_VS_FUNCTIONS = "query_vs_functions"
STREAM_CODE_VS_FUNCTIONS = "code_vs_functions"
STREAM_CODE_VS_CLASSES = "code_vs_classes"
STREAM_COMPONENT_VS_FUNCTIONS = "component_vs_functions"

TOP_K_PER_STREAM = 3

RERANK_PROMPT = (
    "A developer searched a repository for: {query}\n\n"
    "Candidate snippets, one per numbered entry:\n{snippets}\n\n"
    "Reply with the entry numbers in order of relevance, most relevant "
    "first, one per line."
)


@dataclass(frozen=True)
class RankedCandidate:
    snippet_id: str
    stream: str
    similarity: float
    component_index: int | None = None


@dataclass(frozen=True)
class TargetMember:
    snippet_id: str
    provenance: tuple[RankedCandidate, ...]

    @property
    def best_similarity(self) -> float:
        return max(c.similarity for c in self.provenance)


@dataclass(frozen=True)
class FinalTargetSet:
    query: str
    members: tuple[TargetMember, ...]


@dataclass
class EmbeddedIndex:
    """Snippet vectors split into the function pool and the class pool."""

    functions: list[tuple[str, EmbeddingVector]]
    classes: list[tuple[str, EmbeddingVector]]


def stream_query_vs_functions(
    qvec: EmbeddingVector, index: EmbeddedIndex
) -> list[RankedCandidate]:
    if not index.functions:
        raise EmptyIndex("no function snippets to compare against")
    return [
        RankedCandidate(snippet_id=sid, stream=STREAM_QUERY_VS_FUNCTIONS, similarity=sim)
        for sid, sim in top_k(qvec, index.functions, TOP_K_PER_STREAM)
    ]


def stream_code_vs_snippets(
    cvec: EmbeddingVector, index: EmbeddedIndex
) -> list[RankedCandidate]:
    """Top matches for the generated code in both pools.

    An empty class pool yields only the function half; both pools empty is
    an error.
    """
    if not index.functions and not index.classes:
        raise EmptyIndex("no snippets to compare against")
    candidates = []
    if index.functions:
        candidates.extend(
            RankedCandidate(snippet_id=sid, stream=STREAM_CODE_VS_FUNCTIONS, similarity=sim)
            for sid, sim in top_k(cvec, index.functions, TOP_K_PER_STREAM)
        )
    if index.classes:
        candidates.extend(
            RankedCandidate(snippet_id=sid, stream=STREAM_CODE_VS_CLASSES, similarity=sim)
            for sid, sim in top_k(cvec, index.classes, TOP_K_PER_STREAM)
        )
    return candidates


def stream_components_vs_functions(
    components: list[EmbeddingVector], index: EmbeddedIndex
) -> list[RankedCandidate]:
    """The single most similar function for each generated component."""
    if not index.functions:
        raise EmptyIndex("no function snippets to compare against")
    candidates = []
    for i, cvec in enumerate(components):
        sid, sim = top_k(cvec, index.functions, 1)[0]
        candidates.append(
            RankedCandidate(
                snippet_id=sid,
                stream=STREAM_COMPONENT_VS_FUNCTIONS,
                similarity=sim,
                component_index=i,
            )
        )
    return candidates


def build_final_target_set(
    candidates: list[RankedCandidate], query: str = ""
) -> FinalTargetSet:
    """Union of all stream selections, deduplicated with merged provenance."""
    if not candidates:
        raise EmptySet("all streams were empty")
    grouped: dict[str, list[RankedCandidate]] = {}
    for candidate in candidates:
        grouped.setdefault(candidate.snippet_id, []).append(candidate)
    members = tuple(
        TargetMember(snippet_id=sid, provenance=tuple(cands))
        for sid, cands in grouped.items()
    )
    return FinalTargetSet(query=query, members=members)


def rank_final_set(target_set: FinalTargetSet) -> list[str]:
    """Snippet ids by best similarity, descending; ties by ascending id.

    Position 1 is the success-at-1 candidate.
    """
    ordered = sorted(
        target_set.members, key=lambda m: (-m.best_similarity, m.snippet_id)
    )
    return [m.snippet_id for m in ordered]


def _parse_ordering(reply: str, presented_ids: list[str]) -> list[str]:
    """Map a provider reply back onto snippet ids; unknown refs are dropped."""
    id_set = set(presented_ids)
    chosen: list[str] = []
    seen: set[str] = set()
    for token in re.findall(r"[A-Za-z0-9_.:/-]+", reply):
        sid = None
        if token in id_set:
            sid = token
        elif token.isdigit() and 1 <= int(token) <= len(presented_ids):
            sid = presented_ids[int(token) - 1]
        if sid is not None and sid not in seen:
            chosen.append(sid)
            seen.add(sid)
    chosen.extend(sid for sid in presented_ids if sid not in seen)
    return chosen


def rerank_with_chat(
    target_set: FinalTargetSet,
    a: AugmentedQuery,
    chat: ChatProvider | None,
    snippet_texts: dict[str, str],
    prompt_template: str = RERANK_PROMPT,
) -> list[str]:
    """Let a chat provider reorder the final set.

    The output is always a permutation of the set: hallucinated references
    are dropped and omitted members are appended in similarity order. An
    unavailable provider falls back to the similarity ordering.
    """
    baseline = rank_final_set(target_set)
    if chat is None:
        return baseline
    numbered = "\n".join(
        f"{i}. [{sid}]\n{snippet_texts.get(sid, '')}" for i, sid in enumerate(baseline, start=1)
    )
    prompt = prompt_template.format(query=a.augmented, snippets=numbered)
    try:
        reply = chat.complete([{"role": "user", "content": prompt}])
    except ProviderUnavailable as exc:
        logger.warning("rerank provider unavailable; keeping similarity order: %s", exc)
        return baseline
    return _parse_ordering(reply, baseline)
