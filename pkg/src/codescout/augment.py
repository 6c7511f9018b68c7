"""Query augmentation: enrich the raw query with repository context.

A retrieval step gathers candidate web documents, the ones relevant enough
(by embedding cosine similarity against the query) are shown to the chat
provider, and the provider writes a focused technical paragraph. The
provider is allowed two calls at most and is shown at most one document
per call; an adversarial provider cannot exceed the budget because the
loop, not the provider, owns the counter.

Augmentation is additive: the raw query always appears verbatim at the
start of the augmented text, so the original intent is never lost.
"""

import logging
from dataclasses import dataclass, field, replace

from .embed import Embedder, EmbeddingVector, cosine_similarity
from .errors import EmptyInput, ProviderUnavailable
from .providers import ChatProvider, RetrievalProvider

logger = logging.getLogger(__name__)

# Instruction sent to the chat provider; {query} and {repo} are filled in.
DEFAULT_AUGMENT_PROMPT = (
    "Given an input text prompt: [{query}]. Add more technical details about "
    "some of the topics in this text prompt in the general context of the "
    "following github repo: [{repo}]. If you can't find how it is implemented "
    "in the repository, then provide information on how it is implemented "
    "generally. Ensure that you are not given more info than necessary and "
    "only give info on specifically the topics present in the input text "
    "prompt. Your paragraph will help localize the ideas in the input text "
    "prompt in a large repository so deviating from topic can lead to "
    "inaccuracies down the pipeline. You are on a timer be quick, so you must "
    "be called two times at most and look at one website at most each time "
    "called"
)

# A reply ending with this marker asks for another retrieval round; the
# request is honored only while budget remains.
CONTINUE_MARKER = "[CONTINUE]"

DEFAULT_RELEVANCE_THRESHOLD = 0.3
_FETCH_CANDIDATES = 5  # retrieved per round, before relevance filtering


@dataclass(frozen=True)
class AgentBudget:
    max_calls: int = 2
    max_docs_per_call: int = 1


@dataclass(frozen=True)
class RetrievalDoc:
    locator: str
    text: str
    relevance: float = 0.0
    vector: EmbeddingVector | None = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class AugmentedQuery:
    raw: str
    augmented: str
    retrieval_docs: tuple[RetrievalDoc, ...] = ()
    provider_calls_used: int = 0
    mode: str = "passthrough"  # "live" | "passthrough"
    diagnostics: tuple[str, ...] = ()
    raw_vector: EmbeddingVector | None = field(default=None, repr=False, compare=False)
    augmented_vector: EmbeddingVector | None = field(default=None, repr=False, compare=False)


def filter_retrieved(
    q_vec: EmbeddingVector,
    docs: list[RetrievalDoc],
    threshold: float,
) -> list[RetrievalDoc]:
    """Docs relevant to the query, most relevant first.

    Relevance is cosine similarity between the query vector and each doc's
    vector; docs below the threshold (or without a vector) are dropped.
    """
    scored = []
    for doc in docs:
        if doc.vector is None:
            continue
        relevance = cosine_similarity(q_vec, doc.vector)
        if relevance >= threshold:
            scored.append(replace(doc, relevance=relevance))
    scored.sort(key=lambda d: (-d.relevance, d.locator))
    return scored


def _passthrough(q: str, diagnostics: tuple[str, ...] = ()) -> AugmentedQuery:
    return AugmentedQuery(raw=q, augmented=q, mode="passthrough", diagnostics=diagnostics)


def _round_messages(
    prompt_template: str, q: str, repo_label: str, docs: list[RetrievalDoc]
) -> list[dict[str, str]]:
    instruction = prompt_template.format(query=q, repo=repo_label)
    parts = [instruction]
    if docs:
        parts.append("Retrieved context:")
        parts.extend(f"[{doc.locator}]\n{doc.text}" for doc in docs)
    parts.append(
        f"Reply with one focused paragraph. End your reply with {CONTINUE_MARKER} "
        "only if you need one more retrieval round."
    )
    return [{"role": "user", "content": "\n\n".join(parts)}]


def augment_query(
    q: str,
    repo_label: str,
    chat: ChatProvider | None,
    retrieval: RetrievalProvider | None,
    embedder: Embedder,
    budget: AgentBudget = AgentBudget(),
    threshold: float = DEFAULT_RELEVANCE_THRESHOLD,
    mode: str = "live",
    prompt_template: str = DEFAULT_AUGMENT_PROMPT,
) -> AugmentedQuery:
    """Produce the augmented query, or the raw query in passthrough mode.

    Provider failures never fail the search: the chat provider going away
    degrades to passthrough with a diagnostic, and a third provider call is
    refused with the best-so-far augmentation returned.
    """
    if not q.strip():
        raise EmptyInput("query is empty")
    if mode == "passthrough" or chat is None:
        return _passthrough(q)

    diagnostics: list[str] = []
    try:
        q_vec: EmbeddingVector | None = embedder.embed(q)
    except EmptyInput:
        q_vec = None
        diagnostics.append("query has no embeddable tokens; retrieval filtering disabled")

    paragraphs: list[str] = []
    shown_docs: list[RetrievalDoc] = []
    calls = 0
    wants_more = True
    while wants_more and calls < budget.max_calls:
        round_docs: list[RetrievalDoc] = []
        if retrieval is not None and q_vec is not None:
            try:
                hits = retrieval.search(q, limit=max(_FETCH_CANDIDATES, budget.max_docs_per_call))
            except ProviderUnavailable as exc:
                hits = []
                diagnostics.append(f"retrieval unavailable: {exc}")
            candidates = []
            for locator, text in hits:
                try:
                    vec = embedder.embed(text)
                except EmptyInput:
                    continue
                candidates.append(RetrievalDoc(locator=locator, text=text, vector=vec))
            round_docs = filter_retrieved(q_vec, candidates, threshold)[: budget.max_docs_per_call]

        try:
            reply = chat.complete(_round_messages(prompt_template, q, repo_label, round_docs))
        except ProviderUnavailable as exc:
            if not paragraphs:
                logger.warning("chat provider unavailable; augmenting as passthrough: %s", exc)
                return _passthrough(q, diagnostics=(f"chat unavailable: {exc}",))
            diagnostics.append(f"chat unavailable mid-augmentation: {exc}")
            break
        calls += 1
        shown_docs.extend(round_docs)
        wants_more = CONTINUE_MARKER in reply
        text = reply.replace(CONTINUE_MARKER, "").strip()
        if text:
            paragraphs.append(text)

    if wants_more and calls >= budget.max_calls:
        diagnostics.append(
            f"call budget exhausted after {budget.max_calls} calls; further calls refused"
        )
    if not paragraphs:
        diagnostics.append("provider produced no augmentation text")
        return _passthrough(q, diagnostics=tuple(diagnostics))

    return AugmentedQuery(
        raw=q,
        augmented=q + "\n" + "\n".join(paragraphs),
        retrieval_docs=tuple(shown_docs),
        provider_calls_used=calls,
        mode="live",
        diagnostics=tuple(diagnostics),
    )
