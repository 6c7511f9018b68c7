"""Candidate code generation from the augmented query.

Two chat calls per round: one writes Python for the query, the next judges
it. A rejected draft gets exactly one regeneration round, whose result is
kept regardless of the second verdict, so live mode always costs two or
four calls. Without a reachable provider the stage degrades to treating
the augmented query text itself as the "code", which downstream streams
can still embed and compare.
"""

import logging
import re
from dataclasses import dataclass

from .augment import AugmentedQuery
from .errors import ProviderUnavailable
from .extract import decompose_generated_code
from .providers import ChatProvider

logger = logging.getLogger(__name__)

GENERATION_PROMPT = (
    "Write Python code that implements the following request. Output only "
    "Python source code, no prose, no markdown.\n\nRequest:\n{query}"
)
QUALITY_PROMPT = (
    "You are reviewing generated Python code for the request below. Reply "
    "with the single word ACCEPT if the code is a reasonable implementation, "
    "or REJECT if it should be rewritten.\n\nRequest:\n{query}\n\nCode:\n{code}"
)
REGENERATION_PROMPT = (
    "Your previous draft was rejected by review. Write a better Python "
    "implementation of the request. Output only Python source code.\n\n"
    "Request:\n{query}\n\nPrevious draft:\n{code}"
)

_FENCE_RE = re.compile(r"```(?:[A-Za-z0-9_+-]*)\n(.*?)```", re.DOTALL)


@dataclass(frozen=True)
class GeneratedCode:
    text: str
    components: tuple[str, ...]
    quality_verdict: str  # "accept" | "revised" | "fallback"
    generation_calls: int
    components_fallback: bool = False


def extract_code_text(reply: str) -> str:
    """Unwrap markdown fences if the provider used them despite instructions."""
    blocks = _FENCE_RE.findall(reply)
    if blocks:
        return "\n\n".join(block.strip("\n") for block in blocks)
    return reply


def _is_rejected(verdict_reply: str) -> bool:
    lowered = verdict_reply.lower()
    return "reject" in lowered and "accept" not in lowered


def _fallback(a: AugmentedQuery) -> GeneratedCode:
    decomposed = decompose_generated_code(a.augmented)
    return GeneratedCode(
        text=a.augmented,
        components=tuple(decomposed.components),
        quality_verdict="fallback",
        generation_calls=0,
        components_fallback=decomposed.fallback,
    )


def generate_code(a: AugmentedQuery, chat: ChatProvider | None) -> GeneratedCode:
    """Generate candidate code for the augmented query.

    Returns the fallback form (text = augmented query) when no provider is
    configured or the provider goes away mid-flight.
    """
    if chat is None:
        return _fallback(a)
    try:
        draft_reply = chat.complete(
            [{"role": "user", "content": GENERATION_PROMPT.format(query=a.augmented)}]
        )
        code = extract_code_text(draft_reply)
        verdict_reply = chat.complete(
            [{"role": "user", "content": QUALITY_PROMPT.format(query=a.augmented, code=code)}]
        )
        calls = 2
        verdict = "accept"
        if _is_rejected(verdict_reply):
            retry_reply = chat.complete(
                [{"role": "user",
                  "content": REGENERATION_PROMPT.format(query=a.augmented, code=code)}]
            )
            code = extract_code_text(retry_reply)
            # The second verdict is recorded in the call count only; the
            # regenerated draft is kept either way.
            chat.complete(
                [{"role": "user",
                  "content": QUALITY_PROMPT.format(query=a.augmented, code=code)}]
            )
            calls = 4
            verdict = "revised"
    except ProviderUnavailable as exc:
        logger.warning("code generation degraded to fallback: %s", exc)
        return _fallback(a)

    decomposed = decompose_generated_code(code)
    return GeneratedCode(
        text=code,
        components=tuple(decomposed.components),
        quality_verdict=verdict,
        generation_calls=calls,
        components_fallback=decomposed.fallback,
    )
