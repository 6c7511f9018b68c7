"""Show the generative stages under scripted (deterministic) providers.

    python demos/scripted_providers.py

Demonstrates three behaviors that matter in production but are awkward to
observe against live endpoints: the two-call augmentation budget, the
generate-then-judge code chain, and graceful degradation when a provider
is unreachable.
"""

from codescout import (
    AugmentedQuery,
    Embedder,
    OfflineEmbeddingProvider,
    ScriptedChatProvider,
    UnavailableChatProvider,
    augment_query,
    generate_code,
)
from codescout.augment import CONTINUE_MARKER


def main():
    embedder = Embedder(OfflineEmbeddingProvider())

    print("1) augmentation under the call budget")
    greedy = ScriptedChatProvider([f"details... {CONTINUE_MARKER}"] * 8)
    result = augment_query(
        "parse configuration files", "demo/repo", chat=greedy, retrieval=None,
        embedder=embedder, mode="live",
    )
    print(f"   provider wanted 8 calls, got {result.provider_calls_used}")
    print(f"   diagnostics: {list(result.diagnostics)}")

    print("\n2) code generation with a rejected first draft")
    chat = ScriptedChatProvider(
        [
            "def parse(path):\n    return open(path).read()\n",
            "REJECT, it leaks the file handle",
            "def parse(path):\n    with open(path) as f:\n        return f.read()\n",
            "ACCEPT",
        ]
    )
    a = AugmentedQuery(raw="parse configuration files", augmented="parse configuration files")
    generated = generate_code(a, chat)
    print(f"   verdict={generated.quality_verdict} calls={generated.generation_calls}")
    print(f"   components: {len(generated.components)}")

    print("\n3) degradation when the chat endpoint is down")
    fallen_back = generate_code(a, UnavailableChatProvider())
    print(f"   verdict={fallen_back.quality_verdict} calls={fallen_back.generation_calls}")
    print(f"   the query text itself becomes the comparison code: "
          f"{fallen_back.text!r}")


if __name__ == "__main__":
    main()
