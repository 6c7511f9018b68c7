"""Index a small repository and search it, fully offline.

Run from the repository root:

    python demos/offline_search.py [path-to-repo]

Without an argument it indexes the committed planted fixture. Everything
here uses the deterministic offline embedding provider, so results are
bit-for-bit reproducible.
"""

import sys
import tempfile
from pathlib import Path

from codescout import OfflineEmbeddingProvider, SearchEngine, SearchOptions

ROOT = Path(__file__).resolve().parent.parent
DEFAULT_REPO = ROOT / "tests" / "fixtures" / "planted"


def main():
    source = sys.argv[1] if len(sys.argv) > 1 else str(DEFAULT_REPO)
    with tempfile.TemporaryDirectory() as data_dir:
        engine = SearchEngine(data_dir=data_dir, provider=OfflineEmbeddingProvider())

        print(f"indexing {source} ...")
        indexed = engine.index_repo(source)
        print(f"  repo id   : {indexed.repository.id}")
        print(f"  functions : {len(indexed.index.functions)}")
        print(f"  classes   : {len(indexed.index.classes)}")

        queries = [
            "clip polygon edges to a viewport",
            "exponential backoff delay with jitter for an attempt",
        ]
        for query in queries:
            print(f"\nquery: {query}")
            results = engine.search(indexed, query, SearchOptions(top=5))
            for r in results:
                streams = ", ".join(r.streams)
                print(
                    f"  {r.rank}. {r.qualified_name} "
                    f"({r.relative_path}:{r.span[0]}-{r.span[1]}) "
                    f"sim={r.best_similarity:.3f} via {streams}"
                )


if __name__ == "__main__":
    main()
