"""Score the search pipeline on the committed fixture rows.

    python demos/evaluate_fixture.py

Builds the ten planted evaluation rows, runs the whole pipeline per row in
passthrough mode, and prints the success-at-k summary table. On the fixture
the pipeline scores 10/10 at both cutoffs by construction; the interesting
part is the report plumbing, which is the same one `codescout eval` uses.
"""

import json
import tempfile
from pathlib import Path

from codescout import EvalRow, OfflineEmbeddingProvider, SearchEngine, run_eval
from codescout.evaluate import render_table

ROOT = Path(__file__).resolve().parent.parent
PLANTED = ROOT / "tests" / "fixtures" / "planted"
QUERIES = ROOT / "tests" / "fixtures" / "planted_queries.json"


def main():
    rows = [
        EvalRow(query=q["query"], repo=str(PLANTED), path=q["path"], identifier=q["identifier"])
        for q in json.loads(QUERIES.read_text())
    ]
    with tempfile.TemporaryDirectory() as data_dir:
        engine = SearchEngine(data_dir=data_dir, provider=OfflineEmbeddingProvider())
        report = run_eval(rows, engine)

    print(render_table(report, label="planted fixture"))
    print()
    for row in report.rows:
        print(f"  rank={row.hit_rank} ({row.matched_by})  {row.query}")


if __name__ == "__main__":
    main()
