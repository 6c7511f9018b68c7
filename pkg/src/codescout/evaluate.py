"""Success-at-k evaluation over query/snippet rows.

Rows are line-delimited JSON with fields {query, repo, path, identifier,
span}; the public code-search benchmark column names ("docstring",
"func_name") are accepted as aliases. A row whose truth snippet cannot be
resolved in the indexed repository is reported as skipped and excluded
from n. Retrieving the class that lexically contains the truth function
counts as a hit.
"""

import json
import logging
import math
from dataclasses import dataclass, field

from .errors import FileUnreadable
from .extract import Snippet, SnippetIndex

logger = logging.getLogger(__name__)

Z_95 = 1.96  # two-sided 95% normal quantile


@dataclass(frozen=True)
class EvalRow:
    query: str
    repo: str
    path: str
    identifier: str | None = None
    span: tuple[int, int] | None = None
    language: str = "python"


@dataclass(frozen=True)
class RowResult:
    query: str
    hit_rank: int | None
    matched_by: str  # "exact" | "class-containment" | "miss"
    diagnostic: str = ""


@dataclass
class EvalReport:
    n: int
    skipped: int
    successes_at_1: int
    successes_at_10: int
    rate_at_1: float
    rate_at_10: float
    ci_half_width_at_1: float
    ci_half_width_at_10: float
    rows: list[RowResult] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return self.n == 0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "skipped": self.skipped,
            "empty": self.empty,
            "success_at_1": {
                "successes": self.successes_at_1,
                "rate": self.rate_at_1,
                "ci_half_width": self.ci_half_width_at_1,
            },
            "success_at_10": {
                "successes": self.successes_at_10,
                "rate": self.rate_at_10,
                "ci_half_width": self.ci_half_width_at_10,
            },
            "rows": [
                {
                    "query": r.query,
                    "hit_rank": r.hit_rank,
                    "matched_by": r.matched_by,
                    "diagnostic": r.diagnostic,
                }
                for r in self.rows
            ],
        }


_ALIASES = {"docstring": "query", "func_name": "identifier", "url": "repo"}


def load_rows(path) -> list[EvalRow]:
    """Parse rows from a JSONL file; malformed lines are skipped with their
    line numbers logged."""
    try:
        with open(path, encoding="utf-8") as handle:
            raw_lines = handle.readlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise FileUnreadable(f"{path}: {exc}") from exc

    rows: list[EvalRow] = []
    bad = 0
    for lineno, line in enumerate(raw_lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            if not isinstance(record, dict):
                raise ValueError("record is not an object")
            for alias, canonical in _ALIASES.items():
                if alias in record and canonical not in record:
                    record[canonical] = record[alias]
            span = record.get("span")
            if span is not None:
                span = (int(span[0]), int(span[1]))
            rows.append(
                EvalRow(
                    query=record["query"],
                    repo=record["repo"],
                    path=record["path"],
                    identifier=record.get("identifier"),
                    span=span,
                    language=record.get("language", "python"),
                )
            )
        except (KeyError, ValueError, TypeError, json.JSONDecodeError) as exc:
            bad += 1
            logger.warning("%s line %d: skipping malformed row (%s)", path, lineno, exc)
    if bad and not rows:
        logger.error("%s: all %d lines malformed", path, bad)
    return rows


def resolve_truth(row: EvalRow, index: SnippetIndex) -> Snippet | None:
    """Find the snippet a row points at, by identifier or by span."""
    in_file = [s for s in index.all_snippets() if s.relative_path == row.path]
    if row.identifier:
        exact = [s for s in in_file if s.qualified_name == row.identifier]
        if exact:
            return exact[0]
        suffix = [s for s in in_file if s.qualified_name.endswith("." + row.identifier)]
        if suffix:
            suffix.sort(key=lambda s: (s.kind != "function", s.span[0]))
            return suffix[0]
    if row.span:
        start, end = row.span
        exact = [s for s in in_file if s.span == (start, end)]
        if exact:
            return exact[0]
        containing = [s for s in in_file if s.span[0] <= start and end <= s.span[1]]
        if containing:
            containing.sort(key=lambda s: s.span[1] - s.span[0])
            return containing[0]
    return None


def hit_rank(ranked: list[Snippet], truth: Snippet) -> tuple[int | None, str]:
    """First position where the truth (or its containing class) appears."""
    for pos, snippet in enumerate(ranked, start=1):
        if snippet.id == truth.id:
            return pos, "exact"
        if (
            snippet.kind == "class"
            and snippet.relative_path == truth.relative_path
            and snippet.span[0] <= truth.span[0]
            and truth.span[1] <= snippet.span[1]
        ):
            return pos, "class-containment"
    return None, "miss"


def success_at_k(ranked: list[Snippet], truth: Snippet, k: int) -> int:
    rank, _ = hit_rank(ranked, truth)
    return 1 if rank is not None and rank <= k else 0


def aggregate(successes: int, n: int) -> tuple[float, float]:
    """Proportion and its 95% normal-approximation half-width."""
    if n <= 0:
        raise ValueError("n must be positive")
    if not 0 <= successes <= n:
        raise ValueError("successes must lie in [0, n]")
    rate = successes / n
    half_width = Z_95 * math.sqrt(rate * (1.0 - rate) / n)
    return rate, half_width


def run_eval(rows: list[EvalRow], engine, options=None) -> EvalReport:
    """Drive the full pipeline per row and score it.

    `engine` is a search engine exposing ensure_indexed(source) and
    search_snippets(indexed, query, options); reranking is pinned off for
    reproducibility regardless of what the options say.
    """
    from .pipeline import SearchOptions  # local import; pipeline depends on us

    options = options or SearchOptions()
    options = options.with_rerank(False)

    results: list[RowResult] = []
    skipped = 0
    s1 = s10 = 0
    indexed_cache: dict[str, object] = {}
    for row in rows:
        try:
            indexed = indexed_cache.get(row.repo)
            if indexed is None:
                indexed = engine.ensure_indexed(row.repo)
                indexed_cache[row.repo] = indexed
            truth = resolve_truth(row, indexed.index)
            if truth is None:
                skipped += 1
                results.append(
                    RowResult(row.query, None, "miss", diagnostic="truth not resolvable; skipped")
                )
                continue
            ranked = engine.search_snippets(indexed, row.query, options)
        except Exception as exc:  # per-row failures score as misses
            logger.warning("row %r failed: %s", row.query, exc)
            results.append(RowResult(row.query, None, "miss", diagnostic=str(exc)))
            continue
        rank, matched_by = hit_rank(ranked, truth)
        results.append(RowResult(row.query, rank, matched_by))
        if rank is not None and rank <= 1:
            s1 += 1
        if rank is not None and rank <= 10:
            s10 += 1

    n = len(rows) - skipped
    if n > 0:
        rate1, hw1 = aggregate(s1, n)
        rate10, hw10 = aggregate(s10, n)
    else:
        rate1 = hw1 = rate10 = hw10 = 0.0
    return EvalReport(
        n=n,
        skipped=skipped,
        successes_at_1=s1,
        successes_at_10=s10,
        rate_at_1=rate1,
        rate_at_10=rate10,
        ci_half_width_at_1=hw1,
        ci_half_width_at_10=hw10,
        rows=results,
    )


def render_table(report: EvalReport, label: str = "this run") -> str:
    """Summary table: success rates with 95% interval half-widths."""
    if report.empty:
        return "no rows evaluated (empty input)"
    header = f"{'Run':<24}{'Success@10':<18}{'Success@1':<18}"
    line = (
        f"{label:<24}"
        f"{100 * report.rate_at_10:.1f} +/- {100 * report.ci_half_width_at_10:.1f}"
        f"{'':<4}"
        f"{100 * report.rate_at_1:.1f} +/- {100 * report.ci_half_width_at_1:.1f}"
    )
    extra = f"rows scored: {report.n}, skipped: {report.skipped}"
    return "\n".join([header, line, extra])
