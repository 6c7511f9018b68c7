"""Command-line interface: index, search, eval, serve."""

import json
import logging
import sys
from pathlib import Path

import click

from .augment import AgentBudget
from .embed import HttpEmbeddingProvider, OfflineEmbeddingProvider
from .errors import CodeScoutError
from .evaluate import load_rows, render_table, run_eval
from .ingest import DEFAULT_SIZE_LIMIT
from .pipeline import SearchEngine, SearchOptions, resolve_repo_source
from .providers import HttpChatProvider, HttpRetrievalProvider

DEFAULT_DATA_DIR = "~/.cache/codescout"


def _build_engine(ctx: click.Context) -> SearchEngine:
    params = ctx.obj
    if params["provider"] == "offline":
        provider = OfflineEmbeddingProvider()
    else:
        if not params["embed_endpoint"]:
            raise click.ClickException("--embed-endpoint is required with --provider http")
        provider = HttpEmbeddingProvider(
            endpoint=params["embed_endpoint"],
            model=params["embed_model"],
            api_key_env=params["api_key_env"],
        )
    chat = None
    if params["chat_endpoint"]:
        chat = HttpChatProvider(
            endpoint=params["chat_endpoint"],
            model=params["chat_model"],
            api_key_env=params["api_key_env"],
        )
    retrieval = None
    if params["search_endpoint"]:
        retrieval = HttpRetrievalProvider(endpoint=params["search_endpoint"])
    return SearchEngine(
        data_dir=Path(params["data_dir"]).expanduser(),
        provider=provider,
        chat=chat,
        retrieval=retrieval,
        budget=AgentBudget(
            max_calls=params["max_calls"], max_docs_per_call=params["max_docs_per_call"]
        ),
        size_limit=params["limit_bytes"],
    )


@click.group()
@click.option("--data-dir", default=DEFAULT_DATA_DIR, show_default=True,
              help="Directory for working copies, indexes and embedding caches.")
@click.option("--provider", type=click.Choice(["offline", "http"]), default="offline",
              show_default=True, help="Embedding provider.")
@click.option("--embed-endpoint", default=None, help="Embeddings endpoint URL (http provider).")
@click.option("--embed-model", default="text-embedding", show_default=True)
@click.option("--chat-endpoint", default=None, help="Chat-completions endpoint URL.")
@click.option("--chat-model", default="chat", show_default=True)
@click.option("--search-endpoint", default=None, help="Web search endpoint URL.")
@click.option("--api-key-env", default="CODESCOUT_API_KEY", show_default=True,
              help="Environment variable holding the API key.")
@click.option("--limit-bytes", type=int, default=DEFAULT_SIZE_LIMIT, show_default=True,
              help="Repository size limit.")
@click.option("--max-calls", type=int, default=2, show_default=True,
              help="Augmentation call budget.")
@click.option("--max-docs-per-call", type=int, default=1, show_default=True,
              help="Retrieved docs shown per augmentation call.")
@click.option("-v", "--verbose", is_flag=True, help="Log diagnostics to stderr.")
@click.pass_context
def main(ctx, **params):
    """Repository-scoped semantic code search."""
    logging.basicConfig(
        level=logging.INFO if params.pop("verbose") else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.obj = params


@main.command()
@click.argument("source")
@click.pass_context
def index(ctx, source):
    """Acquire SOURCE (local path or git URL) and build its snippet index."""
    engine = _build_engine(ctx)
    try:
        indexed = engine.index_repo(source)
    except CodeScoutError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"repo id: {indexed.repository.id}")
    click.echo(f"|Y| = {len(indexed.index.functions)}")
    click.echo(f"|Z| = {len(indexed.index.classes)}")
    click.echo(f"cache hits: {engine.last_cache_hits}, misses: {engine.last_cache_misses}")
    if indexed.index.skipped_files:
        click.echo(f"skipped files: {', '.join(indexed.index.skipped_files)}", err=True)


@main.command()
@click.argument("repo")
@click.argument("query")
@click.option("--rerank", type=click.Choice(["on", "off"]), default="off", show_default=True)
@click.option("--stream1", type=click.Choice(["augmented", "raw"]), default="augmented",
              show_default=True, help="Query vector used by the query-vs-functions stream.")
@click.option("--mode", type=click.Choice(["live", "passthrough"]), default="passthrough",
              show_default=True, help="Query augmentation mode.")
@click.option("--top", type=int, default=10, show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Emit machine-readable results.")
@click.pass_context
def search(ctx, repo, query, rerank, stream1, mode, top, as_json):
    """Search an indexed REPO (id or source) for QUERY."""
    engine = _build_engine(ctx)
    try:
        source = resolve_repo_source(engine.data_dir, repo)
        indexed = engine.ensure_indexed(source)
        options = SearchOptions(rerank=(rerank == "on"), stream1=stream1, mode=mode, top=top)
        results = engine.search(indexed, query, options)
    except CodeScoutError as exc:
        raise click.ClickException(str(exc))
    if as_json:
        payload = [
            {
                "rank": r.rank,
                "snippet_id": r.snippet_id,
                "kind": r.kind,
                "qualified_name": r.qualified_name,
                "relative_path": r.relative_path,
                "span": list(r.span),
                "best_similarity": r.best_similarity,
                "streams": list(r.streams),
            }
            for r in results
        ]
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
        return
    if not results:
        click.echo("no results")
        return
    for r in results:
        streams = ",".join(r.streams)
        click.echo(
            f"{r.rank:>3}. {r.qualified_name}  "
            f"({r.relative_path}:{r.span[0]}-{r.span[1]})  "
            f"sim={r.best_similarity:.4f}  [{streams}]"
        )


@main.command()
@click.argument("rows_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None,
              help="Write the full machine-readable report here.")
@click.option("--label", default="this run", show_default=True)
@click.option("--stream1", type=click.Choice(["augmented", "raw"]), default="augmented",
              show_default=True)
@click.option("--mode", type=click.Choice(["live", "passthrough"]), default="passthrough",
              show_default=True)
@click.pass_context
def eval(ctx, rows_file, report_path, label, stream1, mode):
    """Score success-at-k over a JSONL row file (reranking pinned off)."""
    engine = _build_engine(ctx)
    try:
        rows = load_rows(rows_file)
        report = run_eval(rows, engine, SearchOptions(stream1=stream1, mode=mode))
    except CodeScoutError as exc:
        raise click.ClickException(str(exc))
    if report_path:
        Path(report_path).write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True))
        click.echo(f"report written to {report_path}", err=True)
    click.echo(render_table(report, label=label))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8765, show_default=True)
@click.pass_context
def serve(ctx, host, port):
    """Run the HTTP API."""
    import uvicorn

    from .service import create_app

    engine = _build_engine(ctx)
    uvicorn.run(create_app(engine), host=host, port=port)


if __name__ == "__main__":
    main()
