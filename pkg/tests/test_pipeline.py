import json

import pytest

from codescout import (
    EmptyInput,
    OfflineEmbeddingProvider,
    ProviderUnavailable,
    ScriptedChatProvider,
    SearchEngine,
    SearchOptions,
    UnavailableChatProvider,
)

from oracles import cosine, offline_vector


def test_index_miniutil_counts_and_store(engine, miniutil):
    indexed = engine.index_repo(str(miniutil))
    assert len(indexed.index.functions) == 4
    assert len(indexed.index.classes) == 1
    repo_dir = engine.repo_dir(indexed.repository.id)
    assert (repo_dir / "meta.json").exists()
    records = [
        json.loads(line)
        for line in (repo_dir / "snippets.jsonl").read_text().splitlines()
    ]
    assert len(records) == 5
    assert {r["kind"] for r in records} == {"function", "class"}
    for record in records:
        assert {"id", "kind", "qualified_name", "relative_path", "span",
                "raw_sha256", "stripped_sha256"} <= set(record)


def test_reindex_served_from_cache(engine, miniutil):
    engine.index_repo(str(miniutil))
    assert engine.last_cache_misses == 5
    engine.index_repo(str(miniutil))
    assert engine.last_cache_hits == 5
    assert engine.last_cache_misses == 0


def test_load_index_round_trip(engine, miniutil):
    indexed = engine.index_repo(str(miniutil))
    loaded = engine.load_index(indexed.repository.id)
    assert loaded is not None
    assert [s.id for s in loaded.index.all_snippets()] == [
        s.id for s in indexed.index.all_snippets()
    ]
    assert loaded.index.functions == indexed.index.functions
    assert [sid for sid, _ in loaded.embedded.functions] == [
        sid for sid, _ in indexed.embedded.functions
    ]


def test_ensure_indexed_accepts_id_or_source(engine, miniutil):
    indexed = engine.index_repo(str(miniutil))
    by_id = engine.ensure_indexed(indexed.repository.id)
    assert by_id.repository.id == indexed.repository.id
    by_source = engine.ensure_indexed(str(miniutil))
    assert by_source.repository.id == indexed.repository.id


def test_search_planted_rank_one(engine, planted_dir, planted_queries):
    indexed = engine.index_repo(str(planted_dir))
    for planted in planted_queries[:4]:
        results = engine.search(indexed, planted["query"])
        assert results, planted["query"]
        top = results[0]
        assert top.qualified_name.endswith(planted["identifier"]), planted["query"]
        assert top.rank == 1
        assert top.streams  # provenance present
        assert [r.rank for r in results] == list(range(1, len(results) + 1))


def test_search_is_deterministic(engine, planted_dir, planted_queries):
    indexed = engine.index_repo(str(planted_dir))
    query = planted_queries[0]["query"]
    assert engine.search(indexed, query) == engine.search(indexed, query)


def test_search_final_set_size_small(engine, planted_dir, planted_queries):
    indexed = engine.index_repo(str(planted_dir))
    results = engine.search(indexed, planted_queries[0]["query"])
    # one generated component in fallback mode: bound is 9 + 1
    assert len(results) <= 10


def test_search_empty_query_rejected(engine, planted_dir):
    indexed = engine.index_repo(str(planted_dir))
    with pytest.raises(EmptyInput):
        engine.search(indexed, "   ")


def test_search_top_truncation(engine, planted_dir, planted_queries):
    indexed = engine.index_repo(str(planted_dir))
    results = engine.search(indexed, planted_queries[0]["query"], SearchOptions(top=3))
    assert len(results) == 3
    assert [r.rank for r in results] == [1, 2, 3]


def test_degradation_all_live_providers_unreachable(tmp_path, planted_dir, planted_queries):
    class BrokenRetrieval:
        def search(self, query, limit):
            raise ProviderUnavailable("search is down")

    engine = SearchEngine(
        data_dir=tmp_path / "data",
        provider=OfflineEmbeddingProvider(),
        chat=UnavailableChatProvider(),
        retrieval=BrokenRetrieval(),
    )
    indexed = engine.index_repo(str(planted_dir))
    options = SearchOptions(mode="live", rerank=True)
    results = engine.search(indexed, planted_queries[0]["query"], options)
    assert results
    assert results[0].qualified_name.endswith(planted_queries[0]["identifier"])


def test_rerank_option_wires_through(tmp_path, planted_dir, planted_queries):
    # Passthrough skips the augment call; each search consumes one generation
    # reply and one verdict, and the reranked search consumes one more. The
    # "???" drafts embed to nothing, which pins the final set to stream 1.
    chat = ScriptedChatProvider(["???", "ACCEPT", "???", "ACCEPT", "2\n1"])
    engine = SearchEngine(
        data_dir=tmp_path / "data", provider=OfflineEmbeddingProvider(), chat=chat
    )
    indexed = engine.index_repo(str(planted_dir))
    query = planted_queries[0]["query"]
    baseline = engine.search(indexed, query, SearchOptions(mode="passthrough"))
    chat_engine_results = engine.search(
        indexed, query, SearchOptions(mode="passthrough", rerank=True)
    )
    assert [r.snippet_id for r in chat_engine_results[:2]] == [
        baseline[1].snippet_id,
        baseline[0].snippet_id,
    ]
    assert sorted(r.snippet_id for r in chat_engine_results) == sorted(
        r.snippet_id for r in baseline
    )


def test_stream1_flag_selects_query_vector(tmp_path):
    src = tmp_path / "repo"
    src.mkdir()
    (src / "only.py").write_text("def alpha_target():\n    return alpha_target\n")

    def engine_with_script():
        # augment reply, generated "code", quality verdict
        chat = ScriptedChatProvider(["unrelated noise words", "zulu yankee xray", "ACCEPT"])
        return SearchEngine(
            data_dir=tmp_path / f"data-{id(chat)}",
            provider=OfflineEmbeddingProvider(),
            chat=chat,
        )

    raw_q = "alpha target"
    augmented_q = raw_q + "\n" + "unrelated noise words"
    stripped = "def alpha_target():\n    return alpha_target"
    sim_raw = cosine(offline_vector(raw_q), offline_vector(stripped))
    sim_aug = cosine(offline_vector(augmented_q), offline_vector(stripped))
    assert sim_raw > sim_aug  # noise dilutes the augmented vector

    engine = engine_with_script()
    indexed = engine.index_repo(str(src))
    result_aug = engine.search(indexed, raw_q, SearchOptions(mode="live"))[0]
    assert result_aug.best_similarity == pytest.approx(sim_aug, abs=1e-9)

    engine = engine_with_script()
    indexed = engine.index_repo(str(src))
    result_raw = engine.search(
        indexed, raw_q, SearchOptions(mode="live", stream1="raw")
    )[0]
    assert result_raw.best_similarity == pytest.approx(sim_raw, abs=1e-9)


def test_passthrough_pipeline_pure_function_of_inputs(tmp_path, planted_dir, planted_queries):
    query = planted_queries[1]["query"]
    runs = []
    for i in range(2):
        engine = SearchEngine(
            data_dir=tmp_path / f"data{i}", provider=OfflineEmbeddingProvider()
        )
        indexed = engine.index_repo(str(planted_dir))
        runs.append(
            [(r.snippet_id, round(r.best_similarity, 12)) for r in engine.search(indexed, query)]
        )
    assert runs[0] == runs[1]
