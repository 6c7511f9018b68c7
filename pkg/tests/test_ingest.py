import os
import subprocess

import pytest

from codescout import SizeLimitExceeded, SourceUnavailable, acquire_repo, list_python_sources


def tree_stat_oracle(root):
    """Independent walk: (file count, total bytes) excluding .git."""
    count = 0
    total = 0
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames[:] = [d for d in dirnames if d != ".git"]
        for name in filenames:
            path = os.path.join(dirpath, name)
            count += 1
            total += os.path.getsize(path)
    return count, total


def test_acquire_miniutil_counts(miniutil):
    repo = acquire_repo(str(miniutil), limit=50 * 1024 * 1024)
    assert repo.file_count == 4
    assert repo.total_bytes == 9216
    assert tree_stat_oracle(miniutil) == (repo.file_count, repo.total_bytes)
    assert repo.root.is_dir()


def test_acquire_zero_limit_rejects(miniutil):
    with pytest.raises(SizeLimitExceeded):
        acquire_repo(str(miniutil), limit=0)


def test_size_limit_boundary_is_exact(miniutil):
    # rejects iff total_bytes > limit
    assert acquire_repo(str(miniutil), limit=9216).total_bytes == 9216
    with pytest.raises(SizeLimitExceeded):
        acquire_repo(str(miniutil), limit=9215)


def test_acquire_missing_path():
    with pytest.raises(SourceUnavailable):
        acquire_repo("/nonexistent/definitely/not/here")


def test_repo_id_stable_for_unchanged_content(miniutil):
    first = acquire_repo(str(miniutil), limit=10**8)
    second = acquire_repo(str(miniutil), limit=10**8)
    assert first.id == second.id


def test_repo_id_changes_with_content(tmp_path):
    (tmp_path / "a.py").write_text("x = 1\n")
    before = acquire_repo(str(tmp_path), limit=10**8)
    (tmp_path / "a.py").write_text("x = 2\n")
    after = acquire_repo(str(tmp_path), limit=10**8)
    assert before.id != after.id


def test_list_python_sources_filters_and_orders(miniutil):
    repo = acquire_repo(str(miniutil), limit=10**8)
    sources = list_python_sources(repo)
    assert [s.relative_path for s in sources] == ["a.py", "b.py", "pkg/c.py"]
    for s in sources:
        assert (repo.root / s.relative_path).exists()
        assert s.line_count >= 1


def test_list_python_sources_deterministic(miniutil):
    repo = acquire_repo(str(miniutil), limit=10**8)
    assert list_python_sources(repo) == list_python_sources(repo)


def test_empty_repo(tmp_path):
    repo = acquire_repo(str(tmp_path), limit=10**8)
    assert repo.file_count == 0
    assert list_python_sources(repo) == []


def test_repo_with_only_non_python_files(tmp_path):
    (tmp_path / "notes.txt").write_text("hello")
    repo = acquire_repo(str(tmp_path), limit=10**8)
    assert list_python_sources(repo) == []


def test_non_utf8_file_skipped_with_diagnostic(tmp_path, caplog):
    (tmp_path / "good.py").write_text("x = 1\n")
    (tmp_path / "bad.py").write_bytes(b"\xff\xfe\x00broken")
    repo = acquire_repo(str(tmp_path), limit=10**8)
    with caplog.at_level("WARNING"):
        sources = list_python_sources(repo)
    assert [s.relative_path for s in sources] == ["good.py"]
    assert any("bad.py" in rec.message for rec in caplog.records)


def test_acquire_git_url_clone(miniutil, tmp_path):
    upstream = tmp_path / "upstream"
    subprocess.run(["git", "init", "-q", str(upstream)], check=True)
    for rel in ["a.py", "b.py"]:
        (upstream / rel).write_text((miniutil / rel).read_text())
    subprocess.run(["git", "-C", str(upstream), "add", "-A"], check=True)
    subprocess.run(
        ["git", "-C", str(upstream), "-c", "user.email=t@t", "-c", "user.name=t",
         "commit", "-qm", "init"],
        check=True,
    )
    url = f"file://{upstream}"
    repo = acquire_repo(url, limit=10**8, cache_dir=tmp_path / "cache")
    assert repo.source == url
    listed = list_python_sources(repo)
    assert [s.relative_path for s in listed] == ["a.py", "b.py"]
    again = acquire_repo(url, limit=10**8, cache_dir=tmp_path / "cache")
    assert again.id == repo.id


def test_acquire_bad_git_url(tmp_path):
    with pytest.raises(SourceUnavailable):
        acquire_repo("file:///nonexistent/repo.git", limit=10**8, cache_dir=tmp_path)
