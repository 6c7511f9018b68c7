"""Repository acquisition and Python source enumeration."""

import hashlib
import logging
import shutil
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .errors import SizeLimitExceeded, SourceUnavailable

logger = logging.getLogger(__name__)

DEFAULT_SIZE_LIMIT = 200 * 1024 * 1024  # bytes; configurable per call

_GIT_URL_PREFIXES = ("http://", "https://", "git://", "ssh://", "git@", "file://")


@dataclass(frozen=True)
class Repository:
    """An acquired working copy, immutable after acquisition."""

    id: str
    source: str
    root: Path
    file_count: int
    total_bytes: int


@dataclass(frozen=True)
class SourceFile:
    repo_id: str
    relative_path: str
    content: str
    line_count: int


def is_git_url(source: str) -> bool:
    return source.startswith(_GIT_URL_PREFIXES) or source.endswith(".git")


def _iter_regular_files(root: Path):
    """Yield every regular file under root, skipping .git metadata."""
    for path in sorted(root.rglob("*")):
        if ".git" in path.relative_to(root).parts:
            continue
        if path.is_file() and not path.is_symlink():
            yield path


def _tree_stats(root: Path) -> tuple[str, int, int]:
    """Content hash, file count and total byte size of a working tree."""
    digest = hashlib.sha256()
    file_count = 0
    total_bytes = 0
    for path in _iter_regular_files(root):
        rel = path.relative_to(root).as_posix()
        data = path.read_bytes()
        digest.update(rel.encode("utf-8"))
        digest.update(b"\0")
        digest.update(hashlib.sha256(data).digest())
        file_count += 1
        total_bytes += len(data)
    return digest.hexdigest(), file_count, total_bytes


def _repo_id(source: str, tree_hash: str) -> str:
    return hashlib.sha256(f"{source}\n{tree_hash}".encode("utf-8")).hexdigest()[:16]


def _clone(url: str, dest: Path) -> None:
    cmd = ["git", "clone", "--depth", "1", "--quiet", url, str(dest)]
    try:
        proc = subprocess.run(cmd, capture_output=True, text=True, timeout=600)
    except (OSError, subprocess.TimeoutExpired) as exc:
        raise SourceUnavailable(f"git clone failed for {url}: {exc}") from exc
    if proc.returncode != 0:
        raise SourceUnavailable(
            f"git clone failed for {url}: {proc.stderr.strip() or proc.stdout.strip()}"
        )


def acquire_repo(
    source: str,
    limit: int = DEFAULT_SIZE_LIMIT,
    cache_dir: str | Path | None = None,
) -> Repository:
    """Materialize a working copy of `source` and measure it.

    `source` is a local directory or a git URL. Local directories are used
    in place; URLs are cloned (default branch only) into `cache_dir`.
    Re-acquiring unchanged content yields the same repository id.

    Raises SourceUnavailable for unreadable sources and SizeLimitExceeded
    when the tree is larger than `limit` bytes.
    """
    source = str(source)
    if is_git_url(source):
        if cache_dir is None:
            cache_dir = Path(tempfile.gettempdir()) / "codescout-repos"
        repos_dir = Path(cache_dir) / "repos"
        repos_dir.mkdir(parents=True, exist_ok=True)
        staging = Path(tempfile.mkdtemp(prefix="clone-", dir=repos_dir))
        work = staging / "worktree"
        try:
            _clone(source, work)
            tree_hash, file_count, total_bytes = _tree_stats(work)
            if total_bytes > limit:
                raise SizeLimitExceeded(total_bytes, limit)
            repo_id = _repo_id(source, tree_hash)
            final = repos_dir / repo_id
            if final.exists():
                root = final  # unchanged content already cached
            else:
                staging_final = repos_dir / f"{repo_id}.tmp"
                if staging_final.exists():
                    shutil.rmtree(staging_final)
                work.rename(staging_final)
                staging_final.rename(final)
                root = final
        finally:
            shutil.rmtree(staging, ignore_errors=True)
        return Repository(
            id=repo_id, source=source, root=root,
            file_count=file_count, total_bytes=total_bytes,
        )

    root = Path(source).expanduser().resolve()
    if not root.is_dir():
        raise SourceUnavailable(f"not a readable directory or git URL: {source}")
    tree_hash, file_count, total_bytes = _tree_stats(root)
    if total_bytes > limit:
        raise SizeLimitExceeded(total_bytes, limit)
    return Repository(
        id=_repo_id(source, tree_hash), source=source, root=root,
        file_count=file_count, total_bytes=total_bytes,
    )


def list_python_sources(repo: Repository) -> list[SourceFile]:
    """All .py files under the working copy, lexicographic by relative path.

    Files that fail to decode as UTF-8 are skipped with a diagnostic;
    the listing is a pure function of the working copy.
    """
    sources = []
    for path in _iter_regular_files(repo.root):
        rel = path.relative_to(repo.root).as_posix()
        if not rel.endswith(".py"):
            continue
        try:
            content = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            logger.warning("skipping unreadable source %s: %s", rel, exc)
            continue
        sources.append(
            SourceFile(
                repo_id=repo.id,
                relative_path=rel,
                content=content,
                line_count=max(1, len(content.splitlines())),
            )
        )
    sources.sort(key=lambda s: s.relative_path)
    return sources
