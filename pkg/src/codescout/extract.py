"""Parse Python sources into function and class snippets.

The extractor produces two pools per repository: every function definition
(top-level functions and methods) and every class definition. Class
snippets keep their full body so containment checks against a method's
span remain possible. Nested functions (def inside def) are not extracted
separately; they stay part of their parent's text.
"""

import ast
import hashlib
import io
import logging
import tokenize
from dataclasses import dataclass, field

from .errors import ParseFailure
from .ingest import SourceFile

logger = logging.getLogger(__name__)

_FUNCTION_NODES = (ast.FunctionDef, ast.AsyncFunctionDef)
# Compound statements whose bodies still count as "not inside a function";
# functions defined under `if`/`try` guards remain individually retrievable.
_TRANSPARENT_NODES = (ast.If, ast.Try, ast.With, ast.AsyncWith, ast.For, ast.AsyncFor, ast.While)


@dataclass(frozen=True)
class Snippet:
    id: str
    repo_id: str
    kind: str  # "function" | "class"
    qualified_name: str
    relative_path: str
    span: tuple[int, int]  # inclusive, 1-based
    raw_text: str
    stripped_text: str
    enclosing_class: str | None = None  # id of the containing class snippet


@dataclass
class SnippetIndex:
    repo_id: str
    functions: list[Snippet] = field(default_factory=list)
    classes: list[Snippet] = field(default_factory=list)
    skipped_files: list[str] = field(default_factory=list)

    def all_snippets(self) -> list[Snippet]:
        return self.functions + self.classes

    def by_id(self) -> dict[str, Snippet]:
        return {s.id: s for s in self.all_snippets()}


def _module_name(relative_path: str) -> str:
    parts = relative_path[: -len(".py")].split("/")
    if parts and parts[-1] == "__init__":
        parts = parts[:-1]
    return ".".join(parts)


def _snippet_id(relative_path: str, span: tuple[int, int], raw_text: str) -> str:
    payload = f"{relative_path}:{span[0]}:{span[1]}\n{raw_text}"
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def _def_start_line(node) -> int:
    decorators = getattr(node, "decorator_list", [])
    return min([d.lineno for d in decorators] + [node.lineno])


def _slice_lines(lines: list[str], start: int, end: int) -> str:
    return "\n".join(lines[start - 1 : end])


def _dedent_block(text: str, n: int) -> str:
    """Remove up to n leading whitespace chars per line.

    Lines with less leading whitespace (interiors of multi-line strings)
    are left alone so the block still parses.
    """
    if n == 0:
        return text
    out = []
    for line in text.split("\n"):
        if not line.strip():
            out.append("")
        elif line[:n].isspace() and len(line) >= n:
            out.append(line[n:])
        else:
            out.append(line)
    return "\n".join(out)


@dataclass(frozen=True)
class _RawDef:
    kind: str
    local_name: str
    span: tuple[int, int]
    col_offset: int
    enclosing_index: int | None  # position of the containing class in the class list


def _collect_defs(tree: ast.Module) -> list[_RawDef]:
    """Functions and classes in source order; never descends into functions."""
    found: list[_RawDef] = []
    class_positions: dict[int, int] = {}  # id(ast node) -> index among classes
    n_classes = 0

    def visit(stmts, prefix: str, enclosing: int | None):
        nonlocal n_classes
        for node in stmts:
            if isinstance(node, _FUNCTION_NODES):
                name = f"{prefix}.{node.name}" if prefix else node.name
                found.append(
                    _RawDef("function", name, (_def_start_line(node), node.end_lineno),
                            node.col_offset, enclosing)
                )
            elif isinstance(node, ast.ClassDef):
                name = f"{prefix}.{node.name}" if prefix else node.name
                found.append(
                    _RawDef("class", name, (_def_start_line(node), node.end_lineno),
                            node.col_offset, enclosing)
                )
                class_positions[id(node)] = n_classes
                this_class = n_classes
                n_classes += 1
                visit(node.body, name, this_class)
            elif isinstance(node, _TRANSPARENT_NODES):
                visit(getattr(node, "body", []), prefix, enclosing)
                for handler in getattr(node, "handlers", []):
                    visit(handler.body, prefix, enclosing)
                visit(getattr(node, "orelse", []), prefix, enclosing)
                visit(getattr(node, "finalbody", []), prefix, enclosing)

    visit(tree.body, "", None)
    return found


def extract_snippets(file: SourceFile) -> tuple[list[Snippet], list[Snippet]]:
    """One snippet per function (incl. methods) and per class in the file.

    Raises ParseFailure when the file does not parse; callers building a
    whole-repo index skip such files and continue.
    """
    try:
        tree = ast.parse(file.content)
    except (SyntaxError, ValueError) as exc:
        raise ParseFailure(f"{file.relative_path}: {exc}") from exc

    stripped_source = strip_comments(file.content)
    stripped_tree = ast.parse(stripped_source)

    raw_defs = _collect_defs(tree)
    stripped_defs = _collect_defs(stripped_tree)
    if len(raw_defs) != len(stripped_defs):  # pragma: no cover - stripping keeps defs
        raise ParseFailure(f"{file.relative_path}: definition count changed while stripping")

    raw_lines = file.content.split("\n")
    stripped_lines = stripped_source.split("\n")
    module = _module_name(file.relative_path)

    functions: list[Snippet] = []
    classes: list[Snippet] = []
    class_ids: list[str] = []
    for raw_def, stripped_def in zip(raw_defs, stripped_defs):
        raw_text = _slice_lines(raw_lines, *raw_def.span)
        stripped_text = _dedent_block(
            _slice_lines(stripped_lines, *stripped_def.span), stripped_def.col_offset
        )
        qualified = f"{module}.{raw_def.local_name}" if module else raw_def.local_name
        snippet = Snippet(
            id=_snippet_id(file.relative_path, raw_def.span, raw_text),
            repo_id=file.repo_id,
            kind=raw_def.kind,
            qualified_name=qualified,
            relative_path=file.relative_path,
            span=raw_def.span,
            raw_text=raw_text,
            stripped_text=stripped_text,
            enclosing_class=None if raw_def.enclosing_index is None
            else class_ids[raw_def.enclosing_index],
        )
        if raw_def.kind == "class":
            classes.append(snippet)
            class_ids.append(snippet.id)
        else:
            functions.append(snippet)
    return functions, classes


def build_index(repo_id: str, sources: list[SourceFile]) -> SnippetIndex:
    """Extract every source file into one index; parse failures skip the file."""
    index = SnippetIndex(repo_id=repo_id)
    for source in sources:
        try:
            functions, classes = extract_snippets(source)
        except ParseFailure as exc:
            logger.warning("skipping unparseable file: %s", exc)
            index.skipped_files.append(source.relative_path)
            continue
        index.functions.extend(functions)
        index.classes.extend(classes)
    index.functions.sort(key=lambda s: (s.relative_path, s.span[0]))
    index.classes.sort(key=lambda s: (s.relative_path, s.span[0]))
    return index


def _byte_to_char_col(line: str, byte_col: int) -> int:
    return len(line.encode("utf-8")[:byte_col].decode("utf-8", errors="ignore"))


def _docstring_exprs(tree: ast.Module):
    """Docstring statements: first bare-string expression of a definition body."""
    for node in ast.walk(tree):
        if not isinstance(node, (ast.Module, *_FUNCTION_NODES, ast.ClassDef)):
            continue
        body = node.body
        if not body or not isinstance(body[0], ast.Expr):
            continue
        value = body[0].value
        if not (isinstance(value, ast.Constant) and isinstance(value.value, str)):
            continue
        if len(body) > 1 and body[1].lineno == body[0].end_lineno:
            continue  # shares a line with the next statement; leave it alone
        needs_pass = len(body) == 1 and not isinstance(node, ast.Module)
        yield body[0], needs_pass


def strip_comments(code: str) -> str:
    """Remove comment tokens and docstring expressions; output still parses.

    All other tokens are preserved in order. A definition whose body was
    only a docstring gets a `pass` so the block stays valid. Lines left
    whitespace-only by a removal are dropped, and edited lines lose
    trailing whitespace; untouched lines are byte-identical.
    """
    try:
        ast.parse(code)
    except (SyntaxError, ValueError) as exc:
        raise ParseFailure(f"cannot parse: {exc}") from exc

    lines = code.split("\n")
    edited: set[int] = set()

    reader = io.StringIO(code).readline
    for token in tokenize.generate_tokens(reader):
        if token.type == tokenize.COMMENT:
            row, col = token.start
            lines[row - 1] = lines[row - 1][:col]
            edited.add(row)

    text = "\n".join(lines)
    tree = ast.parse(text)
    lines = text.split("\n")
    for expr, needs_pass in _docstring_exprs(tree):
        a, b = expr.lineno, expr.end_lineno
        col_a = _byte_to_char_col(lines[a - 1], expr.col_offset)
        col_b = _byte_to_char_col(lines[b - 1], expr.end_col_offset)
        replacement = "pass" if needs_pass else ""
        if a == b:
            lines[a - 1] = lines[a - 1][:col_a] + replacement + lines[a - 1][col_b:]
        else:
            lines[a - 1] = lines[a - 1][:col_a] + replacement
            lines[b - 1] = lines[b - 1][col_b:]
            for row in range(a + 1, b):
                lines[row - 1] = ""
        edited.update(range(a, b + 1))

    out = []
    for row, line in enumerate(lines, start=1):
        if row in edited:
            if not line.strip():
                continue
            out.append(line.rstrip())
        else:
            out.append(line)
    return "\n".join(out)


@dataclass(frozen=True)
class DecomposedCode:
    components: list[str]
    fallback: bool  # True when the text did not yield individual functions


def decompose_generated_code(code: str) -> DecomposedCode:
    """Split generated code into its function definitions.

    Unparseable text, or text without any function definition, falls back
    to a single component equal to the whole text.
    """
    try:
        tree = ast.parse(code)
    except (SyntaxError, ValueError):
        return DecomposedCode(components=[code], fallback=True)
    lines = code.split("\n")
    components = [
        _dedent_block(_slice_lines(lines, *d.span), d.col_offset)
        for d in _collect_defs(tree)
        if d.kind == "function"
    ]
    if not components:
        return DecomposedCode(components=[code], fallback=True)
    return DecomposedCode(components=components, fallback=False)
