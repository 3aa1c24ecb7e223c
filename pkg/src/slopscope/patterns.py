"""Metavariable pattern matching over Python syntax trees.

A pattern is a code-like string in which ``$NAME`` tokens are
metavariables. A metavariable binds one code element at its position; if
the same name appears more than once, every occurrence must match the same
source text. ``$NAME?`` marks an optional metavariable (the pattern still
matches when the element is absent), and ``$$`` stands for a literal ``$``.

A pattern that parses as a single expression is matched against every
expression node of the target tree. A pattern that parses as one or more
statements is matched against contiguous statement windows of that length.
"""

from __future__ import annotations

import ast
import itertools
import re
from dataclasses import dataclass, field

_PLACEHOLDER_PREFIX = "_slopscope_mv_"
_MV_TOKEN = re.compile(r"\$\$|\$([A-Za-z_][A-Za-z0-9_]*)(\??)")

# AST fields that never take part in structural comparison.
_IGNORED_FIELDS = {"ctx", "type_comment", "type_ignores"}


class PatternError(ValueError):
    """Raised when a pattern cannot be compiled."""


@dataclass(frozen=True)
class PatternMatch:
    start: tuple[int, int]  # (line, col), 1-based
    end: tuple[int, int]  # position immediately after the match
    text: str
    captures: dict[str, str] = field(default_factory=dict, compare=False)


def _segment_pattern(pattern: str) -> list[tuple[str, object]]:
    """Split a pattern into literal chunks and metavariable tokens."""
    segments: list[tuple[str, object]] = []
    pos = 0
    for m in _MV_TOKEN.finditer(pattern):
        if m.start() > pos:
            segments.append(("text", pattern[pos : m.start()]))
        if m.group(0) == "$$":
            segments.append(("text", "$"))
        else:
            segments.append(("mv", (m.group(1), m.group(2) == "?")))
        pos = m.end()
    if pos < len(pattern):
        segments.append(("text", pattern[pos:]))
    return segments


def _render(segments: list[tuple[str, object]], omit: frozenset[str]) -> str:
    """Render pattern text with placeholders, omitting the given optionals.

    When an optional metavariable is omitted, one adjacent comma (before it,
    else after it) is removed with it so argument lists stay parseable.
    """
    out: list[str] = []
    pending_strip_comma = False
    for kind, value in segments:
        if kind == "text":
            text = str(value)
            if pending_strip_comma:
                stripped = text.lstrip()
                if stripped.startswith(","):
                    text = stripped[1:]
                pending_strip_comma = False
            out.append(text)
        else:
            name, _optional = value  # type: ignore[misc]
            if name in omit:
                # Prefer eating a preceding comma; otherwise eat the next one.
                prev = "".join(out)
                trimmed = prev.rstrip()
                if trimmed.endswith(","):
                    out = [trimmed[:-1]]
                else:
                    pending_strip_comma = True
            else:
                out.append(_PLACEHOLDER_PREFIX + str(name))
    return "".join(out)


@dataclass(frozen=True)
class _Variant:
    kind: str  # "expr" or "stmts"
    nodes: tuple[ast.AST, ...]


@dataclass(frozen=True)
class CompiledPattern:
    source: str
    variants: tuple[_Variant, ...]


def compile_pattern(pattern: str) -> CompiledPattern:
    """Compile a metavariable pattern, expanding optional-metavariable variants."""
    segments = _segment_pattern(pattern)
    optional = {name for kind, v in segments if kind == "mv" for name, opt in [v] if opt}

    variants: list[_Variant] = []
    errors: list[str] = []
    for r in range(len(optional) + 1):
        for omit in itertools.combinations(sorted(optional), r):
            text = _render(segments, frozenset(omit))
            try:
                module = ast.parse(text)
            except SyntaxError as exc:
                errors.append(f"{text!r}: {exc.msg}")
                continue
            if not module.body:
                errors.append(f"{text!r}: empty pattern")
                continue
            if len(module.body) == 1 and isinstance(module.body[0], ast.Expr):
                variants.append(_Variant("expr", (module.body[0].value,)))
            else:
                variants.append(_Variant("stmts", tuple(module.body)))

    if not variants:
        raise PatternError("; ".join(errors) or "pattern has no parseable form")
    # The full (nothing omitted) form must itself be valid code.
    full = _render(segments, frozenset())
    try:
        ast.parse(full)
    except SyntaxError as exc:
        raise PatternError(f"{pattern!r} does not parse: {exc.msg}") from exc
    return CompiledPattern(pattern, tuple(variants))


def _placeholder_name(node: ast.AST) -> str | None:
    if isinstance(node, ast.Name) and node.id.startswith(_PLACEHOLDER_PREFIX):
        return node.id[len(_PLACEHOLDER_PREFIX) :]
    return None


def _stmt_placeholder_name(node: ast.AST) -> str | None:
    if isinstance(node, ast.Expr):
        return _placeholder_name(node.value)
    return None


class _Matcher:
    def __init__(self, source_text: str) -> None:
        self.source = source_text
        self.bindings: dict[str, str] = {}

    def bind(self, name: str, text: str | None) -> bool:
        if text is None:
            return False
        if name in self.bindings:
            return self.bindings[name] == text
        self.bindings[name] = text
        return True

    def node_text(self, node: ast.AST) -> str | None:
        try:
            return ast.get_source_segment(self.source, node)
        except (ValueError, TypeError):
            return None

    def match_node(self, pat: ast.AST, src: ast.AST, stmt_position: bool = False) -> bool:
        name = _placeholder_name(pat)
        if name is not None:
            if not isinstance(src, ast.expr):
                return False
            return self.bind(name, self.node_text(src))
        if stmt_position:
            stmt_name = _stmt_placeholder_name(pat)
            if stmt_name is not None and isinstance(src, ast.stmt):
                return self.bind(stmt_name, self.node_text(src))
        if type(pat) is not type(src):
            return False
        for fname in pat._fields:
            if fname in _IGNORED_FIELDS:
                continue
            if not self.match_value(getattr(pat, fname, None), getattr(src, fname, None)):
                return False
        return True

    def match_value(self, pv: object, sv: object) -> bool:
        if isinstance(pv, ast.AST):
            return isinstance(sv, ast.AST) and self.match_node(pv, sv, stmt_position=isinstance(pv, ast.stmt))
        if isinstance(pv, list):
            if not isinstance(sv, list) or len(pv) != len(sv):
                return False
            return all(self.match_value(p, s) for p, s in zip(pv, sv))
        if isinstance(pv, str) and pv.startswith(_PLACEHOLDER_PREFIX):
            return isinstance(sv, str) and self.bind(pv[len(_PLACEHOLDER_PREFIX) :], sv)
        return type(pv) is type(sv) and pv == sv


def _position(node: ast.AST) -> tuple[tuple[int, int], tuple[int, int]]:
    return (
        (node.lineno, node.col_offset + 1),
        (node.end_lineno or node.lineno, (node.end_col_offset or node.col_offset) + 1),
    )


def _statement_lists(tree: ast.AST):
    for node in ast.walk(tree):
        for fname in node._fields:
            value = getattr(node, fname, None)
            if isinstance(value, list) and value and all(isinstance(v, ast.stmt) for v in value):
                yield value


def find_matches(compiled: CompiledPattern, tree: ast.AST, source_text: str) -> list[PatternMatch]:
    """All matches of a compiled pattern in one parsed file."""
    matches: dict[tuple[tuple[int, int], tuple[int, int]], PatternMatch] = {}
    for variant in compiled.variants:
        if variant.kind == "expr":
            pat = variant.nodes[0]
            for node in ast.walk(tree):
                if not isinstance(node, ast.expr):
                    continue
                m = _Matcher(source_text)
                if m.match_node(pat, node):
                    start, end = _position(node)
                    matches.setdefault(
                        (start, end),
                        PatternMatch(start, end, m.node_text(node) or "", dict(m.bindings)),
                    )
        else:
            width = len(variant.nodes)
            for stmts in _statement_lists(tree):
                for i in range(len(stmts) - width + 1):
                    window = stmts[i : i + width]
                    m = _Matcher(source_text)
                    if all(
                        m.match_node(p, s, stmt_position=True)
                        for p, s in zip(variant.nodes, window)
                    ):
                        start, _ = _position(window[0])
                        _, end = _position(window[-1])
                        text = "\n".join(filter(None, (m.node_text(s) for s in window)))
                        matches.setdefault((start, end), PatternMatch(start, end, text, dict(m.bindings)))
    return sorted(matches.values(), key=lambda pm: (pm.start, pm.end))
