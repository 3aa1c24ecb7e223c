"""Quality rules: YAML rule files, pattern/regex matching, flagged lines."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .patterns import CompiledPattern, PatternError, compile_pattern, find_matches

_REGEX_FLAGS = {"i": re.IGNORECASE, "m": re.MULTILINE, "s": re.DOTALL}


class RuleError(Exception):
    """Raised when a rule file is malformed; message lists every bad rule."""


@dataclass(frozen=True)
class QualityRule:
    id: str
    kind: str  # "pattern" | "regex"
    pattern: str
    languages: tuple[str, ...] = ("python",)
    category: str = ""
    message: str = ""
    regex_flags: tuple[str, ...] = ()

    def applies_to(self, language: str) -> bool:
        return language in self.languages


@dataclass(frozen=True)
class RuleMatch:
    rule_id: str
    file: str
    start: tuple[int, int]  # (line, col), 1-based
    end: tuple[int, int]  # position immediately after the match
    lines: tuple[int, ...]  # every line the matched span covers
    captures: dict[str, str] = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[QualityRule, ...]
    _compiled: dict[str, object] = field(default_factory=dict, compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def get(self, rule_id: str) -> QualityRule | None:
        for rule in self.rules:
            if rule.id == rule_id:
                return rule
        return None

    def compiled(self, rule: QualityRule):
        return self._compiled[rule.id]

    def subset(self, rule_ids: set[str]) -> "RuleSet":
        kept = tuple(r for r in self.rules if r.id in rule_ids)
        return RuleSet(kept, {r.id: self._compiled[r.id] for r in kept})


def _compile_rule(rule: QualityRule):
    if rule.kind == "pattern":
        return compile_pattern(rule.pattern)
    flags = 0
    for flag in rule.regex_flags:
        flags |= _REGEX_FLAGS[flag]
    return re.compile(rule.pattern, flags)


def build_ruleset(rules: list[QualityRule]) -> RuleSet:
    """Validate and compile a list of rules, reporting every failure at once."""
    errors: list[str] = []
    seen: set[str] = set()
    compiled: dict[str, object] = {}
    for rule in rules:
        if not rule.id:
            errors.append("rule with empty id")
            continue
        if rule.id in seen:
            errors.append(f"{rule.id}: duplicate rule id")
            continue
        seen.add(rule.id)
        if rule.kind not in ("pattern", "regex"):
            errors.append(f"{rule.id}: unknown kind {rule.kind!r}")
            continue
        if not rule.pattern:
            errors.append(f"{rule.id}: empty pattern")
            continue
        if any(f not in _REGEX_FLAGS for f in rule.regex_flags):
            errors.append(f"{rule.id}: regex_flags must be a subset of i, m, s")
            continue
        try:
            compiled[rule.id] = _compile_rule(rule)
        except (PatternError, re.error) as exc:
            errors.append(f"{rule.id}: {exc}")
    if errors:
        raise RuleError("invalid rules:\n  " + "\n  ".join(errors))
    return RuleSet(tuple(rules), compiled)


def load_rules(path: str | Path) -> RuleSet:
    """Load a YAML rule file (a list of rule mappings)."""
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    if raw is None:
        raw = []
    if not isinstance(raw, list):
        raise RuleError(f"{path}: rule file must contain a list of rules")
    rules: list[QualityRule] = []
    errors: list[str] = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict):
            errors.append(f"entry {i}: not a mapping")
            continue
        unknown = set(entry) - {"id", "kind", "pattern", "languages", "category", "message", "regex_flags"}
        if unknown:
            errors.append(f"entry {i} ({entry.get('id', '?')}): unknown keys {sorted(unknown)}")
            continue
        rules.append(
            QualityRule(
                id=str(entry.get("id", "")),
                kind=str(entry.get("kind", "pattern")),
                pattern=str(entry.get("pattern", "")),
                languages=tuple(entry.get("languages", ["python"])),
                category=str(entry.get("category", "")),
                message=str(entry.get("message", "")),
                regex_flags=tuple(entry.get("regex_flags", [])),
            )
        )
    if errors:
        raise RuleError(f"{path}: invalid rules:\n  " + "\n  ".join(errors))
    return build_ruleset(rules)


def load_starter_rules() -> RuleSet:
    """The bundled starter rule set."""
    ref = resources.files("slopscope").joinpath("data/rules/starter.yaml")
    with resources.as_file(ref) as path:
        return load_rules(path)


def _offset_to_pos(line_starts: list[int], offset: int) -> tuple[int, int]:
    import bisect

    line = bisect.bisect_right(line_starts, offset)
    return line, offset - line_starts[line - 1] + 1


def _regex_matches(rule: QualityRule, regex: re.Pattern, path: str, text: str) -> list[RuleMatch]:
    line_starts = [0]
    for i, ch in enumerate(text):
        if ch == "\n":
            line_starts.append(i + 1)
    out: list[RuleMatch] = []
    for m in regex.finditer(text):
        if m.start() == m.end():
            continue
        start = _offset_to_pos(line_starts, m.start())
        end = _offset_to_pos(line_starts, m.end())
        last_line = _offset_to_pos(line_starts, m.end() - 1)[0]
        out.append(
            RuleMatch(
                rule_id=rule.id,
                file=path,
                start=start,
                end=end,
                lines=tuple(range(start[0], last_line + 1)),
            )
        )
    return out


def match_rules(path: str, text: str, tree, language: str, rules: RuleSet) -> list[RuleMatch]:
    """Every match of every applicable rule in one file, canonically ordered."""
    out: list[RuleMatch] = []
    for rule in rules:
        if not rule.applies_to(language):
            continue
        compiled = rules.compiled(rule)
        if rule.kind == "regex":
            out.extend(_regex_matches(rule, compiled, path, text))
        elif tree is not None:
            assert isinstance(compiled, CompiledPattern)
            for pm in find_matches(compiled, tree, text):
                out.append(
                    RuleMatch(
                        rule_id=rule.id,
                        file=path,
                        start=pm.start,
                        end=pm.end,
                        lines=tuple(range(pm.start[0], pm.end[0] + 1)),
                        captures=pm.captures,
                    )
                )
    out.sort(key=lambda m: (m.file, m.start, m.end, m.rule_id))
    return out
