"""Verbosity: deduplicated union of rule-flagged lines and clone lines over LOC."""

from __future__ import annotations

from dataclasses import dataclass

from .clones import CloneRegion, clone_lines
from .model import ConsistencyError
from .rules import RuleMatch


@dataclass(frozen=True)
class VerbosityBreakdown:
    score: float
    flagged_lines: int
    clone_lines: int
    union_lines: int
    loc: int
    violation_density: float
    clone_ratio: float


def verbosity_score(
    file_loc: dict[str, int],
    matches: list[RuleMatch],
    clones: list[CloneRegion],
    file_line_count: dict[str, int] | None = None,
    source_lines: dict[str, set[int]] | None = None,
) -> VerbosityBreakdown:
    """Union score: |flagged lines ∪ clone lines| / total LOC.

    A line hit by several rules and a clone still counts once. When
    ``source_lines`` is given (the per-file sets of non-blank, non-comment
    lines), flagged and clone lines are restricted to it so blank lines
    inside multi-line matches cannot push the score past 1.
    """
    flagged: set[tuple[str, int]] = set()
    for m in matches:
        if m.file not in file_loc:
            raise ConsistencyError(f"match in unknown file {m.file}")
        flagged.update((m.file, line) for line in m.lines)
    cloned = clone_lines(clones)
    for region in clones:
        if region.file not in file_loc:
            raise ConsistencyError(f"clone region in unknown file {region.file}")

    if file_line_count is not None:
        for path, line in flagged | cloned:
            if line < 1 or line > file_line_count.get(path, 0):
                raise ConsistencyError(f"{path}:{line} outside file bounds")

    if source_lines is not None:
        flagged = {(p, ln) for p, ln in flagged if ln in source_lines.get(p, ())}
        cloned = {(p, ln) for p, ln in cloned if ln in source_lines.get(p, ())}

    union = flagged | cloned
    loc = sum(file_loc.values())
    return VerbosityBreakdown(
        score=len(union) / loc if loc > 0 else 0.0,
        flagged_lines=len(flagged),
        clone_lines=len(cloned),
        union_lines=len(union),
        loc=loc,
        violation_density=len(flagged) / loc if loc > 0 else 0.0,
        clone_ratio=len(cloned) / loc if loc > 0 else 0.0,
    )
