"""Report envelopes and bit-exact serialization (canonical JSON, CSV)."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from datetime import datetime, timezone

from . import __version__
from .clones import CloneRegion
from .erosion import ErosionReport
from .history import HistoryResult
from .model import SourceInventory
from .panel import PanelReport
from .rules import RuleMatch
from .trajectory import CheckpointMetrics, EraShift, TrajectorySummary
from .verbosity import VerbosityBreakdown

HOTSPOT_LIMIT = 20  # hotspots serialized per report; full list stays in memory

SCAN_CSV_HEADER = [
    "file",
    "language",
    "loc",
    "line_count",
    "callables",
    "max_cc",
    "flagged_lines",
    "clone_lines",
]
HISTORY_CSV_HEADER = [
    "index",
    "label",
    "timestamp",
    "phase",
    "loc",
    "erosion",
    "verbosity",
    "high_cc_count",
    "max_cc",
]


def canonical_json(obj) -> str:
    """Keys sorted lexicographically, stable float formatting, one newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def erosion_to_dict(report: ErosionReport) -> dict:
    return {
        "score": report.score,
        "total_mass": report.total_mass,
        "high_cc_mass": report.high_cc_mass,
        "high_cc_count": report.high_cc_count,
        "max_cc": report.max_cc,
        "hotspots": [
            {
                "qualified_name": c.qualified_name,
                "file": c.file,
                "start_line": c.span[0],
                "cc": c.cc,
                "sloc": c.sloc,
                "mass": mass,
            }
            for c, mass in report.hotspots[:HOTSPOT_LIMIT]
        ],
    }


def verbosity_to_dict(breakdown: VerbosityBreakdown) -> dict:
    return {
        "score": breakdown.score,
        "flagged_lines": breakdown.flagged_lines,
        "clone_lines": breakdown.clone_lines,
        "union_lines": breakdown.union_lines,
        "loc": breakdown.loc,
        "violation_density": breakdown.violation_density,
        "clone_ratio": breakdown.clone_ratio,
    }


def match_to_dict(match: RuleMatch) -> dict:
    return {
        "rule_id": match.rule_id,
        "file": match.file,
        "start": {"line": match.start[0], "col": match.start[1]},
        "end": {"line": match.end[0], "col": match.end[1]},
        "lines": list(match.lines),
        "captures": dict(sorted(match.captures.items())),
    }


def clone_to_dict(region: CloneRegion) -> dict:
    return {
        "clone_class_id": region.clone_class_id,
        "file": region.file,
        "start_line": region.span[0],
        "end_line": region.span[1],
        "fingerprint": region.fingerprint,
        "lines": list(region.lines),
    }


def inventory_to_dict(inventory: SourceInventory) -> dict:
    return {
        "n_files": len(inventory.files),
        "n_callables": len(inventory.callables),
        "total_loc": inventory.total_loc,
        "files": [
            {
                "path": f.path,
                "language": f.language,
                "loc": f.loc,
                "line_count": f.line_count,
            }
            for f in inventory.files
        ],
        "skipped": [{"path": p, "reason": r} for p, r in inventory.skipped],
    }


def callables_to_list(inventory: SourceInventory) -> list[dict]:
    return [
        {
            "qualified_name": c.qualified_name,
            "file": c.file,
            "start_line": c.span[0],
            "end_line": c.span[1],
            "cc": c.cc,
            "sloc": c.sloc,
        }
        for c in inventory.callables
    ]


def checkpoint_to_dict(cm: CheckpointMetrics) -> dict:
    return {
        "index": cm.index,
        "label": cm.label,
        "timestamp": cm.timestamp.isoformat() if cm.timestamp else None,
        "phase": cm.phase,
        "loc": cm.loc,
        "high_cc_count": cm.high_cc_count,
        "max_cc": cm.max_cc,
        "erosion": erosion_to_dict(cm.erosion),
        "verbosity": verbosity_to_dict(cm.verbosity),
    }


def summary_to_dict(summary: TrajectorySummary) -> dict:
    return {
        "n_checkpoints": summary.n_checkpoints,
        "first_erosion": summary.first_erosion,
        "last_erosion": summary.last_erosion,
        "first_verbosity": summary.first_verbosity,
        "last_verbosity": summary.last_verbosity,
        "rising_erosion": summary.rising_erosion,
        "rising_verbosity": summary.rising_verbosity,
        "slope_erosion": summary.slope_erosion,
        "slope_verbosity": summary.slope_verbosity,
        "growth_pct_erosion": summary.growth_pct_erosion,
        "growth_pct_verbosity": summary.growth_pct_verbosity,
        "missing_checkpoints": list(summary.missing_checkpoints),
    }


def era_to_dict(era: EraShift) -> dict:
    return {
        "cutoff_date": era.cutoff_date.isoformat(),
        "eligible": era.eligible,
        "pre_median_erosion": era.pre_median_erosion,
        "post_median_erosion": era.post_median_erosion,
        "pre_median_verbosity": era.pre_median_verbosity,
        "post_median_verbosity": era.post_median_verbosity,
        "shift_erosion": era.shift_erosion,
        "shift_verbosity": era.shift_verbosity,
    }


def history_to_dict(result: HistoryResult) -> dict:
    return {
        "checkpoints": [checkpoint_to_dict(c) for c in result.checkpoints],
        "summary": summary_to_dict(result.summary) if result.summary else None,
        "era": era_to_dict(result.era) if result.era else None,
    }


def panel_to_dict(report: PanelReport) -> dict:
    def tier(stats) -> dict:
        return {
            "n": stats.n,
            "mean_verbosity": stats.mean_verbosity,
            "std_verbosity": stats.std_verbosity,
            "mean_erosion": stats.mean_erosion,
            "std_erosion": stats.std_erosion,
        }

    return {
        "overall": tier(report.overall),
        "tiers": {name: tier(stats) for name, stats in sorted(report.tiers.items())},
        "rising_fraction_erosion": report.rising_fraction_erosion,
        "rising_fraction_verbosity": report.rising_fraction_verbosity,
        "median_slope_erosion": report.median_slope_erosion,
        "median_slope_verbosity": report.median_slope_verbosity,
        "n_era_eligible": report.n_era_eligible,
        "median_era_shift_erosion": report.median_era_shift_erosion,
        "median_era_shift_verbosity": report.median_era_shift_verbosity,
        "exceed_reference_verbosity": report.exceed_reference_verbosity,
        "exceed_reference_erosion": report.exceed_reference_erosion,
        "failed": list(report.failed),
    }


def envelope(payload_type: str, payload: dict, config: dict, deterministic: bool) -> dict:
    digest = hashlib.sha256(
        json.dumps(config, sort_keys=True, ensure_ascii=False).encode()
    ).hexdigest()
    out = {
        "tool_version": __version__,
        "config_digest": digest,
        "payload_type": payload_type,
        "payload": payload,
    }
    if not deterministic:
        out["created_at"] = datetime.now(timezone.utc).isoformat()
    return out


def scan_report_csv(payload: dict) -> str:
    """One row per file plus a TOTAL row; header fixed (see docs/schema)."""
    per_file_flagged: dict[str, set[int]] = {}
    for match in payload.get("matches", []):
        per_file_flagged.setdefault(match["file"], set()).update(match["lines"])
    per_file_cloned: dict[str, set[int]] = {}
    for region in payload.get("clones", []):
        per_file_cloned.setdefault(region["file"], set()).update(region["lines"])
    per_file_callables: dict[str, list[dict]] = {}
    for entry in payload.get("callables", []):
        per_file_callables.setdefault(entry["file"], []).append(entry)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SCAN_CSV_HEADER)
    inv = payload["inventory"]
    n_callables = {}
    max_ccs = {}
    for f in inv["files"]:
        spots = per_file_callables.get(f["path"], [])
        n_callables[f["path"]] = len(spots)
        max_ccs[f["path"]] = max((s["cc"] for s in spots), default=0)
        writer.writerow(
            [
                f["path"],
                f["language"],
                f["loc"],
                f["line_count"],
                len(spots),
                max_ccs[f["path"]],
                len(per_file_flagged.get(f["path"], ())),
                len(per_file_cloned.get(f["path"], ())),
            ]
        )
    writer.writerow(
        [
            "TOTAL",
            "",
            inv["total_loc"],
            sum(f["line_count"] for f in inv["files"]),
            inv["n_callables"],
            payload["erosion"]["max_cc"],
            payload["verbosity"]["flagged_lines"],
            payload["verbosity"]["clone_lines"],
        ]
    )
    return buf.getvalue()


def history_report_csv(payload: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HISTORY_CSV_HEADER)
    for cp in payload["checkpoints"]:
        writer.writerow(
            [
                cp["index"],
                cp["label"],
                cp["timestamp"] or "",
                cp["phase"],
                cp["loc"],
                repr(cp["erosion"]["score"]),
                repr(cp["verbosity"]["score"]),
                cp["high_cc_count"],
                cp["max_cc"],
            ]
        )
    return buf.getvalue()
