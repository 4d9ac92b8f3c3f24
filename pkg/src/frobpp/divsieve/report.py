"""Mergeable scan reports and interval bookkeeping."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

FORMAT_VERSION = 1

Interval = tuple[int, int]


def coalesce(intervals: Iterable[Interval]) -> list[Interval]:
    """Sort inclusive integer intervals and join the touching ones.

    Overlap is an error: merged reports must come from disjoint ranges.
    """
    out: list[list[int]] = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1]:
            raise ValueError(f"overlapping ranges [{out[-1][0]}, {out[-1][1]}] and [{lo}, {hi}]")
        if out and lo == out[-1][1] + 1:
            out[-1][1] = hi
        else:
            out.append([lo, hi])
    return [(lo, hi) for lo, hi in out]


def gaps(intervals: Iterable[Interval], lo: int, hi: int) -> list[Interval]:
    """Parts of [lo, hi] not covered by ``intervals``."""
    missing = []
    cursor = lo
    for a, b in coalesce(intervals):
        if b < cursor:
            continue
        if a > cursor:
            missing.append((cursor, min(a - 1, hi)))
        cursor = max(cursor, b + 1)
        if cursor > hi:
            break
    if cursor <= hi:
        missing.append((cursor, hi))
    return [g for g in missing if g[0] <= g[1]]


@dataclass
class ScanReport:
    """Result of a prime-range scan.

    ``coverage`` maps each radicand c to the inclusive p-intervals that were
    fully processed for it.  ``hits`` and ``skipped`` are lists of plain
    dicts keyed at least by ``p`` and ``c``.
    """

    scan_kind: str
    c_values: list[int]
    p_range: Interval
    hits: list[dict[str, Any]] = field(default_factory=list)
    coverage: dict[int, list[Interval]] = field(default_factory=dict)
    skipped: list[dict[str, Any]] = field(default_factory=list)
    config: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.c_values = sorted(self.c_values)
        self.p_range = tuple(self.p_range)
        self.hits.sort(key=lambda h: (h["p"], h["c"]))
        self.skipped.sort(key=lambda h: (h["p"], h["c"]))
        self.coverage = {c: coalesce(self.coverage.get(c, [])) for c in self.c_values}

    @property
    def complete(self) -> bool:
        return not self.gaps()

    def gaps(self) -> dict[int, list[Interval]]:
        out = {}
        for c in self.c_values:
            g = gaps(self.coverage.get(c, []), *self.p_range)
            if g:
                out[c] = g
        return out

    def hit_primes(self, c: int | None = None) -> list[int]:
        return [h["p"] for h in self.hits if c is None or h["c"] == c]

    def to_record(self) -> dict[str, Any]:
        return {
            "format_version": FORMAT_VERSION,
            "report": "scan",
            "scan_kind": self.scan_kind,
            "c_values": self.c_values,
            "p_range": list(self.p_range),
            "hits": self.hits,
            "ranges_covered": [
                {"c": c, "lo": lo, "hi": hi} for c in self.c_values for lo, hi in self.coverage[c]
            ],
            "skipped": self.skipped,
            "config": self.config,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_record(cls, rec: dict[str, Any]) -> "ScanReport":
        if rec.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported report format_version {rec.get('format_version')!r}")
        coverage: dict[int, list[Interval]] = {}
        for r in rec["ranges_covered"]:
            coverage.setdefault(r["c"], []).append((r["lo"], r["hi"]))
        return cls(
            rec["scan_kind"],
            list(rec["c_values"]),
            tuple(rec["p_range"]),
            [dict(h) for h in rec["hits"]],
            coverage,
            [dict(s) for s in rec["skipped"]],
            dict(rec["config"]),
        )


def merge_reports(first: ScanReport, second: ScanReport) -> ScanReport:
    """Union of two reports over disjoint ranges."""
    if first.scan_kind != second.scan_kind:
        raise ValueError("cannot merge reports of different scan kinds")
    if first.config != second.config:
        raise ValueError("cannot merge reports produced under different configs")
    c_values = sorted(set(first.c_values) | set(second.c_values))
    coverage = {
        c: list(first.coverage.get(c, [])) + list(second.coverage.get(c, [])) for c in c_values
    }
    return ScanReport(
        first.scan_kind,
        c_values,
        (min(first.p_range[0], second.p_range[0]), max(first.p_range[1], second.p_range[1])),
        [dict(h) for h in first.hits + second.hits],
        coverage,
        [dict(s) for s in first.skipped + second.skipped],
        dict(first.config),
    )
