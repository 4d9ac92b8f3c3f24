"""Independent re-verification of written reports by recomputation."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .divsieve.crtsearch import crt_q_search
from .divsieve.gcdcand import gcd_candidates
from .divsieve.report import FORMAT_VERSION, ScanReport
from .divsieve.scans import PRIME_POWER, SPLIT, check_split_prime, prime_power_flag
from .frobtest import (
    FPP_CERTIFICATE,
    FrobeniusVerdict,
    check_certificate,
    count_liars,
    frobenius_test,
    frobenius_test_abc,
)
from .ntkernel import jacobi
from .quadring import pow_mod


class ReportFormatError(ValueError):
    """The file is not a report this version can read."""


@dataclass
class Verification:
    kind: str
    problems: list[str] = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.problems

    def fail(self, msg: str) -> None:
        self.problems.append(msg)


def load_report(path: str | Path) -> dict[str, Any]:
    try:
        rec = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ReportFormatError(f"cannot read report {path}: {exc}") from exc
    if not isinstance(rec, dict) or "report" not in rec:
        raise ReportFormatError(f"{path} has no 'report' field")
    if rec.get("format_version") != FORMAT_VERSION:
        raise ReportFormatError(f"unsupported format_version {rec.get('format_version')!r}")
    return rec


def _budget(rec: dict[str, Any]) -> dict[str, int]:
    cfg = rec.get("run_config") or {}
    return {k: cfg[k] for k in ("trial_bound", "rho_iterations", "seed") if k in cfg}


def _verify_verdict(rec, out: Verification) -> None:
    v = rec["verdict"]
    cfg = rec.get("run_config") or {}
    budget = _budget(rec)
    if rec.get("mode") == "abc":
        again = frobenius_test_abc(v["n"], v["a"], v["b"], v["c"], **budget)
    else:
        again = frobenius_test(v["n"], cfg.get("c_cutoff", 1000), **budget)
    out.checked += 1
    if again.to_record() != v:
        out.fail(f"verdict for n={v['n']} does not reproduce: got {again.kind}")
    if v["kind"] == FPP_CERTIFICATE and not check_certificate(FrobeniusVerdict.from_record(v)):
        out.fail(f"certificate for n={v['n']} does not check")


def _verify_liars(rec, out: Verification) -> None:
    census = rec["census"]
    n, c = census["n"], census["c"]
    if "liars" in census:
        pairs = census["liars"]
        for a, b in pairs:
            out.checked += 1
            if (a, b) == (0, 0) or pow_mod(a, b, c, n, n) != (a % n, -b % n):
                out.fail(f"listed pair ({a}, {b}) is not a liar mod {n}")
        coprime = sum(1 for a, b in pairs if math.gcd(a, n) == 1 == math.gcd(b, n))
        if len(pairs) != census["liar_count"] or coprime != census["coprime_liar_count"]:
            out.fail("liar counts disagree with the listed pairs")
    # The list may be truncated or absent; the count itself is only checkable by recounting.
    again = count_liars(n, c)
    out.checked += 1
    if (again.liar_count, again.coprime_liar_count) != (census["liar_count"], census["coprime_liar_count"]):
        out.fail(f"recount gives liars={again.liar_count} coprime={again.coprime_liar_count}")


def _verify_gcd(rec, out: Verification) -> None:
    g = rec["gcd"]
    again = gcd_candidates(g["q"], g["a"], g["b"], g["c"], **_budget(rec))
    out.checked += 1
    if again.to_record() != g:
        out.fail(f"gcd candidates for q={g['q']}, c={g['c']} do not reproduce")


def verify_scan(report: ScanReport, out: Verification) -> None:
    budget = {k: report.config[k] for k in ("trial_bound", "rho_iterations", "seed") if k in report.config}
    for h in report.hits:
        out.checked += 1
        p, c = h["p"], h["c"]
        label = f"hit p={p} c={c}"
        if report.scan_kind == SPLIT:
            try:
                again = check_split_prime(p, c, **budget)
            except ValueError as exc:
                out.fail(f"{label}: {exc}")
                continue
            if again is None or again.to_record() != h:
                out.fail(f"{label} does not reproduce")
        elif report.scan_kind == PRIME_POWER:
            if jacobi(c, p) != -1 or not prime_power_flag(p, c):
                out.fail(f"{label} does not reproduce")
        else:
            out.fail(f"unknown scan kind {report.scan_kind!r}")
            return
    for c, holes in report.gaps().items():
        for lo, hi in holes:
            out.fail(f"gap in ranges_covered for c={c}: [{lo}, {hi}]")


def _verify_search_q(rec, out: Verification) -> None:
    s = rec["search"]
    again = crt_q_search(s["primes"], s["c"], s["n_max"], **_budget(rec))
    out.checked += 1
    if again.to_record() != s:
        out.fail(f"q-search over primes {s['primes']} with c={s['c']} does not reproduce")


def _verify_exclude(rec, out: Verification) -> None:
    params = rec["params"]
    q_max, n_max = params["q_max"], params["n_max"]
    if rec["phase1"]["q_range"] != [3, q_max]:
        out.fail(f"phase 1 covered q in {rec['phase1']['q_range']}, expected [3, {q_max}]")
    expected_bound = n_max // 3 if rec["phase1"]["unverified"] else n_max // (q_max + 1)
    if rec["p_bound"] != expected_bound:
        out.fail(f"p_bound {rec['p_bound']} != {expected_bound}")
    lo, hi = params["small_factor_bound"] + 1, rec["p_bound"]
    for name, scan in rec["phase2"].items():
        if scan is None:
            if lo <= hi:
                out.fail(f"phase 2 {name} scan missing")
            continue
        report = ScanReport.from_record(scan)
        if tuple(report.p_range) != (lo, hi) or report.c_values != params["c_values"]:
            out.fail(f"phase 2 {name} scan covers the wrong range or radicands")
        verify_scan(report, out)
    if lo <= hi and sorted(r["c"] for r in rec["phase3"]) != params["c_values"]:
        out.fail("phase 3 does not cover every radicand")
    for v in rec["certificates"]:
        out.checked += 1
        if v["kind"] == FPP_CERTIFICATE and not check_certificate(FrobeniusVerdict.from_record(v)):
            out.fail(f"certificate for n={v['n']} does not check")
    holds = not rec["certificates"] and not rec["unverified"]
    if rec["claim"]["holds"] != holds:
        out.fail("claim.holds contradicts the certificates/unverified lists")


_DISPATCH = {
    "verdict": _verify_verdict,
    "liars": _verify_liars,
    "gcd": _verify_gcd,
    "search-q": _verify_search_q,
    "exclude": _verify_exclude,
}


def verify_record(rec: dict[str, Any]) -> Verification:
    kind = rec["report"]
    out = Verification(kind)
    if kind == "scan":
        try:
            report = ScanReport.from_record(rec)
        except (KeyError, TypeError, ValueError) as exc:
            raise ReportFormatError(f"malformed scan report: {exc}") from exc
        verify_scan(report, out)
        return out
    handler = _DISPATCH.get(kind)
    if handler is None:
        raise ReportFormatError(f"unknown report type {kind!r}")
    try:
        handler(rec, out)
    except (KeyError, TypeError) as exc:
        raise ReportFormatError(f"malformed {kind} report: missing {exc}") from exc
    return out


def verify_file(path: str | Path) -> Verification:
    return verify_record(load_report(path))
