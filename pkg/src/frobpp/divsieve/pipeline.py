"""Layered exclusion of FPPs below a bound.

Phase 1 (gcd candidates): for every odd q ≤ q_max and every c, no n = p*q with
p prime passes the test.  So every prime factor p of an FPP n ≤ n_max has
n/p > q_max, i.e. p ≤ n_max // (q_max + 1) =: p_bound.

Phase 2 (scans): over small_factor_bound < p ≤ p_bound find the split primes
that pass the order-compatibility test and the primes whose square could
divide an FPP.

Phase 3 (cofactor enumeration): every remaining prime p gets its n ≤ n_max
enumerated through the forced congruences on n/p.  When a single prime leaves
too many candidates, the search branches on the next larger prime factor
(pairs, then triples) so that each branch has a much coarser progression.

The final claim covers only n whose prime factors all exceed
small_factor_bound; the small-factor regime is reported as uncovered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

from ..frobtest import COMPOSITE, PreconditionError, frobenius_test_abc
from ..ntkernel import (
    RHO_ITERATIONS,
    TRIAL_BOUND,
    CrtConstraint,
    FactorizationIncomplete,
    _simple_sieve,
    jacobi,
    primes_in_range,
)
from ..parallel import chunked, ordered_map
from ..quadring import is_squarefree
from .crtsearch import PrimeConstraint, crt_q_search, prime_constraint, q_constraint
from .gcdcand import gcd_candidates
from .report import FORMAT_VERSION
from .scans import SplitPrimeHit, scan_prime_power, scan_split_primes

HEAVY_THRESHOLD = 10**5
MAX_DEPTH = 3


def default_c_values(c_max: int, squarefree: bool = False) -> list[int]:
    """Radicands below c_max: odd primes by default, or every square-free c >= 2."""
    if squarefree:
        return [c for c in range(2, c_max) if is_squarefree(c)]
    return [p for p in _simple_sieve(c_max - 1) if p > 2]


# --------------------------------------------------------------------------
# phase 1


def _phase1_chunk(args) -> dict[str, Any]:
    q_lo, q_hi, c_values, budget = args
    out = {"pairs": 0, "tested": 0, "not_applicable": 0, "unverified": [], "passing": []}
    for q in range(q_lo | 1, q_hi + 1, 2):
        for c in c_values:
            if math.gcd(c, q) > 1:
                continue
            rep = gcd_candidates(q, 1, 1, c, **budget)
            out["pairs"] += 1
            if rep.unfactored_cofactor != 1:
                out["unverified"].append({"q": q, "c": c, "cofactor": str(rep.unfactored_cofactor)})
            # Primes dividing q stay in: p | q means p**2 | n, still a possible FPP.
            for p in rep.candidate_primes:
                if p == 2 or c % p == 0:
                    continue
                n = p * q
                if jacobi(c, n) != -1:
                    out["not_applicable"] += 1
                    continue
                try:
                    v = frobenius_test_abc(n, 1, 1, c, **budget)
                except PreconditionError:
                    out["not_applicable"] += 1
                    continue
                out["tested"] += 1
                if v.kind != COMPOSITE:
                    out["passing"].append(v.to_record())
    return out


def cofactor_sweep(
    q_max: int, c_values: Sequence[int], workers: int = 1, q_min: int = 3, **budget
) -> dict[str, Any]:
    """Run gcd candidates over odd q in [q_min, q_max] and test every n = p*q."""
    jobs = [(a, b, list(c_values), budget) for a, b in chunked(q_min, q_max, 8 * max(workers, 1), 2)]
    total = {"q_range": [q_min, q_max], "pairs": 0, "tested": 0, "not_applicable": 0,
             "unverified": [], "passing": []}
    for part in ordered_map(_phase1_chunk, jobs, workers):
        for k in ("pairs", "tested", "not_applicable"):
            total[k] += part[k]
        total["unverified"] += part["unverified"]
        total["passing"] += part["passing"]
    return total


# --------------------------------------------------------------------------
# phase 3


@dataclass
class _CoverState:
    c: int
    n_max: int
    primes: list[int]
    constraints: dict[int, PrimeConstraint]
    flagged: frozenset[int]
    heavy_threshold: int
    max_depth: int
    budget: dict[str, int]
    stats: dict[str, int] = field(default_factory=lambda: {
        "singles": 0, "pairs": 0, "triples": 0, "deeper": 0, "proven_empty": 0,
        "branched": 0, "candidates": 0, "tested": 0})
    passing: list[dict[str, Any]] = field(default_factory=list)


_LEVEL = {1: "singles", 2: "pairs", 3: "triples"}


def _cover(state: _CoverState, fixed: tuple[int, ...]) -> None:
    """Test every FPP n ≤ n_max whose distinct prime factors, in increasing
    order, begin with ``fixed``."""
    state.stats[_LEVEL.get(len(fixed), "deeper")] += 1
    cons = [state.constraints[p] for p in fixed]
    base = math.prod(fixed)
    combined = q_constraint(cons)
    if not isinstance(combined, CrtConstraint):
        state.stats["proven_empty"] += 1
        return
    estimate = (state.n_max // base) // combined.modulus
    repeated = state.flagged.intersection(fixed)
    if estimate <= state.heavy_threshold or len(fixed) >= state.max_depth or repeated:
        res = crt_q_search(list(fixed), state.c, state.n_max, frozenset(repeated),
                           constraints=cons, **state.budget)
        state.stats["candidates"] += res.candidates
        state.stats["tested"] += res.tested
        state.passing += res.passing
        return
    state.stats["branched"] += 1
    # n made of the fixed primes alone: with no repeated squares that is base itself.
    if len(fixed) > 1 and combined.holds(1) and jacobi(state.c, base) == -1:
        v = frobenius_test_abc(base, 1, 1, state.c, **state.budget)
        state.stats["tested"] += 1
        if v.kind != COMPOSITE:
            state.passing.append(v.to_record())
    for p in state.primes:
        if p <= fixed[-1]:
            continue
        if base * p > state.n_max:
            break
        if state.constraints[p].excluded:
            continue
        _cover(state, fixed + (p,))


def _phase3_for_c(args) -> dict[str, Any]:
    c, n_max, lo, hi, hits, flagged, heavy_threshold, max_depth, budget = args
    primes = list(primes_in_range(lo, hi)) if lo <= hi else []
    primes = [p for p in primes if p > 2]
    hit_map = {h["p"]: SplitPrimeHit(**h) for h in hits}
    constraints: dict[int, PrimeConstraint] = {}
    unverified = []
    excluded = {"divides_c": 0, "split_order": 0}
    for p in primes:
        j = jacobi(c, p)
        if j == 1 and p not in hit_map:
            constraints[p] = PrimeConstraint(p, c, None, "split prime fails order compatibility")
            excluded["split_order"] += 1
            continue
        try:
            constraints[p] = prime_constraint(p, c, hit_map.get(p), **budget)
        except FactorizationIncomplete as exc:
            unverified.append({"p": p, "c": c, "reason": str(exc)})
            constraints[p] = PrimeConstraint(p, c, None, "unverified")
            continue
        if j == 0:
            excluded["divides_c"] += 1
    state = _CoverState(c, n_max, primes, constraints, frozenset(flagged), heavy_threshold,
                        max_depth, budget)
    for p in primes:
        if not constraints[p].excluded:
            _cover(state, (p,))
    return {
        "c": c,
        "primes_examined": len(primes),
        "excluded": excluded,
        "stats": state.stats,
        "unverified": unverified,
        "passing": state.passing,
    }


# --------------------------------------------------------------------------


def exclusion_pipeline(
    c_max: int = 128,
    n_max: int = 10**6,
    small_factor_bound: int = 17,
    q_max: int = 1 << 12,
    c_values: Sequence[int] | None = None,
    heavy_threshold: int = HEAVY_THRESHOLD,
    max_depth: int = MAX_DEPTH,
    workers: int = 1,
    seed: int = 0,
    trial_bound: int = TRIAL_BOUND,
    rho_iterations: int = RHO_ITERATIONS,
) -> dict[str, Any]:
    """Run all three phases and return a JSON-ready exclusion report."""
    if c_values is None:
        c_values = default_c_values(c_max)
    c_values = sorted(set(c_values))
    if not c_values:
        raise ValueError("no radicands to exclude over")
    if min(n_max, q_max, small_factor_bound) < 1 or q_max < 3:
        raise ValueError("bounds must be positive and q_max >= 3")
    budget = {"trial_bound": trial_bound, "rho_iterations": rho_iterations, "seed": seed}

    phase1 = cofactor_sweep(q_max, c_values, workers, **budget)
    p_bound = n_max // (q_max + 1)
    if phase1["unverified"]:
        # Without the full phase-1 result a prime factor can be as large as n_max/3.
        p_bound = n_max // 3
    lo, hi = small_factor_bound + 1, p_bound

    scan_kwargs = dict(budget, workers=workers)
    if lo <= hi:
        split = scan_split_primes(c_values, lo, hi, **scan_kwargs)
        power = scan_prime_power(c_values, lo, hi, **scan_kwargs)
    else:
        split = power = None

    phase3 = []
    if lo <= hi:
        jobs = []
        for c in c_values:
            hits = [h for h in split.hits if h["c"] == c]
            flagged = [h["p"] for h in power.hits if h["c"] == c]
            jobs.append((c, n_max, lo, hi, hits, flagged, heavy_threshold, max_depth, budget))
        phase3 = ordered_map(_phase3_for_c, jobs, workers)

    passing = phase1["passing"] + [v for r in phase3 for v in r["passing"]]
    unverified = (
        [dict(u, phase=1) for u in phase1["unverified"]]
        + ([dict(s, phase=2) for s in split.skipped] if split else [])
        + [dict(u, phase=3) for r in phase3 for u in r["unverified"]]
    )
    holds = not passing and not unverified
    statement = (
        f"no FPP n <= {n_max} with c in {c_values[0]}..{c_values[-1]} "
        f"({len(c_values)} values) and all prime factors > {small_factor_bound}"
    )
    return {
        "format_version": FORMAT_VERSION,
        "report": "exclude",
        "params": {
            "c_values": c_values,
            "n_max": n_max,
            "small_factor_bound": small_factor_bound,
            "q_max": q_max,
            "heavy_threshold": heavy_threshold,
            "max_depth": max_depth,
            **budget,
        },
        "phase1": phase1,
        "p_bound": p_bound,
        "phase2": {
            "split": split.to_record() if split else None,
            "prime_power": power.to_record() if power else None,
        },
        "phase3": phase3,
        "certificates": passing,
        "unverified": unverified,
        "claim": {
            "statement": statement,
            "holds": holds,
            "uncovered": [
                f"n with a prime factor <= {small_factor_bound}",
                "n whose Frobenius parameter c is outside the listed radicands",
            ],
        },
    }
