"""Prime-range scans for primes that could divide an FPP.

Split scan: for (c/p) = +1 write w1 = 1 + d, w2 = 1 − d with d² ≡ c.  A prime
factor p of an FPP with cofactor q needs w1**q ≡ w2 and w2**q ≡ w1, hence
q ≡ −1 mod ord(w1/w2) and q ≡ 1 mod ord(w1*w2).  Both congruences can hold
only when gcd of the two orders is at most 2; such primes are rare.

Prime-power scan: for (c/p) = −1, p² can divide an FPP only if
z**(p+1) ≡ N(z) (mod p²) with z = 1 + √c.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

from ..ntkernel import (
    RHO_ITERATIONS,
    SEGMENT_SIZE,
    TRIAL_BOUND,
    CrtConstraint,
    FactorizationIncomplete,
    crt_combine,
    factorize,
    jacobi,
    order_from_factors,
    primes_in_range,
    sqrt_mod,
)
from ..quadring import pow_mod
from .report import ScanReport

SPLIT = "split"
PRIME_POWER = "prime_power"
SCAN_KINDS = (SPLIT, PRIME_POWER)
# Prime-power scans look for p**PRIME_POWER_EXPONENT dividing an FPP.
PRIME_POWER_EXPONENT = 2


@dataclass(frozen=True)
class SplitPrimeHit:
    p: int
    c: int
    d: int
    ord_gamma: int
    ord_delta: int
    q_residue: int
    q_modulus: int

    @property
    def q_constraint(self) -> CrtConstraint:
        """Constraint on the cofactor n/p of any FPP n divisible by p."""
        return CrtConstraint(self.q_residue, self.q_modulus)

    def to_record(self) -> dict[str, Any]:
        return asdict(self)


def _split_orders(p: int, c: int, factors) -> tuple[int, int, int, int, int] | None:
    d = sqrt_mod(c, p)
    w1, w2 = (1 + d) % p, (1 - d) % p
    if w1 == 0 or w2 == 0:
        # c ≡ 1 (mod p): w1**q ≡ w2 is impossible for a unit/zero pair.
        return None
    gamma = w1 * pow(w2, -1, p) % p
    delta = w1 * w2 % p
    og = order_from_factors(lambda k: pow(gamma, k, p) == 1, p - 1, factors)
    od = order_from_factors(lambda k: pow(delta, k, p) == 1, p - 1, factors)
    return d, w1, w2, og, od


def _hit_from_orders(p: int, c: int, d: int, og: int, od: int) -> SplitPrimeHit | None:
    if math.gcd(og, od) > 2:
        return None
    combined = crt_combine([CrtConstraint(-1 % og, og), CrtConstraint(1 % od, od)])
    if not combined:
        return None
    return SplitPrimeHit(p, c, d, og, od, combined.residue, combined.modulus)


def check_split_prime(
    p: int,
    c: int,
    trial_bound: int = TRIAL_BOUND,
    rho_iterations: int = RHO_ITERATIONS,
    seed: int = 0,
) -> SplitPrimeHit | None:
    """Whether the prime p, with (c/p) = +1, passes the order-compatibility test."""
    if p < 3 or jacobi(c, p) != 1:
        raise ValueError(f"need an odd prime p with jacobi({c}, p) = +1, got p={p}")
    fac = factorize(p - 1, trial_bound, rho_iterations, seed)
    if not fac.complete:
        raise FactorizationIncomplete(fac)
    data = _split_orders(p, c, fac.factors)
    if data is None:
        return None
    d, _, _, og, od = data
    return _hit_from_orders(p, c, d, og, od)


def q_admissible(p: int, c: int, q: int) -> bool:
    """Direct check of w1**q ≡ w2 and w2**q ≡ w1 (mod p)."""
    d = sqrt_mod(c, p)
    w1, w2 = (1 + d) % p, (1 - d) % p
    return pow(w1, q, p) == w2 and pow(w2, q, p) == w1


def prime_power_flag(p: int, c: int, power: int = PRIME_POWER_EXPONENT) -> bool:
    """z**(p+1) ≡ N(z) (mod p**power) for z = 1 + √c, (c/p) = −1."""
    m = p**power
    return pow_mod(1, 1, c, p + 1, m) == ((1 - c) % m, 0)


# --------------------------------------------------------------------------
# segment workers


def _segment_split(c_values, lo, hi, cfg) -> list[dict[str, Any]]:
    units = {c: {"c": c, "lo": lo, "hi": hi, "hits": [], "skipped": []} for c in c_values}
    for p in primes_in_range(max(lo, 3), hi) if hi >= 3 else ():
        wanted = [c for c in c_values if jacobi(c, p) == 1]
        if not wanted:
            continue
        fac = factorize(p - 1, cfg["trial_bound"], cfg["rho_iterations"], cfg["seed"])
        if not fac.complete:
            for c in wanted:
                units[c]["skipped"].append(
                    {"p": p, "c": c, "reason": "p-1 not factored", "cofactor": fac.cofactor}
                )
            continue
        for c in wanted:
            data = _split_orders(p, c, fac.factors)
            if data is None:
                continue
            hit = _hit_from_orders(p, c, data[0], data[3], data[4])
            if hit is not None:
                units[c]["hits"].append(hit.to_record())
    return [units[c] for c in c_values]


def _segment_prime_power(c_values, lo, hi, cfg) -> list[dict[str, Any]]:
    units = {c: {"c": c, "lo": lo, "hi": hi, "hits": [], "skipped": []} for c in c_values}
    for p in primes_in_range(max(lo, 3), hi) if hi >= 3 else ():
        m = p**PRIME_POWER_EXPONENT
        for c in c_values:
            if jacobi(c, p) != -1:
                continue
            ra, rb = pow_mod(1, 1, c, p + 1, m)
            norm = (1 - c) % m
            # Mod p this always holds in GF(p²); a miss means broken arithmetic.
            if ra % p != norm % p or rb % p:
                raise ArithmeticError(f"Frobenius identity failed at p={p}, c={c}")
            if ra == norm and rb == 0:
                units[c]["hits"].append({"p": p, "c": c})
    return [units[c] for c in c_values]


_WORKERS = {SPLIT: _segment_split, PRIME_POWER: _segment_prime_power}


def _run_unit(args):
    kind, c_values, lo, hi, cfg = args
    return _WORKERS[kind](c_values, lo, hi, cfg)


def segments(lo: int, hi: int, size: int) -> list[tuple[int, int]]:
    """Split [lo, hi] at absolute multiples of ``size``."""
    out = []
    start = lo
    while start <= hi:
        end = min(hi, (start // size + 1) * size - 1)
        out.append((start, end))
        start = end + 1
    return out


def scan_config(
    seed: int = 0,
    trial_bound: int = TRIAL_BOUND,
    rho_iterations: int = RHO_ITERATIONS,
    segment_size: int = SEGMENT_SIZE,
) -> dict[str, int]:
    return {
        "seed": seed,
        "trial_bound": trial_bound,
        "rho_iterations": rho_iterations,
        "segment_size": segment_size,
    }


def _load_checkpoint(path: Path, kind: str, cfg: dict) -> dict[tuple[int, int, int], dict]:
    done = {}
    if not path.exists():
        return done
    with path.open() as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError:
                # A torn final line from an interrupted write.
                continue
            if rec.get("scan_kind") == kind and rec.get("config") == cfg:
                done[(rec["c"], rec["lo"], rec["hi"])] = rec
    return done


def run_scan(
    kind: str,
    c_values: Sequence[int],
    p_lo: int,
    p_hi: int,
    seed: int = 0,
    trial_bound: int = TRIAL_BOUND,
    rho_iterations: int = RHO_ITERATIONS,
    segment_size: int = SEGMENT_SIZE,
    workers: int = 1,
    checkpoint: str | os.PathLike | None = None,
    max_segments: int | None = None,
) -> ScanReport:
    """Scan primes in [p_lo, p_hi] for every c in ``c_values``.

    With ``checkpoint`` set, each finished (c, segment) unit is appended as a
    JSON line and units already present are not recomputed.  ``max_segments``
    stops after that many new segments; the returned report then covers only
    what was finished.
    """
    if kind not in SCAN_KINDS:
        raise ValueError(f"unknown scan kind {kind!r}")
    if p_lo < 1 or p_lo > p_hi:
        raise ValueError(f"need 1 <= p_lo <= p_hi, got [{p_lo}, {p_hi}]")
    c_values = sorted(set(c_values))
    cfg = scan_config(seed, trial_bound, rho_iterations, segment_size)
    ckpt = Path(checkpoint) if checkpoint else None
    done = _load_checkpoint(ckpt, kind, cfg) if ckpt else {}

    jobs = []
    for lo, hi in segments(p_lo, p_hi, segment_size):
        pending = [c for c in c_values if (c, lo, hi) not in done]
        if pending:
            jobs.append((kind, pending, lo, hi, cfg))
    if max_segments is not None:
        jobs = jobs[:max_segments]

    def record(units):
        for u in units:
            done[(u["c"], u["lo"], u["hi"])] = u
            if ckpt:
                with ckpt.open("a") as fh:
                    fh.write(json.dumps({"scan_kind": kind, "config": cfg, **u}, sort_keys=True) + "\n")

    try:
        if workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(workers) as pool:
                for units in pool.map(_run_unit, jobs):
                    record(units)
        else:
            for job in jobs:
                record(_run_unit(job))
    except KeyboardInterrupt:
        pass
    return _assemble(kind, c_values, p_lo, p_hi, cfg, done.values())


def _assemble(kind, c_values, p_lo, p_hi, cfg, units: Iterable[dict]) -> ScanReport:
    hits, skipped, coverage = [], [], {c: [] for c in c_values}
    for u in units:
        if u["c"] not in coverage or u["hi"] < p_lo or u["lo"] > p_hi:
            continue
        coverage[u["c"]].append((u["lo"], u["hi"]))
        hits += [dict(h) for h in u["hits"]]
        skipped += [dict(s) for s in u["skipped"]]
    return ScanReport(kind, list(c_values), (p_lo, p_hi), hits, coverage, skipped, dict(cfg))


def report_from_checkpoint(
    path: str | os.PathLike, kind: str, c_values: Sequence[int], p_lo: int, p_hi: int, **cfg_kwargs
) -> ScanReport:
    """Rebuild a (possibly partial) report from a checkpoint file."""
    cfg = scan_config(**cfg_kwargs)
    done = _load_checkpoint(Path(path), kind, cfg)
    return _assemble(kind, sorted(set(c_values)), p_lo, p_hi, cfg, done.values())


def scan_split_primes(c_values: Sequence[int], p_lo: int, p_hi: int, **kwargs) -> ScanReport:
    return run_scan(SPLIT, c_values, p_lo, p_hi, **kwargs)


def scan_prime_power(c_values: Sequence[int], p_lo: int, p_hi: int, **kwargs) -> ScanReport:
    return run_scan(PRIME_POWER, c_values, p_lo, p_hi, **kwargs)
