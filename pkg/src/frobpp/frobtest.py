"""The Frobenius test over Z_n[√c] and liar enumeration.

Two entry points:

* :func:`frobenius_test` picks c as the smallest odd prime with (c/n) = −1 and
  checks (1 + √c)**n ≡ 1 − √c (mod n).
* :func:`frobenius_test_abc` checks (a + b√c)**n ≡ a − b√c (mod n) for
  caller-supplied parameters, together with the equivalent form
  (a + b√c)**(n+1) ≡ a² − b²c (mod n).

A composite n that passes is a Frobenius pseudoprime; it is reported as an
``fpp_certificate`` carrying its factorization.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any

from .ntkernel import (
    RHO_ITERATIONS,
    TRIAL_BOUND,
    _simple_sieve,
    factorize,
    is_perfect_square,
    is_probable_prime,
    jacobi,
)
from .parallel import chunked, ordered_map
from .quadring import ModularQuadratic, pow_mod, qpow

C_CUTOFF = 1000
LIAR_GUARD = 10**5

COMPOSITE = "composite"
PROBABLE_PRIME = "probable_prime"
FPP_CERTIFICATE = "fpp_certificate"
FPP_UNCONFIRMED = "fpp_unconfirmed"
KINDS = (COMPOSITE, PROBABLE_PRIME, FPP_CERTIFICATE, FPP_UNCONFIRMED)


class CutoffExceeded(ValueError):
    def __init__(self, n: int, largest_tried: int):
        super().__init__(
            f"no odd prime c <= {largest_tried} has jacobi(c, {n}) = -1"
        )
        self.n = n
        self.largest_tried = largest_tried


class PreconditionError(ValueError):
    """Parameters outside the domain of the parameterized test.

    ``reason`` is one of ``even``, ``small``, ``square``, ``jacobi``,
    ``not_coprime``.
    """

    def __init__(self, reason: str, message: str):
        super().__init__(message)
        self.reason = reason


class SharedFactorError(ValueError):
    def __init__(self, n: int, factor: int):
        super().__init__(f"{factor} is a common factor with {n}")
        self.n = n
        self.factor = factor


@dataclass(frozen=True)
class FrobeniusVerdict:
    n: int
    kind: str
    c_used: int | None = None
    a: int = 1
    b: int = 1
    witness: dict[str, Any] | None = None

    def to_record(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "a": self.a,
            "b": self.b,
            "c": self.c_used,
            "kind": self.kind,
            "witness": self.witness,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)

    @classmethod
    def from_record(cls, rec: dict[str, Any]) -> "FrobeniusVerdict":
        return cls(rec["n"], rec["kind"], rec["c"], rec["a"], rec["b"], rec["witness"])


@dataclass(frozen=True)
class CSelection:
    """Result of :func:`select_c`: either ``c`` or a compositeness ``witness``."""

    c: int | None
    witness: dict[str, Any] | None = None


@lru_cache(maxsize=8)
def _odd_primes_upto(limit: int) -> tuple[int, ...]:
    return tuple(p for p in _simple_sieve(limit) if p > 2)


def select_c(n: int, c_cutoff: int = C_CUTOFF) -> CSelection:
    if n < 3 or n % 2 == 0:
        raise ValueError(f"select_c needs an odd n >= 3, got {n}")
    if is_perfect_square(n):
        return CSelection(None, {"type": "perfect_square", "root": math.isqrt(n)})
    largest = 2
    for c in _odd_primes_upto(c_cutoff):
        largest = c
        if c == n:
            continue
        j = jacobi(c, n)
        if j == -1:
            return CSelection(c)
        if j == 0:
            return CSelection(None, {"type": "shared_factor", "factor": c})
    raise CutoffExceeded(n, largest)


def _confirm(n: int, kind_if_prime: str, residue: tuple[int, int], c: int, a: int, b: int,
             trial_bound: int, rho_iterations: int, seed: int, extra: dict | None = None) -> FrobeniusVerdict:
    """Classify an n for which the congruence held."""
    witness: dict[str, Any] = {"type": "congruence_held", "residue": list(residue)}
    if extra:
        witness.update(extra)
    if is_probable_prime(n):
        return FrobeniusVerdict(n, kind_if_prime, c, a, b, witness)
    fac = factorize(n, trial_bound, rho_iterations, seed)
    witness["factors"] = [list(pe) for pe in fac.factors]
    witness["cofactor"] = fac.cofactor
    kind = FPP_CERTIFICATE if fac.complete else FPP_UNCONFIRMED
    return FrobeniusVerdict(n, kind, c, a, b, witness)


def frobenius_test(
    n: int,
    c_cutoff: int = C_CUTOFF,
    trial_bound: int = TRIAL_BOUND,
    rho_iterations: int = RHO_ITERATIONS,
    seed: int = 0,
) -> FrobeniusVerdict:
    """Canonical Frobenius test of n with z = 1 + √c."""
    if n < 2:
        raise ValueError(f"frobenius_test needs n >= 2, got {n}")
    if n == 2:
        return FrobeniusVerdict(n, PROBABLE_PRIME, None, witness={"type": "even_prime"})
    if n % 2 == 0:
        return FrobeniusVerdict(n, COMPOSITE, None, witness={"type": "even", "factor": 2})
    sel = select_c(n, c_cutoff)
    if sel.c is None:
        return FrobeniusVerdict(n, COMPOSITE, None, witness=sel.witness)
    c = sel.c
    residue = pow_mod(1, 1, c, n, n)
    if residue == (1, n - 1):
        return _confirm(n, PROBABLE_PRIME, residue, c, 1, 1, trial_bound, rho_iterations, seed)
    return FrobeniusVerdict(
        n, COMPOSITE, c,
        witness={"type": "congruence_failed", "residue": list(residue), "expected": [1, n - 1]},
    )


def frobenius_test_abc(
    n: int,
    a: int,
    b: int,
    c: int,
    trial_bound: int = TRIAL_BOUND,
    rho_iterations: int = RHO_ITERATIONS,
    seed: int = 0,
) -> FrobeniusVerdict:
    """Parameterized test: (a + b√c)**n ≡ a − b√c (mod n).

    Raises :class:`PreconditionError` for even n, square n, n < 3, parameters
    sharing all of n, or jacobi(c, n) != -1.  A proper common factor of n with
    a, b, c or the norm is a composite witness, not an error.
    """
    if n < 3:
        raise PreconditionError("small", f"n must be >= 3, got {n}")
    if n % 2 == 0:
        raise PreconditionError("even", f"n must be odd, got {n}")
    if is_perfect_square(n):
        raise PreconditionError("square", f"n={n} is a perfect square")
    nz = (a * a - b * b * c) % n
    for label, value in (("a", a), ("b", b), ("c", c), ("norm", nz)):
        g = math.gcd(value, n)
        if g == n and label == "norm":
            # Impossible for prime n once a is a unit, so n is composite.
            return FrobeniusVerdict(n, COMPOSITE, c, a, b, witness={"type": "norm_not_unit"})
        if g == n:
            raise PreconditionError("not_coprime", f"{label}={value} is divisible by n={n}")
        if g > 1:
            return FrobeniusVerdict(
                n, COMPOSITE, c, a, b,
                witness={"type": "shared_factor", "factor": g, "parameter": label},
            )
    if jacobi(c, n) != -1:
        raise PreconditionError("jacobi", f"jacobi({c}, {n}) = {jacobi(c, n)}, need -1")

    z = ModularQuadratic(a, b, n, c)
    zn = qpow(z, n)
    zn1 = zn * z
    first_form = zn == z.conjugate()
    second_form = zn1.a == nz and zn1.b == 0
    if first_form != second_form:
        raise AssertionError(f"n and n+1 forms disagree for {z}")
    residues = {"residue": [zn.a, zn.b], "residue_n_plus_1": [zn1.a, zn1.b]}
    if first_form:
        return _confirm(n, PROBABLE_PRIME, (zn.a, zn.b), c, a, b,
                        trial_bound, rho_iterations, seed, {"residue_n_plus_1": [zn1.a, zn1.b]})
    return FrobeniusVerdict(
        n, COMPOSITE, c, a, b,
        witness={
            "type": "congruence_failed",
            **residues,
            "expected": [a % n, -b % n],
            "expected_n_plus_1": [nz, 0],
        },
    )


def check_certificate(verdict: FrobeniusVerdict) -> bool:
    """Re-derive an FPP certificate from its stored values."""
    if verdict.kind != FPP_CERTIFICATE or not verdict.witness:
        return False
    n, c, a, b = verdict.n, verdict.c_used, verdict.a, verdict.b
    factors = verdict.witness.get("factors", [])
    product = 1
    for p, e in factors:
        if not is_probable_prime(p):
            return False
        product *= p**e
    if product != n or len(factors) == 1 and factors[0][1] == 1:
        return False
    residue = pow_mod(a, b, c, n, n)
    return list(residue) == verdict.witness["residue"] == [a % n, -b % n]


def norm_base_fermat(n: int, a: int, b: int, c: int) -> bool:
    """Fermat check of n to the base N(a + b√c) = a² − b²c."""
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    base = (a * a - b * b * c) % n
    g = math.gcd(base, n)
    if g != 1:
        raise SharedFactorError(n, g)
    return pow(base, n - 1, n) == 1


# --------------------------------------------------------------------------
# liars


@dataclass
class LiarCensus:
    """Elements z = a + b√c of Z_n[√c], z ≠ 0, with z**n ≡ z̄ (mod n)."""

    n: int
    c: int
    liar_count: int
    coprime_liar_count: int
    zero_coordinate_count: int = 0
    liars: list[tuple[int, int]] | None = None
    convention: str = "(a, b) in [0, n)^2 minus (0, 0)"

    def to_record(self) -> dict[str, Any]:
        rec = {
            "n": self.n,
            "c": self.c,
            "liar_count": self.liar_count,
            "coprime_liar_count": self.coprime_liar_count,
            "zero_coordinate_count": self.zero_coordinate_count,
            "convention": self.convention,
        }
        if self.liars is not None:
            rec["liars"] = [list(p) for p in self.liars]
        return rec

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "c", "a", "b"])
        for a, b in self.liars or ():
            w.writerow([self.n, self.c, a, b])
        return buf.getvalue()


def _liar_job(args) -> list[tuple[int, int]]:
    return _liar_rows(*args)


def _liar_rows(n: int, c: int, a_lo: int, a_hi: int) -> list[tuple[int, int]]:
    found = []
    for a in range(a_lo, a_hi):
        for b in range(n):
            if a == 0 and b == 0:
                continue
            ra, rb = pow_mod(a, b, c, n, n)
            if ra == a and rb == (-b) % n:
                found.append((a, b))
    return found


def count_liars(
    n: int,
    c: int,
    collect: bool = False,
    workers: int = 1,
    guard: int = LIAR_GUARD,
) -> LiarCensus:
    """Exhaustive census of Frobenius liars over all (a, b) in [0, n)²."""
    if n > guard:
        raise ValueError(f"n={n} exceeds the liar enumeration guard {guard}")
    if n < 3 or n % 2 == 0:
        raise ValueError(f"n must be odd and >= 3, got {n}")
    jobs = [(n, c, lo, hi + 1) for lo, hi in chunked(0, n - 1, 4 * max(workers, 1))]
    parts = ordered_map(_liar_job, jobs, workers)
    liars = [pair for part in parts for pair in part]
    coprime = sum(1 for a, b in liars if math.gcd(a, n) == 1 and math.gcd(b, n) == 1)
    zero_coord = sum(1 for a, b in liars if a == 0 or b == 0)
    return LiarCensus(n, c, len(liars), coprime, zero_coord, liars if collect else None)


# --------------------------------------------------------------------------
# direct sweeps


@dataclass
class SweepResult:
    """Outcome of running :func:`frobenius_test` on every odd n in a range."""

    lo: int
    hi: int
    counts: dict[str, int] = field(default_factory=dict)
    probable_primes: list[int] = field(default_factory=list)
    flagged: list[dict[str, Any]] = field(default_factory=list)
    cutoff_exceeded: list[int] = field(default_factory=list)

    def absorb(self, other: "SweepResult") -> None:
        for k, v in other.counts.items():
            self.counts[k] = self.counts.get(k, 0) + v
        self.probable_primes += other.probable_primes
        self.flagged += other.flagged
        self.cutoff_exceeded += other.cutoff_exceeded


def _sweep_chunk(args) -> SweepResult:
    lo, hi, c_cutoff = args
    out = SweepResult(lo, hi, {k: 0 for k in KINDS})
    for n in range(lo | 1, hi + 1, 2):
        try:
            v = frobenius_test(n, c_cutoff)
        except CutoffExceeded:
            out.cutoff_exceeded.append(n)
            continue
        out.counts[v.kind] += 1
        if v.kind == PROBABLE_PRIME:
            out.probable_primes.append(n)
        elif v.kind != COMPOSITE:
            out.flagged.append(v.to_record())
    return out


def sweep(lo: int, hi: int, c_cutoff: int = C_CUTOFF, workers: int = 1) -> SweepResult:
    """Test every odd n in [lo, hi] directly."""
    if lo < 3 or lo > hi:
        raise ValueError(f"need 3 <= lo <= hi, got [{lo}, {hi}]")
    jobs = [(a, b, c_cutoff) for a, b in chunked(lo, hi, max(1, 8 * workers), step=2)]
    total = SweepResult(lo, hi, {k: 0 for k in KINDS})
    for part in ordered_map(_sweep_chunk, jobs, workers):
        total.absorb(part)
    return total
