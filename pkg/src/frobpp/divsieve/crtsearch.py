"""Cofactor enumeration for FPP candidates with fixed prime factors.

Fix primes p_1..p_k dividing n and write n = q * P with P = p_1 * ... * p_k.
Each p_i forces a congruence on its cofactor n/p_i:

* (c/p_i) = −1: z**(n/p_i − 1) ≡ 1 (mod p_i), i.e. n/p_i ≡ 1 mod r_i where
  r_i is the order of z = 1 + √c in GF(p_i²)*;
* (c/p_i) = +1: the split-prime constraint n/p_i ≡ q0 mod lcm(ord γ, ord δ).

Writing n/p_i = q * P/p_i turns each into a linear congruence on q; the CRT
combination of all of them leaves an arithmetic progression to enumerate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterator, Sequence

from ..frobtest import COMPOSITE, PreconditionError, frobenius_test_abc
from ..ntkernel import (
    RHO_ITERATIONS,
    TRIAL_BOUND,
    CrtConstraint,
    Incompatible,
    crt_combine,
    jacobi,
    solve_linear,
)
from ..quadring import ModularQuadratic
from .orders import ord_quad
from .scans import SplitPrimeHit, check_split_prime

PROVEN_EMPTY = "proven_empty"
ENUMERATED = "enumerated"


@dataclass(frozen=True)
class PrimeConstraint:
    """Constraint on n/p for a prime p dividing an FPP, or why none can hold."""

    p: int
    c: int
    cofactor: CrtConstraint | None
    reason: str

    @property
    def excluded(self) -> bool:
        return self.cofactor is None


def prime_constraint(
    p: int,
    c: int,
    hit: SplitPrimeHit | None = None,
    trial_bound: int = TRIAL_BOUND,
    rho_iterations: int = RHO_ITERATIONS,
    seed: int = 0,
) -> PrimeConstraint:
    j = jacobi(c, p)
    if j == 0:
        return PrimeConstraint(p, c, None, "p divides c")
    if j == -1:
        r = ord_quad(ModularQuadratic(1, 1, p, c), trial_bound, rho_iterations, seed).order
        return PrimeConstraint(p, c, CrtConstraint(1 % r, r), "order of 1+sqrt(c)")
    if hit is None:
        hit = check_split_prime(p, c, trial_bound, rho_iterations, seed)
    if hit is None:
        return PrimeConstraint(p, c, None, "split prime fails order compatibility")
    return PrimeConstraint(p, c, hit.q_constraint, "split prime constraint")


@dataclass
class QSearchResult:
    primes: tuple[int, ...]
    c: int
    n_max: int
    status: str
    constraint: CrtConstraint | None = None
    certificate: dict[str, Any] | None = None
    candidates: int = 0
    tested: int = 0
    not_applicable: int = 0
    passing: list[dict[str, Any]] = field(default_factory=list)

    def to_record(self) -> dict[str, Any]:
        return {
            "primes": list(self.primes),
            "c": self.c,
            "n_max": self.n_max,
            "status": self.status,
            "constraint": None
            if self.constraint is None
            else [self.constraint.residue, self.constraint.modulus],
            "certificate": self.certificate,
            "candidates": self.candidates,
            "tested": self.tested,
            "not_applicable": self.not_applicable,
            "passing": self.passing,
        }


def q_constraint(constraints: Sequence[PrimeConstraint]) -> CrtConstraint | dict[str, Any]:
    """Combined constraint on q, or a certificate of emptiness."""
    for pc in constraints:
        if pc.excluded:
            return {"type": "prime_excluded", "p": pc.p, "reason": pc.reason}
    total = math.prod(pc.p for pc in constraints)
    linear = []
    for pc in constraints:
        coeff = total // pc.p
        sol = solve_linear(coeff, pc.cofactor)
        if isinstance(sol, Incompatible):
            return {
                "type": "no_inverse",
                "p": pc.p,
                "coefficient": coeff,
                "modulus": pc.cofactor.modulus,
                "gcd": sol.gcd,
            }
        linear.append(sol)
    combined = crt_combine(linear)
    if isinstance(combined, Incompatible):
        return {
            "type": "crt_incompatible",
            "first": [combined.first.residue, combined.first.modulus],
            "second": [combined.second.residue, combined.second.modulus],
            "gcd": combined.gcd,
        }
    return combined


def candidate_q(
    primes: Sequence[int],
    constraint: CrtConstraint,
    q_max: int,
    allow_repeated: frozenset[int] = frozenset(),
) -> Iterator[int]:
    """q ≤ q_max on the progression, odd, coprime to primes not in ``allow_repeated``."""
    r, m = constraint.residue, constraint.modulus
    q = r if r > 0 else m
    barred = [p for p in primes if p not in allow_repeated]
    single = len(primes) == 1
    while q <= q_max:
        if q % 2 and all(q % p for p in barred) and not (single and q == 1):
            yield q
        q += m


def crt_q_search(
    primes: Sequence[int | SplitPrimeHit],
    c: int,
    n_max: int,
    allow_repeated: frozenset[int] = frozenset(),
    trial_bound: int = TRIAL_BOUND,
    rho_iterations: int = RHO_ITERATIONS,
    seed: int = 0,
    constraints: Sequence[PrimeConstraint] | None = None,
) -> QSearchResult:
    """Test every n = q * prod(primes) ≤ n_max compatible with the forced congruences.

    Split primes may be passed as their :class:`SplitPrimeHit`.  ``constraints``
    short-circuits the per-prime order computations when the caller has them.
    """
    if not primes:
        raise ValueError("crt_q_search needs at least one prime")
    hits = {x.p: x for x in primes if isinstance(x, SplitPrimeHit)}
    plist = tuple(x.p if isinstance(x, SplitPrimeHit) else x for x in primes)
    if len(set(plist)) != len(plist):
        raise ValueError(f"repeated prime in factor set {plist}")
    if constraints is None:
        constraints = [
            prime_constraint(p, c, hits.get(p), trial_bound, rho_iterations, seed) for p in plist
        ]
    combined = q_constraint(constraints)
    if not isinstance(combined, CrtConstraint):
        return QSearchResult(plist, c, n_max, PROVEN_EMPTY, certificate=combined)

    result = QSearchResult(plist, c, n_max, ENUMERATED, constraint=combined)
    base = math.prod(plist)
    for q in candidate_q(plist, combined, n_max // base, allow_repeated):
        result.candidates += 1
        n = q * base
        if jacobi(c, n) != -1:
            result.not_applicable += 1
            continue
        try:
            verdict = frobenius_test_abc(n, 1, 1, c, trial_bound, rho_iterations, seed)
        except PreconditionError:
            result.not_applicable += 1
            continue
        result.tested += 1
        if verdict.kind != COMPOSITE:
            result.passing.append(verdict.to_record())
    return result
