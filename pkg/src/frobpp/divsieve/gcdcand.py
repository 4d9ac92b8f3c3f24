"""Candidate prime factors p of an FPP n = p*q from the gcd of the coordinates of z**(q∓1)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

from ..ntkernel import RHO_ITERATIONS, TRIAL_BOUND, factorize, jacobi
from ..quadring import EXACT_POWER_BOUND, QuadraticInteger, qpow_exact

MINUS = "minus"
PLUS = "plus"


@dataclass(frozen=True)
class GcdCandidateReport:
    q: int
    a: int
    b: int
    c: int
    branch: str
    gcd_value: int
    candidate_primes: tuple[int, ...]
    viable_primes: tuple[int, ...]
    unfactored_cofactor: int = 1

    @property
    def exponent(self) -> int:
        return self.q - 1 if self.branch == MINUS else self.q + 1

    def to_record(self) -> dict[str, Any]:
        return {
            "q": self.q,
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "branch": self.branch,
            "gcd_value": str(self.gcd_value),
            "candidate_primes": list(self.candidate_primes),
            "viable_primes": list(self.viable_primes),
            "unfactored_cofactor": str(self.unfactored_cofactor),
        }


def gcd_value(q: int, a: int, b: int, c: int, bound: int = EXACT_POWER_BOUND) -> tuple[str, int]:
    """(branch, gcd) for cofactor q.

    If (c/q) = +1 the hidden prime p has (c/p) = −1 and divides
    gcd(a_{q−1} − 1, b_{q−1}); if (c/q) = −1 it has (c/p) = +1 and divides
    gcd(a_{q+1} − N(z), b_{q+1}).
    """
    if q < 3 or q % 2 == 0:
        raise ValueError(f"q must be odd and >= 3, got {q}")
    j = jacobi(c, q)
    if j == 0:
        raise ValueError(f"gcd({c}, {q}) > 1: q shares a factor with c")
    z = QuadraticInteger(a, b, c)
    if j == 1:
        w = qpow_exact(z, q - 1, bound)
        return MINUS, math.gcd(w.a - 1, w.b)
    w = qpow_exact(z, q + 1, bound)
    return PLUS, math.gcd(w.a - z.norm(), w.b)


def gcd_candidates(
    q: int,
    a: int,
    b: int,
    c: int,
    bound: int = EXACT_POWER_BOUND,
    trial_bound: int = TRIAL_BOUND,
    rho_iterations: int = RHO_ITERATIONS,
    seed: int = 0,
) -> GcdCandidateReport:
    branch, g = gcd_value(q, a, b, c, bound)
    fac = factorize(g, trial_bound, rho_iterations, seed) if g else None
    raw = tuple(fac.primes) if fac else ()
    viable = tuple(p for p in raw if p != 2 and (q * c) % p)
    return GcdCandidateReport(q, a, b, c, branch, g, raw, viable, fac.cofactor if fac else 0)
