"""Arithmetic in Z[√c] and Z_n[√c].

``QuadraticInteger`` is exact (unbounded coordinates), ``ModularQuadratic``
keeps both coordinates reduced into [0, n).  When c is a square mod a prime p
the ring Z_p[√c] splits as Z_p × Z_p via a + b√c ↦ (a + bd, a − bd); see
:func:`split`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .ntkernel import TRIAL_BOUND, _simple_sieve, jacobi

EXACT_POWER_BOUND = 1 << 20
_FULL_SQUAREFREE_CHECK = 1 << 20


def is_squarefree(c: int) -> bool:
    """Exact below 2**20; above that only squares of primes up to the trial bound are screened."""
    if c < 1:
        return False
    limit = math.isqrt(c) if c < _FULL_SQUAREFREE_CHECK else min(math.isqrt(c), TRIAL_BOUND)
    for p in _simple_sieve(limit):
        if c % (p * p) == 0:
            return False
    return True


def _check_radicand(c: int) -> None:
    if c < 2 or not is_squarefree(c):
        raise ValueError(f"radicand must be a square-free integer >= 2, got {c}")


@dataclass(frozen=True)
class QuadraticInteger:
    """Exact element a + b√c."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        _check_radicand(self.c)

    def __mul__(self, other: "QuadraticInteger") -> "QuadraticInteger":
        if other.c != self.c:
            raise ValueError(f"radicand mismatch: {self.c} vs {other.c}")
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        return QuadraticInteger(a1 * a2 + b1 * b2 * self.c, a1 * b2 + a2 * b1, self.c)

    def conjugate(self) -> "QuadraticInteger":
        return QuadraticInteger(self.a, -self.b, self.c)

    def norm(self) -> int:
        return self.a * self.a - self.b * self.b * self.c

    def reduce(self, n: int) -> "ModularQuadratic":
        return ModularQuadratic(self.a, self.b, n, self.c)

    def __str__(self) -> str:
        return f"{self.a}+{self.b}*sqrt({self.c})"


@dataclass(frozen=True)
class ModularQuadratic:
    """Element a + b√c of Z_n[√c]; coordinates are normalized into [0, n)."""

    a: int
    b: int
    n: int
    c: int

    def __post_init__(self):
        if self.n < 3 or self.n % 2 == 0:
            raise ValueError(f"modulus must be odd and >= 3, got {self.n}")
        _check_radicand(self.c)
        object.__setattr__(self, "a", self.a % self.n)
        object.__setattr__(self, "b", self.b % self.n)

    @classmethod
    def one(cls, n: int, c: int) -> "ModularQuadratic":
        return cls(1, 0, n, c)

    def _same_ring(self, other: "ModularQuadratic") -> None:
        if self.n != other.n or self.c != other.c:
            raise ValueError(
                f"ring mismatch: Z_{self.n}[√{self.c}] vs Z_{other.n}[√{other.c}]"
            )

    def __mul__(self, other: "ModularQuadratic") -> "ModularQuadratic":
        return qmul(self, other)

    def __pow__(self, e: int) -> "ModularQuadratic":
        return qpow(self, e)

    def conjugate(self) -> "ModularQuadratic":
        return ModularQuadratic(self.a, -self.b, self.n, self.c)

    def norm(self) -> int:
        return (self.a * self.a - self.b * self.b * self.c) % self.n

    def is_one(self) -> bool:
        return self.a == 1 % self.n and self.b == 0

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.n)

    def __str__(self) -> str:
        return f"{self.a}+{self.b}*sqrt({self.c}) mod {self.n}"


def qmul(x: ModularQuadratic, y: ModularQuadratic) -> ModularQuadratic:
    x._same_ring(y)
    n, c = x.n, x.c
    return ModularQuadratic(
        (x.a * y.a + x.b * y.b * c) % n, (x.a * y.b + x.b * y.a) % n, n, c
    )


def _pow_coords(a: int, b: int, e: int, c: int, n: int) -> tuple[int, int]:
    # Left-to-right square and multiply on bare ints; the hot loop of every scan.
    ra, rb = 1 % n, 0
    for bit in bin(e)[2:]:
        ra, rb = (ra * ra + rb * rb * c) % n, (2 * ra * rb) % n
        if bit == "1":
            ra, rb = (ra * a + rb * b * c) % n, (ra * b + rb * a) % n
    return ra, rb


def qpow(z: ModularQuadratic, e: int) -> ModularQuadratic:
    if e < 0:
        raise ValueError("negative exponent")
    if e == 0:
        return ModularQuadratic.one(z.n, z.c)
    a, b = _pow_coords(z.a, z.b, e, z.c, z.n)
    return ModularQuadratic(a, b, z.n, z.c)


def pow_mod(a: int, b: int, c: int, e: int, n: int) -> tuple[int, int]:
    """Coordinates of (a + b√c)**e mod n without building ring objects.

    Accepts any n >= 1 (including prime squares); used by the scans.
    """
    if e == 0:
        return 1 % n, 0
    return _pow_coords(a % n, b % n, e, c, n)


def qpow_exact(
    z: QuadraticInteger, k: int, bound: int = EXACT_POWER_BOUND
) -> QuadraticInteger:
    """Exact z**k.  Coordinates grow linearly in k, so k is capped by ``bound``."""
    if k < 0:
        raise ValueError("negative exponent")
    if k > bound:
        raise ValueError(f"exponent {k} exceeds the exact-power bound {bound}")
    a, b, c = z.a, z.b, z.c
    ra, rb = 1, 0
    for bit in bin(k)[2:] if k else "":
        ra, rb = ra * ra + rb * rb * c, 2 * ra * rb
        if bit == "1":
            ra, rb = ra * a + rb * b * c, ra * b + rb * a
    return QuadraticInteger(ra, rb, c)


def conjugate(z):
    return z.conjugate()


def norm(z) -> int:
    return z.norm()


@dataclass(frozen=True)
class SplitPair:
    """Image (w1, w2) = (a + bd, a − bd) of an element of Z_p[√c] in Z_p × Z_p."""

    w1: int
    w2: int
    p: int
    d: int

    def __mul__(self, other: "SplitPair") -> "SplitPair":
        if (self.p, self.d) != (other.p, other.d):
            raise ValueError("split pairs live over different (p, d)")
        return SplitPair(self.w1 * other.w1 % self.p, self.w2 * other.w2 % self.p, self.p, self.d)


def split(z: ModularQuadratic, d: int) -> SplitPair:
    p = z.n
    if jacobi(z.c, p) != 1:
        raise ValueError(f"c={z.c} is not a nonzero square mod {p}; Z_p[√c] does not split")
    if (d * d - z.c) % p:
        raise ValueError(f"{d}**2 is not {z.c} mod {p}")
    return SplitPair((z.a + z.b * d) % p, (z.a - z.b * d) % p, p, d % p)


def unsplit(w: SplitPair, c: int) -> ModularQuadratic:
    """Inverse of :func:`split`."""
    p = w.p
    inv2 = pow(2, -1, p)
    a = (w.w1 + w.w2) * inv2 % p
    b = (w.w1 - w.w2) * inv2 * pow(w.d, -1, p) % p
    return ModularQuadratic(a, b, p, c)
