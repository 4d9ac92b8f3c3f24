"""Number-theory kernel.

Jacobi symbol, probable-prime checks, budgeted factorization, CRT,
modular square roots and multiplicative orders in Z_p*.  Everything here is
a pure function of its arguments (plus an explicit seed where randomness is
involved).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

TRIAL_BOUND = 10**6
RHO_ITERATIONS = 200_000
SEGMENT_SIZE = 1 << 18


class FactorizationIncomplete(ArithmeticError):
    """Raised when an operation needs a complete factorization it cannot get."""

    def __init__(self, factorization: "Factorization"):
        super().__init__(
            f"could not fully factor {factorization.value}: "
            f"cofactor {factorization.cofactor} left over"
        )
        self.factorization = factorization


# --------------------------------------------------------------------------
# small helpers


def is_perfect_square(n: int) -> bool:
    if n < 0:
        raise ValueError("is_perfect_square expects n >= 0")
    r = math.isqrt(n)
    return r * r == n


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise ValueError(f"jacobi needs an odd positive modulus, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _simple_sieve(limit: int) -> list[int]:
    if limit < 2:
        return []
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = bytes(len(range(p * p, limit + 1, p)))
    return [i for i, f in enumerate(flags) if f]


def primes_in_range(lo: int, hi: int, segment: int = SEGMENT_SIZE) -> Iterator[int]:
    """Yield the primes in [lo, hi] in ascending order.

    Segmented sieve: memory is O(segment + sqrt(hi)).
    """
    if lo < 2 or lo > hi:
        raise ValueError(f"need 2 <= lo <= hi, got lo={lo}, hi={hi}")
    base = _simple_sieve(math.isqrt(hi))
    start = lo
    while start <= hi:
        stop = min(start + segment, hi + 1)
        flags = bytearray([1]) * (stop - start)
        for p in base:
            pp = p * p
            if pp >= stop:
                break
            first = max(pp, -(-start // p) * p)
            if first < stop:
                flags[first - start :: p] = bytes(len(range(first, stop, p)))
        for i, f in enumerate(flags):
            if f:
                yield start + i
        start = stop


# Deterministic Miller-Rabin witness set for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_SMALL_PRIMES = tuple(_simple_sieve(1000))


def _strong_probable_prime(n: int, a: int, d: int, s: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin with fixed bases.

    Deterministic below 3.3e24; a strong probable-prime check above that,
    which is all this package needs internally.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n < 1_000_000:
        return True
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    return all(_strong_probable_prime(n, a, d, s) for a in _MR_BASES)


# --------------------------------------------------------------------------
# factorization


@dataclass(frozen=True)
class Factorization:
    """value = cofactor * prod(p**e for p, e in factors)."""

    value: int
    factors: tuple[tuple[int, int], ...] = ()
    cofactor: int = 1

    @property
    def complete(self) -> bool:
        return self.cofactor == 1

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)

    def reassemble(self) -> int:
        out = self.cofactor
        for p, e in self.factors:
            out *= p**e
        return out


_trial_cache: dict[int, list[tuple[int, list[int]]]] = {}


def _trial_blocks(bound: int) -> list[tuple[int, list[int]]]:
    # Primes grouped in blocks with their product, so one gcd screens a block.
    blocks = _trial_cache.get(bound)
    if blocks is None:
        primes = _simple_sieve(bound)
        blocks = []
        for i in range(0, len(primes), 256):
            chunk = primes[i : i + 256]
            blocks.append((math.prod(chunk), chunk))
        _trial_cache[bound] = blocks
    return blocks


def _rho(n: int, rng: random.Random, max_iterations: int) -> int | None:
    """Brent's variant of Pollard rho. Returns a proper factor or None."""
    if n % 2 == 0:
        return 2
    spent = 0
    while spent < max_iterations:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1 and spent < max_iterations:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            spent += r
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    return None


def factorize(
    n: int,
    trial_bound: int = TRIAL_BOUND,
    rho_iterations: int = RHO_ITERATIONS,
    seed: int = 0,
) -> Factorization:
    """Factor n: trial division up to ``trial_bound``, then seeded rho.

    Whatever cannot be split within ``rho_iterations`` per composite stays in
    ``cofactor``; incompleteness is never dropped.
    """
    if n < 1:
        raise ValueError(f"factorize needs n >= 1, got {n}")
    found: dict[int, int] = {}
    m = n
    for block_product, chunk in _trial_blocks(trial_bound):
        if m == 1 or chunk[0] * chunk[0] > m:
            break
        if math.gcd(m, block_product) == 1:
            continue
        for p in chunk:
            while m % p == 0:
                m //= p
                found[p] = found.get(p, 0) + 1
    if m > 1 and (m < trial_bound * trial_bound or is_probable_prime(m)):
        # Any composite left below bound**2 would have had a factor below bound.
        found[m] = found.get(m, 0) + 1
        m = 1

    rng = random.Random(seed)
    stack = [m] if m > 1 else []
    leftover = 1
    while stack:
        x = stack.pop()
        if is_probable_prime(x):
            found[x] = found.get(x, 0) + 1
            continue
        r = math.isqrt(x)
        if r * r == x:
            stack += [r, r]
            continue
        f = _rho(x, rng, rho_iterations)
        if f is None:
            leftover *= x
        else:
            stack += [f, x // f]
    return Factorization(n, tuple(sorted(found.items())), leftover)


# --------------------------------------------------------------------------
# square roots and orders


def sqrt_mod(c: int, p: int) -> int:
    """Smaller square root of c modulo an odd prime p (Tonelli-Shanks)."""
    if jacobi(c, p) != 1:
        raise ValueError(f"{c} is not a nonzero quadratic residue mod {p}")
    c %= p
    if p % 4 == 3:
        d = pow(c, (p + 1) // 4, p)
    else:
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while jacobi(z, p) != -1:
            z += 1
        m, t, r, w = s, pow(c, q, p), pow(c, (q + 1) // 2, p), pow(z, q, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(w, 1 << (m - i - 1), p)
            m, w = i, b * b % p
            t, r = t * w % p, r * b % p
        d = r
    return min(d, p - d)


def order_from_factors(is_identity, group_order: int, factors: Iterable[tuple[int, int]]) -> int:
    """Least k | group_order with ``is_identity(k)``, by stripping prime factors.

    ``is_identity(k)`` must report whether g**k is the identity.
    """
    k = group_order
    for ell, e in factors:
        for _ in range(e):
            if k % ell == 0 and is_identity(k // ell):
                k //= ell
            else:
                break
    return k


def mult_order(
    w: int,
    p: int,
    trial_bound: int = TRIAL_BOUND,
    rho_iterations: int = RHO_ITERATIONS,
    seed: int = 0,
) -> int:
    """Multiplicative order of w modulo the odd prime p."""
    w %= p
    if w == 0:
        raise ValueError(f"{w} is not a unit mod {p}")
    fac = factorize(p - 1, trial_bound, rho_iterations, seed)
    if not fac.complete:
        raise FactorizationIncomplete(fac)
    return order_from_factors(lambda k: pow(w, k, p) == 1, p - 1, fac.factors)


# --------------------------------------------------------------------------
# CRT


@dataclass(frozen=True)
class CrtConstraint:
    """x ≡ residue (mod modulus)."""

    residue: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError(f"modulus must be positive, got {self.modulus}")
        if not 0 <= self.residue < self.modulus:
            object.__setattr__(self, "residue", self.residue % self.modulus)

    def holds(self, x: int) -> bool:
        return x % self.modulus == self.residue


@dataclass(frozen=True)
class Incompatible:
    """Two constraints that cannot hold together.

    ``gcd`` is the shared part of the moduli modulo which the residues differ.
    """

    first: CrtConstraint
    second: CrtConstraint
    gcd: int

    def __bool__(self) -> bool:
        return False


def _combine_two(x: CrtConstraint, y: CrtConstraint) -> CrtConstraint | Incompatible:
    g = math.gcd(x.modulus, y.modulus)
    if (y.residue - x.residue) % g:
        return Incompatible(x, y, g)
    m1 = x.modulus // g
    lcm = x.modulus * (y.modulus // g)
    if m1 == 1:
        return CrtConstraint(y.residue, lcm)
    # x.residue + x.modulus * t ≡ y.residue (mod y.modulus)
    t = (y.residue - x.residue) // g * pow(x.modulus // g, -1, y.modulus // g)
    return CrtConstraint((x.residue + x.modulus * t) % lcm, lcm)


def crt_combine(constraints: Sequence[CrtConstraint]) -> CrtConstraint | Incompatible:
    """Fold constraints left to right into one, or report the first clash."""
    acc = CrtConstraint(0, 1)
    for c in constraints:
        acc = _combine_two(acc, c)
        if isinstance(acc, Incompatible):
            return acc
    return acc


def solve_linear(coefficient: int, target: CrtConstraint) -> CrtConstraint | Incompatible:
    """Solve coefficient * x ≡ target.residue (mod target.modulus) for x."""
    m = target.modulus
    g = math.gcd(coefficient, m)
    if target.residue % g:
        return Incompatible(CrtConstraint(0, 1), target, g)
    m2 = m // g
    inv = pow(coefficient // g, -1, m2) if m2 > 1 else 0
    return CrtConstraint(target.residue // g * inv % m2, m2)
