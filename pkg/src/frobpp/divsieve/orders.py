"""Multiplicative orders in (Z_p[√c])*."""

from __future__ import annotations

from dataclasses import dataclass

from ..ntkernel import (
    RHO_ITERATIONS,
    TRIAL_BOUND,
    FactorizationIncomplete,
    factorize,
    jacobi,
    order_from_factors,
)
from ..quadring import ModularQuadratic, pow_mod


@dataclass(frozen=True)
class OrderRecord:
    element: tuple[int, int]
    c: int
    p: int
    order: int
    group_order: int
    group_factors: tuple[tuple[int, int], ...]


def _merge(*factor_lists) -> tuple[tuple[int, int], ...]:
    merged: dict[int, int] = {}
    for fl in factor_lists:
        for p, e in fl:
            merged[p] = merged.get(p, 0) + e
    return tuple(sorted(merged.items()))


def group_exponent(
    p: int, c: int, trial_bound: int = TRIAL_BOUND, rho_iterations: int = RHO_ITERATIONS, seed: int = 0
) -> tuple[int, tuple[tuple[int, int], ...]]:
    """A multiple of every element order in (Z_p[√c])*, with its factorization.

    p² − 1 when c is a non-residue (the field GF(p²)), p − 1 when Z_p[√c]
    splits, p(p − 1) when p divides c.
    """
    j = jacobi(c, p)
    fm = factorize(p - 1, trial_bound, rho_iterations, seed)
    if not fm.complete:
        raise FactorizationIncomplete(fm)
    if j == 1:
        return p - 1, fm.factors
    if j == 0:
        return p * (p - 1), _merge(fm.factors, ((p, 1),))
    fp = factorize(p + 1, trial_bound, rho_iterations, seed)
    if not fp.complete:
        raise FactorizationIncomplete(fp)
    return p * p - 1, _merge(fm.factors, fp.factors)


def ord_quad(
    z: ModularQuadratic,
    trial_bound: int = TRIAL_BOUND,
    rho_iterations: int = RHO_ITERATIONS,
    seed: int = 0,
    exponent: tuple[int, tuple[tuple[int, int], ...]] | None = None,
) -> OrderRecord:
    """Order of z in (Z_p[√c])* for prime p = z.n.

    ``exponent`` may carry a precomputed :func:`group_exponent` result.
    """
    p, c = z.n, z.c
    if z.norm() % p == 0:
        raise ValueError(f"{z} is not a unit")
    g, factors = exponent or group_exponent(p, c, trial_bound, rho_iterations, seed)
    order = order_from_factors(lambda k: pow_mod(z.a, z.b, c, k, p) == (1, 0), g, factors)
    return OrderRecord((z.a, z.b), c, p, order, g, factors)
