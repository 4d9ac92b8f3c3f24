import math

import pytest
from hypothesis import given, settings, strategies as st
from sympy import primepi
from sympy.ntheory import factorint, isprime

from frobpp.ntkernel import (
    CrtConstraint,
    FactorizationIncomplete,
    Incompatible,
    crt_combine,
    factorize,
    is_perfect_square,
    is_probable_prime,
    jacobi,
    mult_order,
    primes_in_range,
    solve_linear,
    sqrt_mod,
)

odd_moduli = st.integers(min_value=1, max_value=10**9).map(lambda k: 2 * k + 1)


@pytest.mark.parametrize(
    "a, n, expected",
    [(3, 7, -1), (5, 31, 1), (0, 9, 0), (5, 37, -1), (3, 5777, -1), (1, 1, 1)],
)
def test_jacobi_examples(a, n, expected):
    assert jacobi(a, n) == expected


@pytest.mark.parametrize("n", [0, -3, 4, 10])
def test_jacobi_rejects_bad_modulus(n):
    with pytest.raises(ValueError):
        jacobi(3, n)


@given(st.integers(-10**12, 10**12), st.integers(-10**12, 10**12), odd_moduli)
def test_jacobi_multiplicative(a, b, n):
    assert jacobi(a * b, n) == jacobi(a, n) * jacobi(b, n)


@given(st.integers(-10**12, 10**12), odd_moduli)
def test_jacobi_zero_iff_shared_factor(a, n):
    assert (jacobi(a, n) == 0) == (math.gcd(a, n) > 1)


@settings(max_examples=200)
@given(st.sampled_from(list(primes_in_range(3, 20000))), st.integers(1, 10**9))
def test_jacobi_euler_criterion(p, a):
    if a % p == 0:
        return
    assert jacobi(a, p) % p == pow(a, (p - 1) // 2, p)


@pytest.mark.parametrize("n, expected", [(49, True), (5777, False), (0, True), (1, True), (2, False)])
def test_is_perfect_square(n, expected):
    assert is_perfect_square(n) is expected


@given(st.integers(0, 10**30))
def test_is_perfect_square_matches_isqrt(n):
    assert is_perfect_square(n * n)
    assert is_perfect_square(n * n + 1) == (n == 0)


def test_factorize_known_gcds():
    assert factorize(104005).as_dict() == {5: 1, 11: 1, 31: 1, 61: 1}
    assert factorize(104005).cofactor == 1
    assert factorize(148).as_dict() == {2: 2, 37: 1}
    one = factorize(1)
    assert one.factors == () and one.cofactor == 1


def _spf_table(limit):
    spf = list(range(limit + 1))
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == p:
            for m in range(p * p, limit + 1, p):
                if spf[m] == m:
                    spf[m] = p
    return spf


def test_factorize_reassembles_below_a_million():
    limit = 10**6
    spf = _spf_table(limit)
    for n in range(1, limit + 1):
        fac = factorize(n)
        expected = {}
        m = n
        while m > 1:
            expected[spf[m]] = expected.get(spf[m], 0) + 1
            m //= spf[m]
        assert fac.as_dict() == expected, n
        assert fac.cofactor == 1


def test_factorize_beyond_trial_bound_uses_rho():
    p, q = 1_000_000_007, 998_244_353
    fac = factorize(p * q * 12, trial_bound=1000)
    assert fac.as_dict() == {2: 2, 3: 1, p: 1, q: 1}
    assert fac.reassemble() == p * q * 12


def test_factorize_budget_exhaustion_keeps_cofactor():
    p, q = 2**61 - 1, 2**89 - 1
    fac = factorize(p * q, trial_bound=100, rho_iterations=10)
    assert fac.cofactor == p * q
    assert not fac.complete
    assert fac.reassemble() == p * q


def test_factorize_is_seed_deterministic():
    n = 1_000_003 * 1_000_033 * 999_983**2
    runs = {factorize(n, trial_bound=100, seed=7) for _ in range(3)}
    assert len(runs) == 1
    assert factorize(n, trial_bound=100, seed=7).as_dict() == factorint(n)


@given(st.integers(2, 10**18))
@settings(max_examples=100, deadline=None)
def test_factorize_agrees_with_sympy(n):
    fac = factorize(n)
    assert fac.complete
    assert fac.as_dict() == factorint(n)


@given(st.integers(0, 10**20))
@settings(max_examples=300)
def test_is_probable_prime_matches_sympy(n):
    assert is_probable_prime(n) == isprime(n)


def test_sqrt_mod_examples():
    roots = [d for d in range(31) if d * d % 31 == 5]
    assert roots == [6, 25]
    assert sqrt_mod(5, 31) == min(roots)
    assert sqrt_mod(4, 7) == 2
    with pytest.raises(ValueError):
        sqrt_mod(3, 7)


@settings(max_examples=200)
@given(st.sampled_from(list(primes_in_range(3, 50000))), st.integers(1, 10**6))
def test_sqrt_mod_canonical_root(p, x):
    c = x * x % p
    if c == 0:
        return
    d = sqrt_mod(c, p)
    assert d * d % p == c
    assert d <= p - d


def test_mult_order_examples():
    assert [pow(2, k, 7) for k in (1, 2, 3)] == [2, 4, 1]
    assert mult_order(2, 7) == 3
    for p in (3, 7, 61681):
        assert mult_order(1, p) == 1
        assert mult_order(p - 1, p) == 2


@settings(max_examples=150)
@given(st.sampled_from(list(primes_in_range(3, 10**6))), st.integers(1, 10**9))
def test_mult_order_properties(p, w):
    if w % p == 0:
        return
    k = mult_order(w, p)
    assert (p - 1) % k == 0
    assert pow(w, k, p) == 1
    for ell in factorint(k):
        assert pow(w, k // ell, p) != 1


def test_mult_order_needs_factorization():
    p = 2**127 - 1
    with pytest.raises(FactorizationIncomplete):
        mult_order(3, p, trial_bound=10, rho_iterations=5)


def test_crt_examples():
    assert [x for x in range(15) if x % 3 == 1 and x % 5 == 2] == [7]
    assert crt_combine([CrtConstraint(1, 3), CrtConstraint(2, 5)]) == CrtConstraint(7, 15)
    clash = crt_combine([CrtConstraint(1, 4), CrtConstraint(3, 4)])
    assert isinstance(clash, Incompatible) and not clash
    assert clash.gcd == 4


@pytest.mark.parametrize("og, od", [(4, 6), (5, 3), (6, 9), (10, 4), (12, 8)])
def test_crt_plus_minus_one_needs_gcd_dividing_two(og, od):
    combined = crt_combine([CrtConstraint(-1 % og, og), CrtConstraint(1 % od, od)])
    assert bool(combined) == (2 % math.gcd(og, od) == 0)


def _brute_crt(cons):
    m = math.lcm(*(c.modulus for c in cons))
    sols = [x for x in range(m) if all(x % c.modulus == c.residue for c in cons)]
    return sols, m


@given(st.lists(st.tuples(st.integers(0, 10**4), st.integers(1, 60)), min_size=1, max_size=4))
@settings(max_examples=300)
def test_crt_combine_matches_exhaustive_search(pairs):
    cons = [CrtConstraint(r % m, m) for r, m in pairs]
    if math.prod(c.modulus for c in cons) > 10**5:
        return
    sols, m = _brute_crt(cons)
    got = crt_combine(cons)
    if sols:
        assert got == CrtConstraint(sols[0], m)
        assert len(sols) == 1
    else:
        assert isinstance(got, Incompatible)


@given(st.integers(1, 500), st.integers(0, 500), st.integers(1, 500))
def test_solve_linear_matches_brute_force(a, r, m):
    target = CrtConstraint(r % m, m)
    sols = [x for x in range(m) if a * x % m == target.residue]
    got = solve_linear(a, target)
    if not sols:
        assert isinstance(got, Incompatible)
    else:
        assert sorted(x for x in range(m) if got.holds(x)) == sols


def test_primes_in_range_examples():
    assert list(primes_in_range(2, 10)) == [2, 3, 5, 7]
    assert list(primes_in_range(61680, 61682)) == [61681]
    assert sum(1 for _ in primes_in_range(2, 10**6)) == 78498 == int(primepi(10**6))


@given(st.integers(2, 10**7), st.integers(0, 3000), st.integers(10, 500))
@settings(max_examples=100)
def test_primes_in_range_small_segments(lo, width, segment):
    hi = lo + width
    assert list(primes_in_range(lo, hi, segment=segment)) == [n for n in range(lo, hi + 1) if isprime(n)]
