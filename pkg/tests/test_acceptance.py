"""Acceptance gate: one group of tests per criterion, each at its stated tolerance.

The terminal summary prints one PASS/FAIL line per criterion (see conftest.py).
"""

import json
import math
import random

import pytest

from frobpp.divsieve.crtsearch import candidate_q, prime_constraint, q_constraint
from frobpp.divsieve.gcdcand import gcd_candidates
from frobpp.divsieve.pipeline import cofactor_sweep, default_c_values
from frobpp.divsieve.report import ScanReport, merge_reports
from frobpp.divsieve.scans import check_split_prime, q_admissible, scan_prime_power, scan_split_primes
from frobpp.frobtest import COMPOSITE, PROBABLE_PRIME, count_liars, frobenius_test, frobenius_test_abc, sweep
from frobpp.ntkernel import CrtConstraint, Incompatible, crt_combine, jacobi, mult_order, primes_in_range, sqrt_mod
from frobpp.quadring import ModularQuadratic, QuadraticInteger, qmul, qpow, qpow_exact, split, unsplit
from frobpp.verify import verify_record

C1 = pytest.mark.criterion(1, "(1+√3)^7 at n = 7")
C2 = pytest.mark.criterion(2, "(1+√5)^5778 mod 5777")
C3 = pytest.mark.criterion(3, "liar census for n = 595, c = 3")
C4 = pytest.mark.criterion(4, "gcd candidates for q = 31, 37")
C5 = pytest.mark.criterion(5, "split-prime scans at reduced bounds")
C6 = pytest.mark.criterion(6, "prime-power scan empty for c < 128, p <= 10^6")
C7 = pytest.mark.criterion(7, "soundness sweep")
C8 = pytest.mark.criterion(8, "gcd-candidate cofactors q <= 2^12")
C9 = pytest.mark.criterion(9, "CRT enumeration vs brute force")
C10 = pytest.mark.criterion(10, "property suites")


def _slow_pow(a, b, c, e, m):
    ra, rb = 1, 0
    while e:
        if e & 1:
            ra, rb = (ra * a + rb * b * c) % m, (ra * b + rb * a) % m
        a, b = (a * a + b * b * c) % m, (2 * a * b) % m
        e >>= 1
    return ra, rb


# 1 ---------------------------------------------------------------------------


@C1
def test_seven():
    v = frobenius_test(7)
    assert v.kind == PROBABLE_PRIME and v.c_used == 3
    assert qpow(ModularQuadratic(1, 1, 7, 3), 7) == ModularQuadratic(1, -1, 7, 3)
    assert qpow_exact(QuadraticInteger(1, 1, 3), 7) == QuadraticInteger(568, 328, 3)


# 2 ---------------------------------------------------------------------------


@C2
def test_5777():
    assert qpow(ModularQuadratic(1, 1, 5777, 5), 5778).as_tuple()[:2] == (5342, 0)
    assert frobenius_test_abc(5777, 1, 1, 5).kind == COMPOSITE


# 3 ---------------------------------------------------------------------------


@C3
def test_liars_595():
    census = count_liars(595, 3)
    print(f"liars={census.liar_count} coprime={census.coprime_liar_count}")
    assert (census.liar_count, census.coprime_liar_count) == (200, 0)


# 4 ---------------------------------------------------------------------------


@C4
def test_gcd_examples():
    rep = gcd_candidates(31, 1, 1, 5)
    assert rep.gcd_value == 104005 and rep.candidate_primes == (5, 11, 31, 61)
    rep = gcd_candidates(37, 1, 1, 5)
    assert rep.gcd_value == 148 and rep.candidate_primes == (2, 37)
    z = QuadraticInteger(1, 1, 5)
    assert qpow_exact(z, 30) == QuadraticInteger(998847258034176, 446698073620480, 5)
    assert qpow_exact(z, 38) == QuadraticInteger(12012687213792854016, 5372237040496672768, 5)


# 5 ---------------------------------------------------------------------------


@C5
@pytest.mark.parametrize("c, hi, expected", [(5, 10**5, [61681]), (7, 10**4, [31, 3923]), (3, 10**6, [])])
def test_split_scans(c, hi, expected):
    rep = scan_split_primes([c], 3, hi)
    assert rep.complete and not rep.skipped
    assert rep.hit_primes(c) == expected


# 6 ---------------------------------------------------------------------------


@C6
@pytest.mark.slow
def test_prime_power_scan_empty():
    rep = scan_prime_power(default_c_values(128), 3, 10**6)
    assert rep.complete
    print("prime-power hits:", [(h["p"], h["c"]) for h in rep.hits])
    assert rep.hits == []


# 7 ---------------------------------------------------------------------------


@C7
@pytest.mark.slow
def test_soundness_sweep():
    primes = sweep(3, 10**5)
    assert primes.probable_primes == list(primes_in_range(3, 10**5))
    res = sweep(9, 10**6)
    assert res.flagged == [] and res.cutoff_exceeded == []
    assert res.counts["fpp_certificate"] == res.counts["fpp_unconfirmed"] == 0
    assert res.probable_primes == list(primes_in_range(9, 10**6))
    odd_composites = (10**6 - 9) // 2 + 1 - len(res.probable_primes)
    assert res.counts["composite"] == odd_composites


# 8 ---------------------------------------------------------------------------


@C8
@pytest.mark.slow
def test_reduced_cofactor_sweep():
    out = cofactor_sweep(1 << 12, default_c_values(128))
    assert out["q_range"] == [3, 1 << 12]
    assert out["unverified"] == []
    assert out["tested"] > 0
    assert out["passing"] == []


# 9 ---------------------------------------------------------------------------


@C9
def test_crt_stream_matches_brute_force():
    rng = random.Random(9)
    primes = list(primes_in_range(3, 500))
    c_values = default_c_values(128)
    done = 0
    while done < 20:
        p, c = rng.choice(primes), rng.choice(c_values)
        if jacobi(c, p) != -1:
            continue
        combined = q_constraint([prime_constraint(p, c)])
        got = list(candidate_q([p], combined, 10**4))
        brute = [q for q in range(3, 10**4 + 1, 2) if q % p and _slow_pow(1, 1, c, q - 1, p) == (1, 0)]
        assert got == brute, (p, c)
        done += 1


@C9
def test_crt_combine_exhaustive():
    rng = random.Random(99)
    for _ in range(400):
        k = rng.randint(1, 3)
        mods = [rng.randint(1, 60) for _ in range(k)]
        if math.prod(mods) > 10**5:
            continue
        cons = [CrtConstraint(rng.randrange(m), m) for m in mods]
        m = math.lcm(*mods)
        sols = [x for x in range(m) if all(x % cc.modulus == cc.residue for cc in cons)]
        got = crt_combine(cons)
        if sols:
            assert got == CrtConstraint(sols[0], m) and len(sols) == 1
        else:
            assert isinstance(got, Incompatible)


# 10 --------------------------------------------------------------------------


@C10
def test_frobenius_automorphism():
    rng = random.Random(10)
    primes = list(primes_in_range(3, 10**6))
    checked = 0
    while checked < 500:
        p, c = rng.choice(primes), rng.choice([2, 3, 5, 6, 7, 10, 11, 13])
        if jacobi(c, p) != -1:
            continue
        z = ModularQuadratic(rng.randrange(1, p), rng.randrange(p), p, c)
        assert qpow(z, p) == z.conjugate()
        checked += 1


@C10
def test_split_isomorphism_exhaustive():
    for p in primes_in_range(3, 101):
        for c in (2, 3, 5, 6, 7, 10, 11):
            if jacobi(c, p) != 1:
                continue
            d = sqrt_mod(c, p)
            elems = [ModularQuadratic(a, b, p, c) for a in range(p) for b in range(p)]
            images = {split(z, d) for z in elems}
            assert len(images) == p * p
            basis = [ModularQuadratic(1, 0, p, c), ModularQuadratic(0, 1, p, c)]
            for z in elems:
                w = split(z, d)
                assert unsplit(w, c) == z
                assert w.w1 == (z.a + z.b * d) % p and w.w2 == (z.a - z.b * d) % p
            for x in basis:
                for y in basis:
                    assert split(qmul(x, y), d) == split(x, d) * split(y, d)


@C10
def test_norm_multiplicativity():
    rng = random.Random(11)
    for _ in range(2000):
        n, c = 2 * rng.randrange(1, 10**6) + 1, rng.choice([2, 3, 5, 7, 11, 13])
        x = ModularQuadratic(rng.randrange(n), rng.randrange(n), n, c)
        y = ModularQuadratic(rng.randrange(n), rng.randrange(n), n, c)
        assert qmul(x, y).norm() == x.norm() * y.norm() % n


@C10
def test_admissibility_periodicity():
    rng = random.Random(12)
    hits = []
    for c in default_c_values(32):
        for p in primes_in_range(3, 20000):
            if jacobi(c, p) == 1 and check_split_prime(p, c):
                hits.append((p, c))
    assert hits
    for p, c in hits:
        r = mult_order((1 + sqrt_mod(c, p)) % p, p)
        for _ in range(10):
            q = rng.randrange(1, 10**9)
            assert q_admissible(p, c, q) == q_admissible(p, c, q + rng.randrange(1, 10**3) * r)


@C10
def test_merge_determinism():
    kw = dict(segment_size=1 << 12)
    parts = [scan_split_primes([5, 7, 11], lo, hi, **kw) for lo, hi in
             [(3, 4095), (4096, 12287), (12288, 30000)]]
    a, b, c = parts
    whole = scan_split_primes([5, 7, 11], 3, 30000, **kw)
    orders = [merge_reports(merge_reports(a, b), c), merge_reports(a, merge_reports(b, c)),
              merge_reports(merge_reports(c, a), b), merge_reports(b, merge_reports(c, a))]
    assert {r.to_json() for r in orders} == {whole.to_json()}


@C10
def test_verify_round_trip():
    rep = scan_split_primes(default_c_values(32), 3, 50000)
    rec = json.loads(rep.to_json())
    assert verify_record(rec).ok
    power = ScanReport.from_record(json.loads(scan_prime_power([83], 3, 1000).to_json()))
    assert verify_record(power.to_record()).ok
