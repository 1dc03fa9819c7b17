import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from starscape.arithheight import (
    height_report, mahler_measure, naive_height, psl_height, psl_norm, psl_reduce_quadratic,
    root_discriminant, verify_height_inequalities, weil_height,
)
from starscape.hypgeo import act, translation, S, T, random_word
from starscape.polylattice import content_normalize, discriminant, is_minimal
from starscape.rootfind import upper_root

LEHMER = content_normalize((1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1))
PHI = (1 + math.sqrt(5)) / 2


def test_naive_height_examples():
    assert naive_height(content_normalize((1, 0, 1, -1))) == 1
    assert naive_height(content_normalize((3, -5, 7))) == 7
    assert naive_height(LEHMER) == 1


def test_mahler_examples():
    assert abs(mahler_measure(LEHMER) - 1.176280818) < 1e-6
    assert abs(mahler_measure(content_normalize((1, -1, -1))) - PHI) < 1e-10
    assert abs(mahler_measure(content_normalize((1, 1, 1))) - 1.0) < 1e-12


def test_mahler_lehmer_against_mpmath():
    import mpmath

    with mpmath.workdps(40):
        rts = mpmath.polyroots(list(LEHMER.coeffs), maxsteps=200, extraprec=200)
        ref = mpmath.fprod(max(1, abs(r)) for r in rts)
    assert abs(mahler_measure(LEHMER) - float(ref)) < 1e-12


def test_weil_examples():
    assert abs(weil_height(content_normalize((1, -1, -1))) - math.sqrt(PHI)) < 1e-10
    assert weil_height(content_normalize((1, -2))) == 2.0
    assert weil_height(content_normalize((1, 0, 1))) == 1.0
    with pytest.raises(ValueError):
        weil_height(content_normalize((1, 0, -1)))


def test_root_discriminant_examples():
    assert root_discriminant(content_normalize((1, 0, 1))) == 2.0
    assert abs(root_discriminant(content_normalize((1, 0, 1, 1))) - 31 ** (1 / 3)) < 1e-12
    p = content_normalize((3, 1, -4, 2))
    assert root_discriminant(p) == root_discriminant(content_normalize((-3, -1, 4, -2)))
    with pytest.raises(ValueError):
        root_discriminant(content_normalize((1, -2, 1)))


def _in_fundamental_domain(z: complex) -> bool:
    return -0.5 < z.real <= 0.5 and abs(z) >= 1 - 1e-12 and not (
        abs(abs(z) - 1) < 1e-12 and z.real < 0)


def test_psl_reduce_examples():
    red, A = psl_reduce_quadratic(content_normalize((1, 10, 26)))
    assert red.coeffs == (1, 0, 1)
    assert A.same_as(translation(5))
    red, A = psl_reduce_quadratic(content_normalize((1, 0, 1)))
    assert red.coeffs == (1, 0, 1)
    red, A = psl_reduce_quadratic(content_normalize((2, 2, 1)))
    assert red.coeffs == (1, 0, 1)
    assert discriminant(red) == -4
    with pytest.raises(ValueError):
        psl_reduce_quadratic(content_normalize((1, 0, -2)))


def _orbit_min_height(p, depth=6):
    """Brute-force oracle: smallest naive height over words in S, T, T^-1."""
    best = naive_height(p)
    frontier = {p.coeffs}
    seen = set(frontier)
    for _ in range(depth):
        nxt = set()
        for c in frontier:
            for g in (S, T, T.inverse()):
                q = act(g, c).coeffs
                if q not in seen:
                    seen.add(q)
                    nxt.add(q)
                    best = min(best, max(abs(v) for v in q))
        frontier = nxt
    return best


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 15), st.integers(-15, 15), st.integers(1, 15))
def test_psl_reduce_properties(a, b, c):
    if b * b - 4 * a * c >= 0:
        return
    p = content_normalize((a, b, c))
    red, A = psl_reduce_quadratic(p)
    assert discriminant(red) == discriminant(p)
    assert act(A, p) == red
    assert _in_fundamental_domain(upper_root(red))
    assert naive_height(red) <= naive_height(p)


def test_psl_height_matches_orbit_oracle():
    rng = random.Random(8)
    for _ in range(60):
        a, b, c = rng.randint(1, 6), rng.randint(-6, 6), rng.randint(1, 6)
        if b * b - 4 * a * c >= 0:
            continue
        base = content_normalize((a, b, c))
        p = act(random_word(rng, 5), base)
        assert psl_height(p) == _orbit_min_height(p, depth=8)


def test_height_report_fields():
    rep = height_report(content_normalize((1, 0, 1, 1)))
    assert rep.naive == 1 and rep.abs_disc == 31
    assert abs(rep.weil - rep.mahler ** (1 / 3)) < 1e-15
    assert rep.psl_naive is None
    q = height_report(content_normalize((2, 2, 1)))
    assert q.psl_naive == 1 and set(q.as_dict()) >= {"naive", "mahler", "weil"}


def test_inequality_examples():
    rep = verify_height_inequalities(content_normalize((1, 0, 1)))
    assert rep.ok
    assert rep.margins["disc_le_12h2"] == 12 - 4
    assert rep.margins["disc_ge_3h"] == 4 - 3
    golden = verify_height_inequalities(content_normalize((1, -1, -1)))
    assert golden.ok
    assert abs(golden.margins["mahler_upper"] - (math.sqrt(3) - PHI)) < 1e-8  # includes the 1e-9 relative slack
    cubic = verify_height_inequalities(content_normalize((1, 0, 1, 1)))
    assert cubic.margins["disc_upper"] == 27 * 16 - 31


def test_reduced_quadratic_lemma_exhaustive():
    """|D| >= 3 H and |D| >= 3 H^2 / N for every reduced form with |D| <= 10^4."""
    count = 0
    for d in range(3, 10_001):
        if d % 4 not in (0, 3):
            continue
        amax = int(math.isqrt(d // 3))
        for a in range(1, amax + 1):
            for b in range(-a + 1, a + 1):
                if (d + b * b) % (4 * a):
                    continue
                c = (d + b * b) // (4 * a)
                if c < a or (c == a and b < 0):
                    continue
                if math.gcd(math.gcd(a, b), c) != 1:
                    continue
                h = max(a, abs(b), c)
                assert d >= 3 * h
                assert d * c >= 3 * h * h * a
                count += 1
    assert count > 10_000


def test_mahler_multiplicative():
    rng = random.Random(9)
    for _ in range(100):
        f = [rng.randint(1, 9), rng.randint(-9, 9), rng.randint(-9, 9)]
        g = [rng.randint(1, 9), rng.randint(-9, 9), rng.randint(-9, 9)]
        prod = [int(v) for v in np.polymul(f, g)]
        pf = content_normalize(f)
        pg = content_normalize(g)
        scale = math.gcd(*f) * math.gcd(*g) // math.gcd(*prod)
        lhs = mahler_measure(content_normalize(prod))
        rhs = mahler_measure(pf) * mahler_measure(pg)
        assert abs(lhs * scale - rhs) <= 1e-8 * rhs


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=3, max_size=5).filter(lambda v: v[0] != 0))
def test_inequalities_property(v):
    p = content_normalize(v)
    if not is_minimal(p):
        return
    assert verify_height_inequalities(p).ok
