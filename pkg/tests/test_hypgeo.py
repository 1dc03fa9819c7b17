import cmath
import itertools
import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from starscape.hypgeo import (
    IDENTITY, Geodesic, MobiusInt, S, T, act, apply_matrix, dist_coefs, dist_uhp,
    geodesic_endpoints, geodesic_through, inner_product, matmul, on_rational_geodesic,
    random_word, rho, tangency_map,
)
from starscape.polylattice import content_normalize, discriminant, discriminant_of
from starscape.rootfind import upper_root


def log_formula(z1, z2):
    """Oracle: ln((|z1 - conj z2| + |z1 - z2|) / (|z1 - conj z2| - |z1 - z2|))."""
    u, v = abs(z1 - z2.conjugate()), abs(z1 - z2)
    return math.log((u + v) / (u - v))


def test_dist_uhp_examples():
    assert abs(dist_uhp(1j, 2j) - math.log(2)) < 1e-15
    assert dist_uhp(1j, 1j) == 0
    assert abs(dist_uhp(1j, 1 + 1j) - math.acosh(1.5)) < 1e-15
    assert abs(math.acosh(1.5) - 0.962424) < 1e-6
    with pytest.raises(ValueError):
        dist_uhp(1j, 0.5)


@settings(max_examples=200)
@given(st.floats(-5, 5), st.floats(0.01, 5), st.floats(-5, 5), st.floats(0.01, 5))
def test_dist_uhp_matches_log_formula(x1, y1, x2, y2):
    z1, z2 = complex(x1, y1), complex(x2, y2)
    d = dist_uhp(z1, z2)
    assert d == dist_uhp(z2, z1)
    if abs(z1 - z2) > 1e-6:
        assert abs(d - log_formula(z1, z2)) < 1e-9 * max(1.0, d)


def test_inner_product_examples():
    assert inner_product((1, 0, 1), (1, 0, 1)) == -4 == discriminant(content_normalize((1, 0, 1)))
    assert inner_product((1, 0, 1), (1, 0, 2)) == -6
    rng = random.Random(0)
    for _ in range(100):
        f = [rng.randint(-9, 9) for _ in range(3)]
        g = [rng.randint(-9, 9) for _ in range(3)]
        assert inner_product(f, g) == inner_product(g, f)
        assert inner_product(f, f) == discriminant_of(f) or f[0] == f[1] == 0


def test_dist_coefs_examples():
    d = dist_coefs((1, 0, 1), (1, 0, 2))
    assert abs(d - math.acosh(6 / math.sqrt(32))) < 1e-15
    assert abs(d - math.log(math.sqrt(2))) < 1e-15
    assert abs(d - dist_uhp(1j, math.sqrt(2) * 1j)) < 1e-15
    assert dist_coefs((3, 1, 5), (3, 1, 5)) == 0
    assert abs(dist_coefs((1, 0, 1), (1, -2, 2)) - math.acosh(1.5)) < 1e-15
    with pytest.raises(ValueError):
        dist_coefs((1, 0, -1), (1, 0, 1))


@settings(max_examples=200)
@given(st.tuples(st.integers(1, 30), st.integers(-30, 30), st.integers(1, 30)),
       st.tuples(st.integers(1, 30), st.integers(-30, 30), st.integers(1, 30)),
       st.floats(0.1, 50), st.floats(-50, -0.1))
def test_dist_coefs_scaling_invariant(f1, f2, lam, mu):
    if discriminant_of(f1) >= 0 or discriminant_of(f2) >= 0:
        return
    d = dist_coefs(f1, f2)
    scaled = dist_coefs([lam * v for v in f1], [mu * v for v in f2])
    assert abs(d - scaled) < 1e-7 * max(1.0, d)
    # and it is the root distance
    assert abs(d - dist_uhp(upper_root(content_normalize(f1)),
                            upper_root(content_normalize(f2)))) < 1e-10


def test_rho_identity_and_translation():
    assert rho(IDENTITY, 2) == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert rho(IDENTITY, 3) == tuple(tuple(int(i == j) for j in range(4)) for i in range(4))
    m = rho(T, 2)
    for a, b, c in itertools.product(range(-3, 4), repeat=3):
        assert apply_matrix(m, (a, b, c)) == (a, b - 2 * a, a - b + c)
        # direct substitution f(x - 1)
        x = 7
        assert a * (x - 1) ** 2 + b * (x - 1) + c == sum(
            v * x ** (2 - i) for i, v in enumerate(apply_matrix(m, (a, b, c))))


def test_rho_homomorphism():
    rng = random.Random(1)
    for _ in range(100):
        A = random_word(rng, 8)
        B = random_word(rng, 8)
        for deg in (2, 3):
            ident = rho(IDENTITY, deg)
            assert matmul(rho(A, deg), rho(A.inverse(), deg)) == ident
            assert matmul(rho(A, deg), rho(B, deg)) == rho(A @ B, deg)


def printed_cubic_matrix(p, q, r, s):
    """The printed degree-3 representation with its bottom-left entry sign-corrected."""
    return (
        (s ** 3, -r * s * s, r * r * s, -r ** 3),
        (-3 * q * s * s, 2 * q * r * s + p * s * s, -q * r * r - 2 * p * r * s, 3 * p * r * r),
        (3 * q * q * s, -q * q * r - 2 * p * q * s, 2 * p * q * r + p * p * s, -3 * p * p * r),
        (-q ** 3, p * q * q, -p * p * q, p ** 3),
    )


def test_rho_cubic_matches_printed_matrix():
    rng = random.Random(2)
    for _ in range(200):
        A = random_word(rng, 8)
        assert rho(A, 3) == printed_cubic_matrix(A.p, A.q, A.r, A.s)
    # the uncorrected entry would break the homomorphism property
    A, B = T, S
    bad = lambda M: tuple(  # noqa: E731
        tuple(-v if (i, j) == (3, 0) else v for j, v in enumerate(row))
        for i, row in enumerate(printed_cubic_matrix(M.p, M.q, M.r, M.s)))
    assert matmul(bad(A), bad(B)) != bad(A @ B)


def test_act_examples():
    x2p1 = content_normalize((1, 0, 1))
    moved = act(T, x2p1)
    assert moved.coeffs == (1, -2, 2)
    assert abs(upper_root(moved) - (1 + 1j)) < 1e-15
    assert act(S, x2p1) == x2p1


def test_discriminant_invariance_box():
    rng = random.Random(3)
    words = [S, T, T.inverse()] + [random_word(rng, 6) for _ in range(10)]
    for v in itertools.product(range(-5, 6), repeat=3):
        if not any(v):
            continue
        p = content_normalize(v)
        for A in words:
            assert discriminant(act(A, p)) == discriminant(p)


def test_discriminant_invariance_cubic():
    rng = random.Random(4)
    for _ in range(300):
        v = [rng.randint(-5, 5) for _ in range(4)]
        if not any(v):
            continue
        p = content_normalize(v)
        A = random_word(rng, 8)
        assert discriminant(act(A, p)) == discriminant(p)


def test_geodesic_through_examples():
    g = geodesic_through((1, 0, 1), (1, -1, 1))
    assert g.normal == (1, 0, -1)
    assert g.contains((1, 0, 1)) and g.contains((1, -1, 1))
    assert sorted(g.endpoints) == [-1.0, 1.0]
    h = geodesic_through((1, 0, 1), (1, 0, 2))
    assert h.normal == (0, 1, 0)
    assert h.endpoints == (-0.0, None) or h.endpoints == (0.0, None)
    assert h.as_dict()["normal"] == [0, 1, 0]
    with pytest.raises(ValueError):
        geodesic_through((1, 0, 1), (2, 0, 2))


@settings(max_examples=100)
@given(st.tuples(st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9)),
       st.tuples(st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9)))
def test_geodesic_contains_both_points(f1, f2):
    try:
        g = geodesic_through(f1, f2)
    except ValueError:
        return
    assert g.contains(f1) and g.contains(f2)


def test_geodesic_endpoints_examples():
    ends = geodesic_endpoints(Geodesic((1, -3, 1)))
    s5 = math.sqrt(5)
    assert abs(ends[0] - (3 - s5) / 2) < 1e-15 and abs(ends[1] - (3 + s5) / 2) < 1e-15
    with pytest.raises(ValueError):
        geodesic_endpoints(Geodesic((1, 0, 1)))


def test_geodesic_semicircle_membership():
    rng = random.Random(5)
    f1, f2 = (1, 0, 1), (2, -2, 3)
    g = geodesic_through(f1, f2)
    e1, e2 = g.endpoints
    center, radius = (e1 + e2) / 2, abs(e2 - e1) / 2
    hits = 0
    while hits < 50:
        s, t = rng.randint(-20, 20), rng.randint(-20, 20)
        f = tuple(s * a + t * b for a, b in zip(f1, f2))
        if discriminant_of(f) >= 0:
            continue
        z = upper_root(content_normalize(f))
        assert abs(abs(z - center) - radius) < 1e-9
        hits += 1


def test_on_rational_geodesic_examples():
    eis = on_rational_geodesic(complex(0.5, math.sqrt(3) / 2), poly=(1, -1, 1))
    assert eis is not None and eis.normal == (1, 0, -1)
    with mpmath.workdps(100):
        x = 1 / mpmath.pi
        alpha = mpmath.mpc(x, mpmath.sqrt(1 - x * x))
        g = on_rational_geodesic(alpha, precision=100)
        assert g is not None and g.normal == (1, 0, -1)
        beta = mpmath.mpc(1, 1) / mpmath.pi
        assert on_rational_geodesic(beta, coeff_bound=10 ** 6, precision=100) is None
    with pytest.raises(ValueError):
        on_rational_geodesic(complex(1, -1))


def test_tangency_map_examples():
    w = tangency_map((1, 0, -1))
    assert set(w) == {(1, 2, 1), (1, -2, 1)}
    w = tangency_map((1, -3, 2))
    assert set(w) == {(1, -2, 1), (1, -4, 4)}
    for p in w:
        assert discriminant_of(p) == 0
    with pytest.raises(ValueError):
        tangency_map((1, 0, 1))


def test_mobius_rejects_bad_det():
    with pytest.raises(ValueError):
        MobiusInt(1, 1, 1, 1)
    assert (S @ S).same_as(IDENTITY)
