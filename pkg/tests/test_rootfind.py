import cmath
import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from starscape.polylattice import content_normalize, discriminant_of, is_minimal
from starscape.rootfind import (
    batch_aberth, batch_quadratic_upper, classify, finite_roots, roots, upper_root, upper_roots,
)


def cardano_real(p, q):
    """Real root of the depressed cubic t^3 + p t + q with one real root."""
    d = (q / 2) ** 2 + (p / 3) ** 3
    u = np.cbrt(-q / 2 + np.sqrt(d))
    v = np.cbrt(-q / 2 - np.sqrt(d))
    return u + v


def test_quadratic_closed_form():
    rs = roots(content_normalize((1, 0, 1)))
    assert sorted((r.value for r in rs.roots), key=lambda z: z.imag) == [-1j, 1j]
    assert rs.signature == (0, 1)


def test_cubic_against_cardano():
    r = cardano_real(1.0, 1.0)
    assert abs(r - (-0.6823278038280193)) < 1e-12
    vals = finite_roots((1, 0, 1, 1))
    real = [z for z in vals if z.imag == 0]
    assert len(real) == 1 and abs(real[0].real - r) < 1e-12
    # the pair follows from Vieta: sum of roots 0, product -1
    z = upper_root(content_normalize((1, 0, 1, 1)))
    assert abs(2 * z.real + r) < 1e-12
    assert abs(r * abs(z) ** 2 + 1) < 1e-12
    assert abs(z - complex(0.34116390191400, 1.16154139999725)) < 1e-10


def test_root_at_infinity():
    rs = roots(content_normalize((0, 2, 3)))
    kinds = sorted(r.kind for r in rs.roots)
    assert kinds == ["finite", "infinity"]
    finite = [r.value for r in rs.roots if r.kind == "finite"]
    assert finite == [-1.5]


def test_upper_root_examples():
    assert upper_root(content_normalize((1, 0, 1))) == 1j
    assert abs(upper_root(content_normalize((1, -2, 2))) - (1 + 1j)) < 1e-15
    assert upper_root(content_normalize((1, 0, -1))) is None


def test_classify_examples():
    assert classify(content_normalize((1, 0, 1))) == (0, 1)
    assert classify(content_normalize((1, -2, 0, 1))) == (3, 0)
    assert classify(content_normalize((1, 0, 1, 1))) == (1, 1)


def test_tolerance_range():
    with pytest.raises(ValueError):
        roots(content_normalize((1, 0, 1)), tol=1e-3)


def test_degree_two_signature_exhaustive():
    for a, b, c in itertools.product(range(-20, 21), repeat=3):
        if a <= 0 or (a, b, c) != content_normalize((a, b, c)).coeffs:
            continue
        d = b * b - 4 * a * c
        expected = (0, 1) if d < 0 else (2, 0)
        assert classify(content_normalize((a, b, c))) == expected


def test_degree_three_signature_random():
    rng = random.Random(11)
    for _ in range(2000):
        v = [rng.randint(-50, 50) for _ in range(4)]
        if v[0] == 0:
            continue
        d = discriminant_of(v)
        if d == 0:
            continue
        expected = (1, 1) if d < 0 else (3, 0)
        assert classify(content_normalize(v)) == expected


def _reconstruct(lead, zs):
    return lead * np.poly(zs)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=3, max_size=6).filter(lambda v: v[0] != 0))
def test_reconstruction_and_conjugates(v):
    p = content_normalize(v)
    if not is_minimal(p):
        return
    zs = finite_roots(p.coeffs)
    assert len(zs) == p.degree
    back = _reconstruct(p.coeffs[0], zs)
    scale = max(abs(c) for c in p.coeffs)
    assert np.max(np.abs(back - np.array(p.coeffs))) <= 1e-9 * scale
    # closed under conjugation
    for z in zs:
        assert min(abs(z.conjugate() - w) for w in zs) <= 1e-12 * (1 + abs(z))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=4, max_size=6).filter(lambda v: v[0] != 0))
def test_matches_numpy_companion(v):
    if discriminant_of(v) == 0:
        return
    ours = sorted(finite_roots(v), key=lambda z: (round(z.real, 6), round(z.imag, 6)))
    ref = sorted(np.roots(v), key=lambda z: (round(z.real, 6), round(z.imag, 6)))
    for a, b in zip(ours, ref):
        assert abs(a - b) <= 1e-7 * (1 + abs(b))


def test_residual_bound():
    p = content_normalize((3, -7, 0, 11, -5))
    for r in roots(p).roots:
        z = r.value
        val = np.polyval(p.coeffs, z)
        assert abs(val) <= 1e-12 * 11 * max(1, abs(z)) ** 4


def test_repeated_roots_keep_multiplicity():
    rs = roots(content_normalize((1, -2, 1, 0)))  # x (x - 1)^2
    mult = {round(r.value.real, 9): r.multiplicity for r in rs.roots}
    assert mult == {0.0: 1, 1.0: 2}


def test_upper_roots_quartic():
    ups = upper_roots(content_normalize((1, 0, 5, 0, 4)))  # (x^2+1)(x^2+4)
    assert sorted(round(z.imag, 12) for z in ups) == [1.0, 2.0]


def test_batch_solvers_agree():
    rng = np.random.default_rng(5)
    rows = rng.integers(-9, 10, size=(300, 4))
    rows = rows[rows[:, 0] != 0]
    rows = np.array([r for r in rows if discriminant_of(tuple(int(x) for x in r)) != 0])
    batch = batch_aberth(rows)
    for row, zs in zip(rows, batch):
        ref = finite_roots(tuple(int(x) for x in row))
        for z in zs:
            assert min(abs(z - w) for w in ref) < 1e-9 * (1 + abs(z))
    quads = np.array([[1, 0, 1], [2, 2, 1], [3, -1, 5]])
    up = batch_quadratic_upper(quads)
    for row, z in zip(quads, up):
        assert abs(z - upper_root(content_normalize(tuple(int(x) for x in row)))) < 1e-15
