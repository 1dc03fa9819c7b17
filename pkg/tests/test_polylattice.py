import itertools
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from starscape.polylattice import (
    FamilySpec, IntPoly, content_normalize, discriminant, discriminant_of, enumerate_family,
    family_array, form_to_rational, is_minimal, lattice_rows, mediant, rational_to_form,
    resultant, standard_basis, stern_brocot, substitute,
)

X = sympy.Symbol("x")


def sympy_disc(coeffs):
    """Independent oracle: sympy's discriminant of the dehomogenized polynomial."""
    return int(sympy.discriminant(sympy.Poly(list(coeffs), X)))


coeff_vectors = st.lists(st.integers(-30, 30), min_size=2, max_size=6).filter(any)


def test_content_normalize_examples():
    assert content_normalize((2, 0, 2)).coeffs == (1, 0, 1)
    assert content_normalize((-1, 0, -1)).coeffs == (1, 0, 1)
    assert content_normalize((6, -4, 10)).coeffs == (3, -2, 5)
    with pytest.raises(ValueError):
        content_normalize((0, 0, 0))


def test_intpoly_rejects_non_canonical():
    with pytest.raises(ValueError):
        IntPoly((2, 0, 2))
    with pytest.raises(ValueError):
        IntPoly((-1, 0, 1))
    p = IntPoly((0, 2, 3))
    assert p.leading_zeros == 1 and p.stripped == (2, 3)


@given(coeff_vectors)
def test_normalize_idempotent(v):
    once = content_normalize(v)
    assert content_normalize(once.coeffs) == once


def test_discriminant_examples():
    assert discriminant(content_normalize((1, 0, 1))) == -4
    assert discriminant(content_normalize((1, 0, 1, 1))) == -31
    assert discriminant(content_normalize((1, -2, 0, 1))) == 5
    assert discriminant_of((2, 3)) == 1


def test_quadratic_discriminant_exhaustive():
    for a, b, c in itertools.product(range(-10, 11), repeat=3):
        if a == b == c == 0:
            continue
        assert discriminant_of((a, b, c)) == b * b - 4 * a * c


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=3, max_size=6).filter(lambda v: v[0] != 0))
def test_discriminant_matches_sympy(v):
    assert discriminant_of(v) == sympy_disc(v)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=3, max_size=6).filter(any))
def test_discriminant_sign_flip(v):
    assert discriminant_of(v) == discriminant_of([-x for x in v])


def test_leading_zero_discriminant_is_binary_form():
    # y (x^2 + y^2) as a cubic binary form
    assert discriminant_of((0, 1, 0, 1)) == -4


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=3, max_size=5).filter(any),
       st.integers(-3, 3), st.integers(-3, 3))
def test_discriminant_sl2_invariant(v, k, m):
    # binary-form discriminants are invariant under unimodular substitution,
    # including forms with leading zeros
    v = [0] + v
    moved = substitute(substitute(v, 1, k, 0, 1), 1, 0, m, 1)
    assert discriminant_of(v) == discriminant_of(moved)


def test_resultant_oracle():
    f, g = (1, 0, 1), (1, -3, 2)
    assert resultant(f, g) == int(sympy.resultant(X ** 2 + 1, X ** 2 - 3 * X + 2))


def test_is_minimal_examples():
    assert not is_minimal(content_normalize((1, 0, -1)))
    assert is_minimal(content_normalize((1, 0, 1)))
    assert is_minimal(content_normalize((1, 0, 1, 1)))
    # (x^2 + 1)(x^2 + x + 1) has no rational root but is reducible
    assert not is_minimal(content_normalize((1, 1, 2, 1, 1)))
    assert is_minimal(content_normalize((1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1)))


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(-12, 12), min_size=3, max_size=6).filter(lambda v: v[0] != 0))
def test_is_minimal_matches_sympy(v):
    p = content_normalize(v)
    fl = sympy.factor_list(sympy.Poly(list(p.coeffs), X))
    irreducible = len(fl[1]) == 1 and fl[1][0][1] == 1 and fl[0] in (1, -1)
    assert is_minimal(p) == irreducible


def test_mediant_examples():
    zero, one = rational_to_form(Fraction(0)), rational_to_form(Fraction(1))
    assert form_to_rational(mediant(zero, one)) == Fraction(1, 2)
    assert mediant(content_normalize((1, 0, 1)), content_normalize((1, -2, 2))).coeffs == (2, -2, 3)
    p = content_normalize((1, 3, 5))
    assert mediant(p, p) == p


def test_stern_brocot_levels():
    assert stern_brocot(0) == []
    assert stern_brocot(1) == [Fraction(1, 2)]
    assert stern_brocot(2) == [Fraction(1, 3), Fraction(1, 2), Fraction(2, 3)]
    seq = stern_brocot(7)
    assert len(seq) == len(set(seq)) == 2 ** 7 - 1
    assert seq == sorted(seq)
    # neighbours in the tree listing are Farey neighbours
    full = [Fraction(0)] + seq + [Fraction(1)]
    for u, v in zip(full, full[1:]):
        assert v.numerator * u.denominator - u.numerator * v.denominator == 1


def test_enumerate_examples():
    spec = FamilySpec.cube(2, standard_basis(2), 1)
    polys = list(enumerate_family(spec))
    assert len(polys) == 13
    depressed = FamilySpec.cube(3, ((1, 0, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)), 3)
    assert all(p[1] == 0 for p in enumerate_family(depressed))
    empty = FamilySpec(2, standard_basis(2), ((1, 0), (0, 0), (0, 0)))
    assert list(enumerate_family(empty)) == []


def test_family_validation():
    with pytest.raises(ValueError):
        FamilySpec.cube(2, ((1, 0, 0), (2, 0, 0)), 1)
    with pytest.raises(ValueError):
        FamilySpec.cube(2, ((0, 0, 0),), 1)
    with pytest.raises(ValueError):
        FamilySpec.cube(3, standard_basis(3), 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 4), st.integers(0, 3))
def test_family_array_matches_stream(radius, ball):
    spec = FamilySpec.cube(3, ((1, 0, 0, 0), (0, 1, 0, 1), (0, 0, 1, 0)), radius,
                           offset=(0, 0, 0, 1), ball=ball + 1)
    stream = [p.coeffs for p in enumerate_family(spec)]
    arr = [tuple(int(v) for v in r) for r in family_array(spec)]
    assert arr == stream
    assert len(set(stream)) == len(stream)


def test_lattice_rows_rank_four():
    rows = lattice_rows(3, [tuple(int(i == j) for j in range(4)) for i in range(4)], [(-1, 1)] * 4)
    assert len(rows) == (3 ** 4 - 1) // 2
    assert all(content_normalize(r).coeffs == tuple(r) for r in rows.tolist())
