"""Integer binary forms, lattice families of them, and exact invariants.

A binary form of degree d is stored as its coefficient vector, leading
coefficient first: ``(a_d, ..., a_1, a_0)`` stands for
``a_d x^d + a_{d-1} x^{d-1} y + ... + a_0 y^d``.  A zero leading coefficient
is allowed and means a root at infinity.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

# Rationals are exactly what the stdlib Fraction already models.
Rational = Fraction


def _primitive(vec: Sequence[int]) -> Tuple[int, ...]:
    vec = tuple(int(v) for v in vec)
    if not any(vec):
        raise ValueError("zero coefficient vector has no projective class")
    g = 0
    for v in vec:
        g = math.gcd(g, v)
    out = tuple(v // g for v in vec)
    lead = next(v for v in out if v != 0)
    if lead < 0:
        out = tuple(-v for v in out)
    return out


@dataclass(frozen=True)
class IntPoly:
    """Canonical primitive integer binary form.

    Canonical means gcd 1 and first nonzero coefficient positive.  Use
    :func:`content_normalize` to build one from an arbitrary vector.
    """

    coeffs: Tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if len(coeffs) < 2:
            raise ValueError("a binary form needs degree >= 1")
        if _primitive(coeffs) != coeffs:
            raise ValueError(f"{coeffs} is not canonical; use content_normalize")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading_zeros(self) -> int:
        n = 0
        for c in self.coeffs:
            if c != 0:
                break
            n += 1
        return n

    @property
    def stripped(self) -> Tuple[int, ...]:
        """Coefficients of the underlying univariate polynomial."""
        return self.coeffs[self.leading_zeros:]

    def __iter__(self):
        return iter(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __str__(self):
        return "[" + ":".join(str(c) for c in self.coeffs) + "]"


def content_normalize(vec: Sequence[int]) -> IntPoly:
    """Divide out the content and make the first nonzero coefficient positive."""
    return IntPoly(_primitive(vec))


def substitute(coeffs: Sequence[int], p, q, r, s) -> Tuple:
    """Coefficients of f(p x + q y, r x + s y), leading-first.

    Works for any numeric type that supports + and *; integers stay exact.
    """
    d = len(coeffs) - 1
    # bivariate homogeneous polynomials as lists indexed by the power of y
    lin1 = [p, q]
    lin2 = [r, s]

    def mul(u, v):
        out = [0] * (len(u) + len(v) - 1)
        for i, a in enumerate(u):
            if a == 0:
                continue
            for j, b in enumerate(v):
                out[i + j] = out[i + j] + a * b
        return out

    pow1 = [[1]]
    pow2 = [[1]]
    for _ in range(d):
        pow1.append(mul(pow1[-1], lin1))
        pow2.append(mul(pow2[-1], lin2))
    total = [0] * (d + 1)
    for j, c in enumerate(coeffs):
        if c == 0:
            continue
        term = mul(pow1[d - j], pow2[j])
        for k, t in enumerate(term):
            total[k] = total[k] + c * t
    return tuple(total)


def _bareiss_det(m: list) -> int:
    """Fraction-free determinant of a square integer matrix."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(row) for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def resultant(f: Sequence[int], g: Sequence[int]) -> int:
    """Resultant of two univariate integer polynomials via the Sylvester matrix."""
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([0] * i + list(f) + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + list(g) + [0] * (size - n - 1 - i))
    return _bareiss_det(rows)


def _disc_generic(c: Sequence[int]) -> int:
    d = len(c) - 1
    if c[0] == 0:
        # move the root at infinity away with x -> x, y -> k x + y (det 1)
        for k in itertools.count():
            shifted = substitute(c, 1, 0, k, 1)
            if shifted[0] != 0:
                c = shifted
                break
    deriv = [c[i] * (d - i) for i in range(d)]
    res = resultant(c, deriv)
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    num = sign * res
    if num % c[0]:
        raise ArithmeticError("resultant not divisible by leading coefficient")
    return num // c[0]


def discriminant_of(coeffs: Sequence[int]) -> int:
    """Exact discriminant of a binary form given by any integer vector."""
    c = [int(x) for x in coeffs]
    if not any(c):
        raise ValueError("zero polynomial has no discriminant")
    d = len(c) - 1
    if d == 1:
        return 1
    if d == 2:
        a, b, cc = c
        return b * b - 4 * a * cc
    if d == 3:
        a, b, cc, dd = c
        return (b * b * cc * cc - 4 * a * cc ** 3 - 4 * b ** 3 * dd
                - 27 * a * a * dd * dd + 18 * a * b * cc * dd)
    return _disc_generic(c)


def discriminant(p: IntPoly) -> int:
    return discriminant_of(p.coeffs)


def _divisors(n: int) -> list:
    n = abs(n)
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def _eval_homog(c: Sequence[int], num: int, den: int) -> int:
    # den^m f(num/den)
    m = len(c) - 1
    return sum(cj * num ** (m - j) * den ** j for j, cj in enumerate(c))


def has_rational_root(c: Sequence[int]) -> bool:
    c = list(c)
    if c[-1] == 0:
        return True
    for q in _divisors(c[0]):
        for p in _divisors(c[-1]):
            if math.gcd(p, q) != 1:
                continue
            if _eval_homog(c, p, q) == 0 or _eval_homog(c, -p, q) == 0:
                return True
    return False


def _has_quadratic_factor(c: Sequence[int]) -> bool:
    # candidate factors come from pairs of numeric roots; divisibility is exact
    from .rootfind import finite_roots

    roots = finite_roots(c)
    lead = abs(c[0])
    for i, j in itertools.combinations(range(len(roots)), 2):
        s = roots[i] + roots[j]
        pr = roots[i] * roots[j]
        if abs(s.imag) > 1e-6 * (1 + abs(s)) or abs(pr.imag) > 1e-6 * (1 + abs(pr)):
            continue
        for k in _divisors(lead):
            b, cc = round(-k * s.real), round(k * pr.real)
            if abs(k * s.real + b) > 1e-5 * (1 + abs(b)):
                continue
            if abs(k * pr.real - cc) > 1e-5 * (1 + abs(cc)):
                continue
            if cc != 0 and _divides((k, b, cc), c):
                return True
    return False


def _divides(g: Sequence[int], f: Sequence[int]) -> bool:
    """Exact test that g divides f in Q[x]."""
    rem = [Fraction(x) for x in f]
    g = [Fraction(x) for x in g]
    while len(rem) >= len(g):
        factor = rem[0] / g[0]
        for i in range(len(g)):
            rem[i] -= factor * g[i]
        rem.pop(0)
    return not any(rem)


def is_minimal(p: IntPoly) -> bool:
    """True when the underlying polynomial is primitive and irreducible over Q.

    Leading zeros are stripped first, so an embedded lower-degree form is
    judged as the polynomial it really is.
    """
    c = list(p.stripped)
    m = len(c) - 1
    if m <= 0:
        return False
    if m == 1:
        return True
    if m == 2:
        disc = c[1] * c[1] - 4 * c[0] * c[2]
        return not (disc >= 0 and math.isqrt(disc) ** 2 == disc)
    if has_rational_root(c):
        return False
    if m == 3:
        return True
    if m <= 5:
        return not _has_quadratic_factor(c)
    import sympy

    x = sympy.Symbol("x")
    _, factors = sympy.factor_list(sympy.Poly(c, x))
    return len(factors) == 1 and factors[0][1] == 1


def mediant(p: IntPoly, q: IntPoly) -> IntPoly:
    if p.degree != q.degree:
        raise ValueError("mediant needs forms of equal degree")
    total = [a + b for a, b in zip(p.coeffs, q.coeffs)]
    if not any(total):
        raise ValueError("mediant is the zero vector")
    return content_normalize(total)


def rational_to_form(x: Fraction) -> IntPoly:
    """The linear form q x - p y whose root is p/q."""
    x = Fraction(x)
    return content_normalize((x.denominator, -x.numerator))


def form_to_rational(p: IntPoly) -> Optional[Fraction]:
    if p.degree != 1:
        raise ValueError("not a linear form")
    a, b = p.coeffs
    if a == 0:
        return None
    return Fraction(-b, a)


def stern_brocot(levels: int) -> list:
    """Rationals in (0, 1) down to the given depth of the Stern-Brocot tree."""
    if levels < 0:
        raise ValueError("levels must be >= 0")
    row = [(0, 1), (1, 1)]
    for _ in range(levels):
        nxt = [row[0]]
        for (a, b), (c, d) in zip(row, row[1:]):
            nxt.append((a + c, b + d))
            nxt.append((c, d))
        row = nxt
    return [Fraction(a, b) for a, b in row[1:-1]]


def _rank(vectors: Sequence[Sequence[int]]) -> int:
    rows = [[Fraction(v) for v in vec] for vec in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class FamilySpec:
    """Affine integer family offset + sum t_i basis_i with bounded parameters.

    ``box`` gives an inclusive integer range per parameter.  When ``ball`` is
    set, vectors whose largest absolute coefficient exceeds it are dropped as
    well.
    """

    degree: int
    basis: Tuple[Tuple[int, ...], ...]
    box: Tuple[Tuple[int, int], ...]
    offset: Tuple[int, ...] = ()
    ball: Optional[int] = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        n = self.degree + 1
        basis = tuple(tuple(int(x) for x in b) for b in self.basis)
        offset = tuple(int(x) for x in self.offset) if self.offset else (0,) * n
        box = tuple((int(lo), int(hi)) for lo, hi in self.box)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "offset", offset)
        object.__setattr__(self, "box", box)
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        if not 1 <= len(basis) <= 3:
            raise ValueError("a family needs 1 to 3 basis vectors")
        if any(len(b) != n for b in basis) or len(offset) != n:
            raise ValueError("basis and offset must have degree+1 entries")
        if any(not any(b) for b in basis):
            raise ValueError("zero basis vector")
        if _rank(basis) != len(basis):
            raise ValueError("basis vectors are linearly dependent")
        if len(box) != len(basis):
            raise ValueError("need one parameter range per basis vector")

    @classmethod
    def cube(cls, degree: int, basis, radius: int, offset=(), ball=None, label=""):
        return cls(degree, tuple(basis), tuple((-radius, radius) for _ in basis),
                   offset, ball, label)

    @property
    def size(self) -> int:
        n = 1
        for lo, hi in self.box:
            n *= max(0, hi - lo + 1)
        return n


def standard_basis(degree: int) -> Tuple[Tuple[int, ...], ...]:
    """Basis of the full coefficient space; only usable up to degree 2."""
    n = degree + 1
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def _raw_vectors(spec: FamilySpec) -> Iterator[Tuple[int, ...]]:
    ranges = [range(lo, hi + 1) for lo, hi in spec.box]
    for params in itertools.product(*ranges):
        vec = list(spec.offset)
        for t, b in zip(params, spec.basis):
            if t:
                for i, bi in enumerate(b):
                    vec[i] += t * bi
        yield tuple(vec)


def enumerate_family(spec: FamilySpec) -> Iterator[IntPoly]:
    """Stream canonical forms of the family, one per projective class."""
    seen = set()
    for vec in _raw_vectors(spec):
        if not any(vec):
            continue
        if spec.ball is not None and max(abs(v) for v in vec) > spec.ball:
            continue
        canon = _primitive(vec)
        if canon in seen:
            continue
        seen.add(canon)
        yield IntPoly(canon)


def canonical_rows(arr: np.ndarray) -> np.ndarray:
    """Vectorized content normalization of nonzero integer rows."""
    g = np.gcd.reduce(np.abs(arr), axis=1)
    out = arr // g[:, None]
    first = np.argmax(out != 0, axis=1)
    sign = np.sign(out[np.arange(len(out)), first])
    return out * sign[:, None]


def lattice_rows(degree: int, basis, box, offset=(), ball=None) -> np.ndarray:
    """Canonical forms offset + sum t_i basis_i over a parameter box, any rank.

    Same content and order as enumerating a family; used directly when a
    pattern needs more parameters than a FamilySpec allows.
    """
    n = degree + 1
    offset = tuple(offset) or (0,) * n
    if not basis or any(hi < lo for lo, hi in box):
        return np.zeros((0, n), dtype=np.int64)
    axes = [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in box]
    grids = np.meshgrid(*axes, indexing="ij")
    params = np.stack([g.ravel() for g in grids], axis=1)
    vecs = params @ np.array(basis, dtype=np.int64) + np.array(offset, dtype=np.int64)
    keep = np.any(vecs != 0, axis=1)
    if ball is not None:
        keep &= np.max(np.abs(vecs), axis=1) <= ball
    vecs = vecs[keep]
    if len(vecs) == 0:
        return np.zeros((0, n), dtype=np.int64)
    canon = canonical_rows(vecs)
    _, first = np.unique(canon, axis=0, return_index=True)
    return canon[np.sort(first)]


def family_array(spec: FamilySpec) -> np.ndarray:
    """All canonical forms of the family as an int64 array, enumeration order."""
    if spec.size == 0:
        return np.zeros((0, spec.degree + 1), dtype=np.int64)
    return lattice_rows(spec.degree, spec.basis, spec.box, spec.offset, spec.ball)
