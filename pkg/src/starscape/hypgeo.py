"""The hyperbolic plane seen two ways: through roots and through coefficients.

Roots live in the upper half plane.  A quadratic with negative discriminant
is a point [a:b:c] of the projective coefficient model, and the quadratic
formula is an isometry between the two.  PSL(2,R) acts on coefficients
through the representation ``rho``, which sends f to f composed with A^-1.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import mpmath

from .polylattice import IntPoly, _primitive, content_normalize, substitute

INF = None  # the ideal point at infinity


@dataclass(frozen=True)
class MobiusInt:
    """Integer Mobius transformation z -> (p z + q) / (r z + s), det 1."""

    p: int
    q: int
    r: int
    s: int

    def __post_init__(self):
        if self.p * self.s - self.q * self.r != 1:
            raise ValueError("Mobius matrix must have determinant 1")

    def __matmul__(self, other: "MobiusInt") -> "MobiusInt":
        return MobiusInt(
            self.p * other.p + self.q * other.r,
            self.p * other.q + self.q * other.s,
            self.r * other.p + self.s * other.r,
            self.r * other.q + self.s * other.s,
        )

    def inverse(self) -> "MobiusInt":
        return MobiusInt(self.s, -self.q, -self.r, self.p)

    def same_as(self, other: "MobiusInt") -> bool:
        a = (self.p, self.q, self.r, self.s)
        b = (other.p, other.q, other.r, other.s)
        return a == b or a == tuple(-x for x in b)

    def apply(self, z):
        """Action on the extended plane; None is infinity."""
        if z is None:
            return None if self.r == 0 else self.p / self.r
        den = self.r * z + self.s
        if den == 0:
            return None
        return (self.p * z + self.q) / den


IDENTITY = MobiusInt(1, 0, 0, 1)
S = MobiusInt(0, -1, 1, 0)
T = MobiusInt(1, 1, 0, 1)


def translation(k: int) -> MobiusInt:
    return MobiusInt(1, k, 0, 1)


def random_word(rng: random.Random, max_len: int = 8) -> MobiusInt:
    """Random product of S, T and T^-1 of length at most max_len."""
    gens = (S, T, T.inverse())
    out = IDENTITY
    for _ in range(rng.randint(0, max_len)):
        out = out @ rng.choice(gens)
    return out


def dist_uhp(z1: complex, z2: complex) -> float:
    """Hyperbolic distance in the upper half plane."""
    y1, y2 = z1.imag, z2.imag
    if y1 <= 0 or y2 <= 0:
        raise ValueError("points must lie in the open upper half plane")
    return 2.0 * math.asinh(abs(z1 - z2) / (2.0 * math.sqrt(y1 * y2)))


def inner_product(f1: Sequence, f2: Sequence):
    a1, b1, c1 = f1
    a2, b2, c2 = f2
    return b1 * b2 - 2 * a1 * c2 - 2 * a2 * c1


def _is_int(v) -> bool:
    return all(isinstance(x, int) for x in v)


def cosh_minus_one(f1: Sequence, f2: Sequence) -> float:
    """cosh(d) - 1 for two negative-discriminant triples.

    For integer input the numerator is formed exactly, so tiny distances keep
    full relative accuracy.
    """
    d1 = -inner_product(f1, f1)
    d2 = -inner_product(f2, f2)
    if d1 <= 0 or d2 <= 0:
        raise ValueError("both points need a negative discriminant")
    g = abs(inner_product(f1, f2))
    prod = d1 * d2
    if _is_int(f1) and _is_int(f2):
        num = g * g - prod
        root = math.sqrt(prod)
        return max(num, 0) / (root * (g + root))
    val = g / math.sqrt(prod) - 1.0
    return 0.0 if val < 1e-12 else val


def dist_coefs(f1: Sequence, f2: Sequence) -> float:
    """Distance in the coefficient model, acosh(-<f1,f2>/sqrt(D1 D2))."""
    t = cosh_minus_one(f1, f2)
    return 2.0 * math.asinh(math.sqrt(t / 2.0))


def rho(A: MobiusInt, degree: int) -> Tuple[Tuple[int, ...], ...]:
    """Matrix of f -> f o A^-1 on coefficient vectors (columns act on columns)."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    n = degree + 1
    cols = []
    for j in range(n):
        e = [0] * n
        e[j] = 1
        cols.append(substitute(e, A.s, -A.q, -A.r, A.p))
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))


def matmul(m1, m2):
    return tuple(
        tuple(sum(m1[i][k] * m2[k][j] for k in range(len(m2))) for j in range(len(m2[0])))
        for i in range(len(m1))
    )


def apply_matrix(m, v):
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in m)


def act(A: MobiusInt, p) -> IntPoly:
    """Canonical form of rho(A) applied to p; roots move by z -> A z."""
    coeffs = p.coeffs if isinstance(p, IntPoly) else tuple(p)
    return content_normalize(substitute(coeffs, A.s, -A.q, -A.r, A.p))


def coef_point(z: complex) -> Tuple[float, float, float]:
    """Inverse of the quadratic formula: x + iy -> [1 : -2x : x^2 + y^2]."""
    return (1.0, -2.0 * z.real, z.real ** 2 + z.imag ** 2)


@dataclass(frozen=True)
class Geodesic:
    """A rational geodesic.

    ``normal`` is the triple [n2:n1:n0] whose endpoint polynomial
    n2 x^2 + n1 x + n0 vanishes at the two ideal endpoints.  A quadratic f lies
    on the geodesic when <normal, f> = 0, equivalently ``plane . f = 0``.
    """

    normal: Tuple[int, int, int]

    def __post_init__(self):
        object.__setattr__(self, "normal", _primitive(self.normal))

    @classmethod
    def from_plane(cls, plane: Sequence[int]) -> "Geodesic":
        c0, c1, c2 = plane
        return cls((-c2, 2 * c1, -c0))

    @property
    def plane(self) -> Tuple[int, int, int]:
        n2, n1, n0 = self.normal
        return _primitive((-2 * n0, n1, -2 * n2))

    def contains(self, f: Sequence[int]) -> bool:
        return sum(a * b for a, b in zip(self.plane, f)) == 0

    @property
    def endpoints(self):
        return geodesic_endpoints(self)

    def as_dict(self) -> dict:
        ends = [None if e is None else float(e) for e in self.endpoints]
        return {"normal": list(self.normal), "endpoints": ends}


def cross(u: Sequence[int], v: Sequence[int]) -> Tuple[int, int, int]:
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def geodesic_through(f1: Sequence[int], f2: Sequence[int]) -> Geodesic:
    """The rational geodesic through two rational coefficient points."""
    c = cross(tuple(f1), tuple(f2))
    if not any(c):
        raise ValueError("points are projectively identical")
    return Geodesic.from_plane(c)


def geodesic_endpoints(g: Geodesic):
    n2, n1, n0 = g.normal
    disc = n1 * n1 - 4 * n2 * n0
    if disc < 0:
        raise ValueError("normal has negative discriminant; it is a point, not a geodesic")
    if n2 == 0:
        if n1 == 0:
            raise ValueError("degenerate normal")
        return (-n0 / n1, INF)
    sq = math.sqrt(disc)
    e = sorted(((-n1 - sq) / (2 * n2), (-n1 + sq) / (2 * n2)))
    return (e[0], e[1])


def on_geodesic_numeric(z: complex, g: Geodesic, tol: float = 1e-9) -> bool:
    plane = g.plane
    f = coef_point(z)
    scale = sum(abs(a) * abs(b) for a, b in zip(plane, f))
    return abs(sum(a * b for a, b in zip(plane, f))) <= tol * max(scale, 1.0)


class InsufficientPrecision(ArithmeticError):
    """An integer relation could not be certified at the working precision."""


def _relation_vector(alpha: mpmath.mpc):
    s = 2 * alpha.real
    n = alpha.real ** 2 + alpha.imag ** 2
    return [mpmath.mpf(1), -s, n]


def _exact_relation_holds(poly: Sequence[int], rel: Sequence[int], alpha) -> bool:
    """Check exactly that the Mobius map defined by a relation fixes the orbit.

    A relation P0 - P1 (a + b) + P2 a b = 0 with b = conj(a) says
    conj(a) = M(a) for M = (P1, -P0; P2, -P1).  M(a) is a root of the
    minimal polynomial iff that polynomial divides its own M-transform.
    """
    from .polylattice import _divides

    p0, p1, p2 = rel
    # f(M x) numerator, M x = (p1 x - p0) / (p2 x - p1)
    transformed = substitute(list(poly), p1, -p0, p2, -p1)
    if not any(transformed):
        return False
    while transformed and transformed[0] == 0:
        transformed = transformed[1:]
    if len(transformed) < len(poly) or not _divides(poly, transformed):
        return False
    det = p1 * p1 - p0 * p2
    if det == 0:
        return False
    image = (p1 * alpha - p0) / (p2 * alpha - p1)
    return abs(image - mpmath.conj(alpha)) < mpmath.mpf(10) ** (-mpmath.mp.dps // 2)


def on_rational_geodesic(alpha, coeff_bound: int = 10 ** 6, precision: int = 100,
                         poly: Optional[Sequence[int]] = None) -> Optional[Geodesic]:
    """Find a rational geodesic through alpha, if one with small coefficients exists.

    Numeric targets use PSLQ on (1, -(a + conj a), a conj a).  A relation is
    accepted only if its residual is far below the search tolerance; a
    residual in between raises :class:`InsufficientPrecision`.  When the
    minimal polynomial ``poly`` is supplied, any relation found is confirmed
    by exact polynomial division.

    A quadratic alpha lies on a whole pencil of rational geodesics; for a
    quadratic ``poly`` the normal of smallest height is returned, found exactly.
    """
    if poly is not None:
        stripped = list(poly)
        while stripped and stripped[0] == 0:
            stripped.pop(0)
        if len(stripped) == 3:
            if stripped[1] ** 2 - 4 * stripped[0] * stripped[2] >= 0:
                raise ValueError("quadratic has no root in the upper half plane")
            return _smallest_geodesic_through(tuple(stripped), coeff_bound)
    with mpmath.workdps(precision):
        alpha = mpmath.mpc(alpha)
        if alpha.imag <= 0:
            raise ValueError("alpha must lie in the upper half plane")
        vec = _relation_vector(alpha)
        tol = mpmath.mpf(10) ** (-(precision // 2))
        if abs(vec[1]) < tol:
            # Re alpha = 0 to working precision: the imaginary axis
            return Geodesic.from_plane((0, 1, 0))
        rel = mpmath.pslq(vec, tol=tol, maxcoeff=coeff_bound, maxsteps=20000)
        if rel is None:
            return None
        rel = [int(v) for v in rel]
        residual = abs(sum(r * v for r, v in zip(rel, vec)))
        scale = max(abs(r) for r in rel)
        if residual > mpmath.mpf(10) ** (-(precision * 9) // 10) * scale:
            raise InsufficientPrecision(
                f"relation {rel} has residual {mpmath.nstr(residual, 5)}")
        if poly is not None and not _exact_relation_holds(poly, rel, alpha):
            raise InsufficientPrecision(f"relation {rel} failed the exact check")
        return Geodesic.from_plane(rel)


def _smallest_geodesic_through(f: Tuple[int, int, int], coeff_bound: int
                               ) -> Optional[Geodesic]:
    """Primitive normal of least height whose geodesic passes through the point f.

    Ties are broken by preferring nonzero leading entries, then lexicographically.
    """
    a, b, c = f
    for height in range(1, coeff_bound + 1):
        best = None
        for n2 in range(-height, height + 1):
            for n1 in range(-height, height + 1):
                # plane . f = -2 n0 a + n1 b - 2 n2 c = 0
                num = n1 * b - 2 * n2 * c
                if num % (2 * a):
                    continue
                n0 = num // (2 * a)
                if max(abs(n2), abs(n1), abs(n0)) != height:
                    continue
                n = _primitive((n2, n1, n0))
                if n[0] < 0 or (n[0] == 0 and n[1] < 0):
                    continue
                key = (n[0] == 0, tuple(-v for v in n))
                if best is None or key < best[0]:
                    best = (key, n)
        if best is not None:
            return Geodesic(best[1])
    return None


def tangency_map(f: Sequence[int]):
    """The two double-root points (x - r)^2 tangent to the light cone from f."""
    a, b, c = f
    disc = b * b - 4 * a * c
    if disc <= 0:
        raise ValueError("tangency map needs a positive discriminant")
    if a == 0:
        # one root at infinity, the other at -c/b
        r = Fraction(-c, b)
        pts = [(1, -2 * r, r * r), (0, 0, 1)]
    else:
        sq = math.isqrt(disc)
        if sq * sq == disc:
            rs = sorted((Fraction(-b - sq, 2 * a), Fraction(-b + sq, 2 * a)))
        else:
            s = math.sqrt(disc)
            rs = sorted(((-b - s) / (2 * a), (-b + s) / (2 * a)))
        pts = [(1, -2 * r, r * r) for r in rs]
    return tuple(tuple(x if isinstance(x, float) else _simplify(x) for x in p) for p in pts)


def _simplify(x):
    x = Fraction(x)
    return int(x) if x.denominator == 1 else x
