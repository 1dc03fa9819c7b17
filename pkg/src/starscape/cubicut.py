"""Negative-discriminant cubics as unit tangent vectors of the hyperbolic plane.

A cubic with one real root r and a conjugate pair z, conj(z) is the tangent
vector at z pointing along the geodesic towards the ideal point r.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .polylattice import IntPoly, _primitive, discriminant_of
from .rootfind import finite_roots

TORUS_MAJOR = 2.0
TORUS_MINOR = 1.0


@dataclass(frozen=True)
class UTPoint:
    base: complex
    direction: Optional[float]  # None is the ideal point at infinity

    def __post_init__(self):
        if not self.base.imag > 0:
            raise ValueError("base point must be in the open upper half plane")


def split_cubic(p) -> UTPoint:
    """(real root, upper root) of a cubic with negative discriminant."""
    coeffs = tuple(p.coeffs if isinstance(p, IntPoly) else p)
    if len(coeffs) != 4:
        raise ValueError("need a cubic")
    if discriminant_of(coeffs) >= 0:
        raise ValueError("split_cubic needs a negative discriminant")
    if coeffs[0] == 0:
        _, b, c, d = coeffs
        x = -c / (2 * b)
        y = math.sqrt(4 * b * d - c * c) / (2 * abs(b))
        return UTPoint(complex(x, y), None)
    rts = finite_roots(coeffs)
    real = next(z.real for z in rts if z.imag == 0)
    upper = next(z for z in rts if z.imag > 0)
    return UTPoint(upper, real)


def assemble_cubic(r: Optional[float], z: complex) -> Tuple[float, float, float, float]:
    """Coefficients of (x - r)(x - z)(x - conj z); r = None gives [0:1:-2x:|z|^2]."""
    s = 2 * z.real
    n = z.real ** 2 + z.imag ** 2
    if r is None:
        return (0.0, 1.0, -s, n)
    return (1.0, -(r + s), n + r * s, -r * n)


def theta(z: complex, r: Optional[float]) -> float:
    """Fiber angle 2 atan((r - x)/y), with pi at infinity."""
    if r is None:
        return math.pi
    return 2.0 * math.atan((r - z.real) / z.imag)


def arrow_direction(z: complex, r: float) -> Tuple[float, float]:
    """Unit vector at z along the geodesic heading to the ideal point r."""
    dx = r - z.real
    y = z.imag
    vx, vy = 2.0 * y * dx, dx * dx - y * y
    norm = math.hypot(vx, vy)
    return (vx / norm, vy / norm)


def cayley(z: complex) -> complex:
    return (z - 1j) / (z + 1j)


def torus_embed(u: UTPoint, major: float = TORUS_MAJOR, minor: float = TORUS_MINOR):
    """Place (Cayley disk point, fiber angle) in a solid torus of revolution.

    The fiber angle runs around the core circle; the disk is the meridian
    cross-section scaled to the minor radius.
    """
    w = cayley(u.base)
    t = theta(u.base, u.direction)
    rad = major + minor * w.real
    return (rad * math.cos(t), rad * math.sin(t), minor * w.imag)


# ---------------------------------------------------------------------------
# planar families


def _normal_from_basis(basis: Sequence[Sequence[int]]) -> Tuple[int, ...]:
    """Integer normal of the hyperplane spanned by three vectors in Z^4."""
    m = [list(b) for b in basis]
    comps = []
    for skip in range(4):
        cols = [j for j in range(4) if j != skip]
        sub = [[row[j] for j in cols] for row in m]
        det = (sub[0][0] * (sub[1][1] * sub[2][2] - sub[1][2] * sub[2][1])
               - sub[0][1] * (sub[1][0] * sub[2][2] - sub[1][2] * sub[2][0])
               + sub[0][2] * (sub[1][0] * sub[2][1] - sub[1][1] * sub[2][0]))
        comps.append((-1) ** skip * det)
    if not any(comps):
        raise ValueError("basis vectors are dependent")
    return tuple(comps)


@dataclass(frozen=True)
class PlanarFamily:
    """A plane through the origin of cubic coefficient space, N . (a,b,c,d) = 0."""

    normal: Tuple[int, int, int, int]
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if len(self.normal) != 4:
            raise ValueError("normal must have four entries")
        object.__setattr__(self, "normal", _primitive(self.normal))

    @classmethod
    def from_basis(cls, basis, label: str = "") -> "PlanarFamily":
        if len(basis) != 3:
            raise ValueError("a plane needs three basis vectors")
        return cls(_normal_from_basis(basis), label)

    def basis(self) -> List[Tuple[int, ...]]:
        """An integer basis of the plane (not unique)."""
        n = self.normal
        k = next(i for i in range(4) if n[i] != 0)
        out = []
        for j in range(4):
            if j == k:
                continue
            v = [0] * 4
            v[j] = n[k]
            v[k] = -n[j]
            out.append(tuple(v))
        return out


@dataclass(frozen=True)
class SingularLine:
    kind: str  # "fiber", "transverse" or "degenerate"
    quadratic: Optional[Tuple[Fraction, Fraction]] = None  # (B, C) of x^2 + Bx + C
    point: Optional[complex] = None
    note: str = ""


def singular_line(fam: PlanarFamily) -> SingularLine:
    """Does the plane contain a whole fiber (dx + e)(x^2 + Bx + C)?

    Containment of both (1,B,C,0) and (0,1,B,C) gives a 2x2 linear system in
    (B, C), solved exactly.
    """
    n3, n2, n1, n0 = fam.normal
    # n2 B + n1 C = -n3 ; n1 B + n0 C = -n2
    det = n2 * n0 - n1 * n1
    if det != 0:
        B = Fraction(-n3 * n0 + n2 * n1, det)
        C = Fraction(-n2 * n2 + n1 * n3, det)
        if B * B - 4 * C < 0:
            z = complex(-B / 2, math.sqrt(4 * C - B * B) / 2)
            return SingularLine("fiber", (B, C), z)
        return SingularLine("transverse", (B, C), None,
                            "fiber solution has real roots")
    # rank-deficient: either inconsistent or a whole line of solutions
    rows = [(n2, n1, -n3), (n1, n0, -n2)]
    consistent = True
    for a, b, rhs in rows:
        if a == 0 and b == 0 and rhs != 0:
            consistent = False
    if consistent:
        r1, r2 = rows
        # the two rows are proportional on the left; compare augmented minors
        if (r1[0] * r2[2] - r2[0] * r1[2]) != 0 or (r1[1] * r2[2] - r2[1] * r1[2]) != 0:
            consistent = False
    if not consistent:
        return SingularLine("transverse", None, None, "fiber system is inconsistent")
    return SingularLine("degenerate", None, None,
                        "fiber system is rank deficient with a line of solutions")


@dataclass
class TransversalityReport:
    singular: SingularLine
    samples: int = 0
    flagged: List[complex] = field(default_factory=list)
    min_angle: Optional[float] = None


def transversality_report(fam: PlanarFamily, region=(-2.5, 2.5, 0.0, 2.0), grid: int = 50,
                          tol: float = 1e-3) -> TransversalityReport:
    """Sample fibers over a grid and flag where the plane nearly contains them.

    Over each grid point z the fiber is the 2-space W spanned by (1,B,C,0) and
    (0,1,B,C).  The plane meets W in the family's cubic with root z; the fiber
    direction there is the orthogonal complement inside W, and its angle to
    the plane is asin(|N.q| / |N||q|).
    """
    report = TransversalityReport(singular_line(fam))
    if grid <= 0:
        return report
    x0, x1, y0, y1 = region
    nvec = np.array(fam.normal, dtype=float)
    nvec /= np.linalg.norm(nvec)
    xs = x0 + (np.arange(grid) + 0.5) * (x1 - x0) / grid
    ys = y0 + (np.arange(grid) + 0.5) * (y1 - y0) / grid
    if report.singular.point is not None:
        # make sure the exact singular point is sampled as well
        extra = [report.singular.point]
    else:
        extra = []
    points = [complex(x, y) for y in ys for x in xs] + extra
    angles = []
    for z in points:
        B, C = -2 * z.real, abs(z) ** 2
        w = np.array([[1.0, B, C, 0.0], [0.0, 1.0, B, C]])
        q, _ = np.linalg.qr(w.T)
        proj = nvec @ q  # the normal's components inside W
        # the fiber's direction at the family point is orthogonal to the
        # family cubic inside W, i.e. along proj itself
        ang = math.asin(min(1.0, float(np.linalg.norm(proj))))
        angles.append(ang)
        if ang < tol:
            report.flagged.append(z)
    report.samples = len(points)
    report.min_angle = min(angles)
    return report
