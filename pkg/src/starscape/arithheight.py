"""Arithmetic complexity: naive height, Mahler measure, Weil height and friends."""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Optional, Tuple

from .hypgeo import IDENTITY, S, MobiusInt, act, translation
from .polylattice import IntPoly, content_normalize, discriminant, is_minimal
from .rootfind import finite_roots


def naive_height(p: IntPoly) -> int:
    return max(abs(c) for c in p.coeffs)


def mahler_measure(p: IntPoly) -> float:
    """|a_d| times the product of max(1, |root|) over the finite roots."""
    c = p.stripped
    m = abs(c[0])
    for z in finite_roots(c):
        m *= max(1.0, abs(z))
    return float(m)


def weil_height(p: IntPoly) -> float:
    if not is_minimal(p):
        raise ValueError(f"{p} is not a minimal polynomial")
    deg = len(p.stripped) - 1
    return mahler_measure(p) ** (1.0 / deg)


def root_discriminant(p: IntPoly) -> float:
    disc = discriminant(p)
    if disc == 0:
        raise ValueError("zero discriminant")
    return abs(disc) ** (1.0 / p.degree)


def psl_reduce_quadratic(p: IntPoly) -> Tuple[IntPoly, MobiusInt]:
    """Move the upper root into the standard fundamental domain.

    Returns the reduced form and the transform A with act(A, p) equal to it.
    Boundary convention: reduced roots have Re z in (-1/2, 1/2], and a root on
    the unit circle has Re z >= 0.
    """
    if p.degree != 2:
        raise ValueError("only quadratics are reduced")
    a, b, c = p.coeffs
    if b * b - 4 * a * c >= 0:
        raise ValueError("reduction needs a negative discriminant")
    A = IDENTITY
    while True:
        k = (b + a) // (2 * a)
        if k:
            b, c = b - 2 * a * k, a * k * k - b * k + c
            A = translation(k) @ A
        if c < a:
            a, b, c = c, -b, a
            A = S @ A
            continue
        break
    if a == c and b > 0:
        a, b, c = c, -b, a
        A = S @ A
    return content_normalize((a, b, c)), A


def psl_height(p: IntPoly) -> int:
    reduced, _ = psl_reduce_quadratic(p)
    return naive_height(reduced)


def psl_norm(p: IntPoly) -> float:
    """|c / a| of the reduced form, the squared modulus of the reduced root."""
    reduced, _ = psl_reduce_quadratic(p)
    a, _, c = reduced.coeffs
    return abs(c / a)


@dataclass(frozen=True)
class HeightReport:
    naive: int
    mahler: float
    weil: float
    abs_disc: int
    root_disc: float
    psl_naive: Optional[int] = None

    def as_dict(self) -> dict:
        return asdict(self)


def height_report(p: IntPoly) -> HeightReport:
    deg = len(p.stripped) - 1
    mahler = mahler_measure(p)
    disc = discriminant(p)
    psl = None
    if p.degree == 2 and disc < 0:
        psl = psl_height(p)
    return HeightReport(
        naive=naive_height(p),
        mahler=mahler,
        weil=mahler ** (1.0 / deg) if deg > 0 else 1.0,
        abs_disc=abs(disc),
        root_disc=abs(disc) ** (1.0 / p.degree),
        psl_naive=psl,
    )


@dataclass
class InequalityReport:
    """Margins (right side minus left side); a check holds when margin >= 0."""

    margins: dict

    @property
    def ok(self) -> bool:
        return all(m >= 0 for m in self.margins.values())

    def failures(self) -> list:
        return [k for k, m in self.margins.items() if m < 0]


# slack for floating comparisons of Mahler measures computed from roots
_REL = 1e-9


def verify_height_inequalities(p: IntPoly) -> InequalityReport:
    c = p.stripped
    d = len(c) - 1
    if d < 1 or d > 5:
        raise ValueError("degree must be between 1 and 5")
    h = max(abs(v) for v in c)
    m = mahler_measure(p)
    disc = abs(discriminant(content_normalize(c)))
    margins = {
        "mahler_lower": m * (1 + _REL) - h / math.comb(d, d // 2),
        "mahler_upper": math.sqrt(d + 1) * h * (1 + _REL) - m,
        "disc_upper": d ** d * (d + 1) ** (d - 1) * h ** (2 * d - 2) - disc,
    }
    if d == 2 and p.degree == 2 and discriminant(p) < 0:
        reduced, _ = psl_reduce_quadratic(p)
        ra, _, rc = reduced.coeffs
        hp = naive_height(reduced)
        margins["disc_ge_3h"] = disc - 3 * hp
        # |D| >= 3 H^2 / N with N = c/a, i.e. |D| a >= 3 H^2 a / c; compared exactly
        margins["disc_ge_3h2_over_n"] = disc * rc - 3 * hp * hp * ra
        margins["disc_le_12h2"] = 12 * hp * hp - disc
    return InequalityReport(margins)
