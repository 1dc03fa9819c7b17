"""Approximating a point of the upper half plane by quadratic irrationals.

Distances are hyperbolic and complexity is the absolute discriminant.  The
working frame follows the linear-form setup: a target alpha gives the vector
[alpha1 : 1 : alpha2] with alpha1 = 1/(alpha + conj alpha) and
alpha2 = alpha conj(alpha) / (alpha + conj alpha).  That vector is the
quadratic x^2 + (alpha + conj alpha) x + |alpha|^2, whose roots are the mirror
images -conj(alpha), -alpha.  A frame vector [p1 : n : p2] therefore stands
for the actual approximant p1 x^2 - n x + p2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from .arithheight import psl_height, psl_norm
from .hypgeo import Geodesic, act, on_rational_geodesic, translation
from .polylattice import IntPoly, content_normalize, is_minimal

CLOSE_LIMIT = 1.0  # cosh(d) - 1 below this, i.e. d < acosh 2


class QuadraticTarget(ValueError):
    """The target is itself quadratic, so the construction ends in an exact hit."""


class NotOnGeodesic(ValueError):
    pass


class NonAlgebraicTarget(ValueError):
    pass


class PrecisionExhausted(ArithmeticError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


# ---------------------------------------------------------------------------
# targets


@dataclass(frozen=True)
class Target:
    """A point alpha of the upper half plane together with its working frame.

    ``shift`` is the integer translation applied before building the frame
    (needed when Re alpha is near 0).  ``geodesic`` is a rational geodesic
    through the original alpha, if one was found.
    """

    value: mpmath.mpc
    precision: int = 100
    description: str = ""
    poly: Optional[Tuple[int, ...]] = None
    shift: int = 0
    geodesic: Optional[Geodesic] = None

    @classmethod
    def build(cls, value, precision: int = 100, description: str = "",
              poly: Optional[Sequence[int]] = None, find_geodesic: bool = True,
              coeff_bound: int = 10 ** 6) -> "Target":
        if precision < 50:
            raise ValueError("precision must be at least 50 digits")
        with mpmath.workdps(precision):
            value = mpmath.mpc(value)
            if value.imag <= 0:
                raise ValueError("target must lie in the upper half plane")
            shift = 1 if abs(value.real) < mpmath.mpf("0.1") else 0
            geo = None
            if find_geodesic:
                geo = on_rational_geodesic(value, coeff_bound, precision, poly)
        return cls(value, precision, description, tuple(poly) if poly else None, shift, geo)

    @classmethod
    def from_poly(cls, coeffs: Sequence[int], precision: int = 100, which: int = 0,
                  **kw) -> "Target":
        p = content_normalize(coeffs)
        if not is_minimal(p):
            raise ValueError("target polynomial must be minimal")
        with mpmath.workdps(precision + 20):
            rts = mpmath.polyroots(list(p.stripped), maxsteps=400, extraprec=4 * precision)
            ups = sorted((r for r in rts if mpmath.im(r) > 0),
                         key=lambda r: (float(mpmath.re(r)), float(mpmath.im(r))))
        if not ups:
            raise ValueError("polynomial has no non-real root")
        desc = "poly:" + ",".join(str(c) for c in p.coeffs)
        return cls.build(ups[which], precision, desc, p.stripped, **kw)

    @property
    def degree(self) -> Optional[int]:
        return None if self.poly is None else len(self.poly) - 1

    @property
    def work(self) -> mpmath.mpc:
        return self.value + self.shift

    @property
    def coefvec(self) -> Tuple[mpmath.mpf, mpmath.mpf]:
        with mpmath.workdps(self.precision):
            w = self.work
            s = 2 * w.real
            return 1 / s, (w.real ** 2 + w.imag ** 2) / s

    @property
    def work_geodesic(self) -> Optional[Geodesic]:
        if self.geodesic is None:
            return None
        moved = act(translation(self.shift), self.geodesic.normal)
        return Geodesic(moved.coeffs)


def parse_target(spec: str, precision: int = 100) -> Target:
    """Parse ``unit-circle:<x>``, ``poly:<c0,c1,...>`` or ``expr:<value>``."""
    import sympy

    kind, _, body = spec.partition(":")
    if not body:
        raise ValueError(f"malformed target {spec!r}")
    kind = kind.strip().lower()
    if kind == "poly":
        coeffs = [int(v) for v in body.split(",")]
        return Target.from_poly(coeffs, precision)
    with mpmath.workdps(precision + 10):
        val = sympy.sympify(body, locals={"i": sympy.I, "j": sympy.I})
        num = complex(0)
        num = mpmath.mpmathify(str(sympy.N(val, precision + 10)).replace("*I", "j").replace(" ", ""))
        if kind == "unit-circle":
            x = mpmath.re(num)
            alpha = mpmath.mpc(x, mpmath.sqrt(1 - x * x))
        elif kind == "expr":
            alpha = mpmath.mpc(num)
        else:
            raise ValueError(f"unknown target kind {kind!r}")
    return Target.build(alpha, precision, spec)


# ---------------------------------------------------------------------------
# records


@dataclass(frozen=True)
class ApproxRecord:
    poly: IntPoly
    beta: mpmath.mpc
    disc: int
    dist: mpmath.mpf
    quality: Optional[mpmath.mpf]
    on_target_geodesic: bool
    cosh_m1: mpmath.mpf = field(default=None, compare=False)
    extra: dict = field(default_factory=dict, compare=False)

    def row(self) -> dict:
        a, b, c = self.poly.coeffs
        return {
            "disc": -self.disc, "a": a, "b": b, "c": c,
            "beta_re": mpmath.nstr(self.beta.real, 20),
            "beta_im": mpmath.nstr(self.beta.imag, 20),
            "dist": mpmath.nstr(self.dist, 12),
            "quality": "" if self.quality is None else mpmath.nstr(self.quality, 8),
            "on_geodesic": int(self.on_target_geodesic),
        }


def _eps_between(alpha: mpmath.mpc, a: int, b: int, c: int):
    """cosh(d) - 1 between alpha and the upper root of a x^2 + b x + c."""
    disc = 4 * a * c - b * b
    beta = mpmath.mpc(mpmath.mpf(-b) / (2 * a), mpmath.sqrt(disc) / (2 * abs(a)))
    diff = alpha - beta
    eps = (diff.real ** 2 + diff.imag ** 2) / (2 * alpha.imag * beta.imag)
    return eps, beta


def _is_exact_hit(t: Target, eps) -> bool:
    return eps < mpmath.mpf(10) ** (-(t.precision * 9) // 10)


def make_record(t: Target, work_coeffs: Sequence[int], extra=None) -> Optional[ApproxRecord]:
    """Record for a working-frame quadratic; None when it is not a valid approximant."""
    f = content_normalize(work_coeffs)
    a, b, c = f.coeffs
    disc = 4 * a * c - b * b
    if disc <= 0:
        return None
    with mpmath.workdps(t.precision):
        eps, beta_w = _eps_between(t.work, a, b, c)
        if _is_exact_hit(t, eps):
            return None
        dist = 2 * mpmath.asinh(mpmath.sqrt(eps / 2))
        quality = -mpmath.log(eps) / mpmath.log(disc) if disc >= 2 else None
        geo = t.work_geodesic
        on_geo = bool(geo is not None and geo.contains(f.coeffs))
        original = act(translation(-t.shift), f) if t.shift else f
        return ApproxRecord(original, beta_w - t.shift, disc, dist, quality, on_geo, eps,
                            dict(extra or {}))


def fit_slope(records: Sequence[ApproxRecord]) -> Tuple[float, float]:
    """Least-squares slope and intercept of log(cosh d - 1) against log |disc|."""
    xs = np.array([math.log(r.disc) for r in records])
    ys = np.array([float(mpmath.log(r.cosh_m1)) for r in records])
    slope, intercept = np.polyfit(xs, ys, 1)
    return float(slope), float(intercept)


# ---------------------------------------------------------------------------
# linear forms and repulsion


@dataclass(frozen=True)
class LinearForms:
    L1: mpmath.mpf
    L2: mpmath.mpf
    L3: mpmath.mpf

    def identity_residual(self, alpha1, alpha2):
        return abs(self.L1 * alpha2 + self.L2 * alpha1 - self.L3)


def linear_forms(t: Target, f_beta: Sequence) -> LinearForms:
    """L1 = n a1 - p1, L2 = -n a2 + p2, L3 = a1 p2 - a2 p1 for f_beta = [p1:n:p2]."""
    p1, n, p2 = f_beta
    with mpmath.workdps(t.precision):
        a1, a2 = t.coefvec
        return LinearForms(n * a1 - p1, -n * a2 + p2, a1 * p2 - a2 * p1)


@dataclass(frozen=True)
class RepulsionCheck:
    bound: float
    actual: float
    margin: float
    equal_disc: bool


def repulsion_bound(d1: int, d2: int) -> float:
    """Lower bound on cosh(d) - 1 between distinct quadratics of |disc| d1, d2."""
    if d1 == d2:
        return 1.0 / d1
    return (math.sqrt(2) - 1) / math.sqrt(d1 * d2)


def repulsion_check(f1, f2) -> RepulsionCheck:
    """Compare the actual distance of two quadratics with the repulsion bound."""
    from .hypgeo import cosh_minus_one

    f1 = content_normalize(f1 if not isinstance(f1, IntPoly) else f1.coeffs)
    f2 = content_normalize(f2 if not isinstance(f2, IntPoly) else f2.coeffs)
    if f1 == f2:
        raise ValueError("identical projective classes")
    d1 = -(f1[1] ** 2 - 4 * f1[0] * f1[2])
    d2 = -(f2[1] ** 2 - 4 * f2[0] * f2[2])
    eps = cosh_minus_one(f1.coeffs, f2.coeffs)
    bnd = repulsion_bound(d1, d2)
    actual = math.acosh(1 + eps) if eps > 1e-8 else 2 * math.asinh(math.sqrt(eps / 2))
    bound = math.acosh(1 + bnd)
    return RepulsionCheck(bound, actual, actual - bound, d1 == d2)


def repulsion_violations(forms: np.ndarray, exact: bool = True) -> dict:
    """Scan all pairs of a form list against both repulsion bounds.

    Each pair is decided by integer arithmetic: with g = |<f1,f2>| and
    P = D1 D2, the general bound reads g >= sqrt(P) + sqrt(2) - 1 and the
    equal-discriminant bound reads g >= D + 1.
    """
    f = np.asarray(forms, dtype=np.int64)
    a, b, c = f[:, 0], f[:, 1], f[:, 2]
    disc = 4 * a * c - b * b
    general = 0
    equal = 0
    worst = None
    examples = []
    shift = math.sqrt(2) - 1
    for i in range(len(f)):
        j = np.arange(i + 1, len(f))
        if len(j) == 0:
            break
        g = np.abs(b[i] * b[j] - 2 * a[i] * c[j] - 2 * a[j] * c[i])
        prod = disc[i] * disc[j]
        same = disc[j] == disc[i]
        # general bound: (g - shift)^2 >= P with g - shift > 0, exact up to the
        # irrational shift which never makes the comparison an equality
        lhs = g.astype(float) - shift
        bad_general = (~same) & ((lhs < 0) | (lhs * lhs < prod.astype(float)))
        # refine borderline float decisions with exact integers
        border = (~same) & (np.abs(lhs * lhs - prod) < 1e-6 * prod)
        for k in np.nonzero(border)[0]:
            gi, pi = int(g[k]), int(prod[k])
            # g - shift >= sqrt(P)  <=>  g >= sqrt(P) + shift, use high precision
            with mpmath.workdps(50):
                ok = mpmath.mpf(gi) >= mpmath.sqrt(pi) + mpmath.sqrt(2) - 1
            bad_general[k] = not ok
        bad_equal = same & (g < disc[i] + 1)
        general += int(bad_general.sum())
        equal += int(bad_equal.sum())
        if bad_general.any() and len(examples) < 5:
            k = np.nonzero(bad_general)[0][0]
            examples.append((tuple(int(v) for v in f[i]), tuple(int(v) for v in f[j[k]])))
    return {"pairs": len(f) * (len(f) - 1) // 2, "general": general, "equal": equal,
            "examples": examples}


# ---------------------------------------------------------------------------
# Dirichlet constructions


def convergents(x: mpmath.mpf, limit: int = 200) -> Iterator[Tuple[int, int]]:
    """Continued-fraction convergents (h, k) with h/k -> x."""
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    tiny = mpmath.mpf(10) ** (-(mpmath.mp.dps * 3) // 4)
    for _ in range(limit):
        a = int(mpmath.floor(x))
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        yield h1, k1
        frac = x - a
        if frac < tiny:
            return
        x = 1 / frac
        # stop when the expansion outruns the working precision
        if k1 * k1 > mpmath.mpf(10) ** (mpmath.mp.dps - 10):
            return


def dirichlet_geodesic(t: Target, max_records: int = 20, max_terms: int = 400
                       ) -> Iterator[ApproxRecord]:
    """Approximants on the target's rational geodesic from convergents.

    With the geodesic a alpha1 + b + c alpha2 = 0 and a convergent q0/n0 of
    alpha1, the vector [c q0 : c n0 : -b n0 - a q0] lies on the geodesic.
    """
    if t.degree == 2:
        raise QuadraticTarget("target is quadratic")
    geo = t.work_geodesic
    if geo is None:
        raise NotOnGeodesic("target has no known rational geodesic")
    p0, p1, p2 = geo.plane
    a, b, c = p0, -p1, p2
    seen = set()
    emitted = 0
    with mpmath.workdps(t.precision):
        alpha1, alpha2 = t.coefvec
        use_first = c != 0
        source = alpha1 if use_first else alpha2
        for q0, n0 in convergents(source, max_terms):
            if use_first:
                frame = (c * q0, c * n0, -b * n0 - a * q0)
            else:
                frame = (-b * n0 - c * q0, a * n0, a * q0)
            if not any(frame):
                continue
            actual = (frame[0], -frame[1], frame[2])
            rec = make_record(t, actual, {"n0": n0, "q0": q0})
            if rec is None or rec.poly in seen or rec.cosh_m1 >= CLOSE_LIMIT:
                continue
            seen.add(rec.poly)
            yield rec
            emitted += 1
            if emitted >= max_records:
                return


def _lll(rows):
    from sympy.polys.domains import ZZ
    from sympy.polys.matrices import DomainMatrix

    m = DomainMatrix([[ZZ(int(v)) for v in row] for row in rows], (len(rows), len(rows[0])), ZZ)
    red = m.lll()
    return [[int(v) for v in row] for row in red.to_Matrix().tolist()]


def _residuals(n, p1, p2, alpha1, alpha2):
    return max(abs(n * alpha1 - p1), abs(n * alpha2 - p2))


def simultaneous_approximation(alpha1, alpha2, Q: float) -> Optional[Tuple[int, int, int]]:
    """Find (n, p1, p2) with |n a1 - p1|, |n a2 - p2| < 1/Q and 1 <= n <= Q^2.

    Small Q scans n directly; larger Q reduces the simultaneous-approximation
    lattice.  Any reduced vector that meets the bounds for some real Q' is
    returned with its witness, so the caller can record the Q it attains.
    """
    if Q <= 1000:
        nmax = int(Q * Q)
        ns = np.arange(1, nmax + 1, dtype=np.float64)
        a1, a2 = float(alpha1), float(alpha2)
        r1 = np.abs(ns * a1 - np.round(ns * a1))
        r2 = np.abs(ns * a2 - np.round(ns * a2))
        ok = np.nonzero((r1 < 1.0 / Q) & (r2 < 1.0 / Q))[0]
        for idx in ok[:10]:
            n = int(ns[idx])
            p1 = int(mpmath.nint(n * alpha1))
            p2 = int(mpmath.nint(n * alpha2))
            if _residuals(n, p1, p2, alpha1, alpha2) < 1 / mpmath.mpf(Q):
                return n, p1, p2
    big_m = int(mpmath.ceil(mpmath.mpf(Q) ** 2))
    big_k = int(mpmath.ceil(mpmath.mpf(Q) ** 3)) * big_m
    r1 = int(mpmath.nint(big_k * alpha1))
    r2 = int(mpmath.nint(big_k * alpha2))
    basis = _lll([[big_m, r1, r2], [0, big_k, 0], [0, 0, big_k]])
    best = None
    for u in range(-2, 3):
        for v in range(-2, 3):
            for w in range(-2, 3):
                vec = [u * basis[0][i] + v * basis[1][i] + w * basis[2][i] for i in range(3)]
                if vec[0] == 0 or vec[0] % big_m:
                    continue
                n = vec[0] // big_m
                if n < 0:
                    n, vec = -n, [-x for x in vec]
                p1 = (n * r1 - vec[1]) // big_k
                p2 = (n * r2 - vec[2]) // big_k
                res = _residuals(n, p1, p2, alpha1, alpha2)
                if res * res * n < 1 and (best is None or n < best[0]):
                    best = (n, p1, p2)
    return best


def dirichlet_general(t: Target, max_records: int = 20, q_start: float = 2.0,
                      q_ratio: float = 1.5, max_steps: int = 200) -> Iterator[ApproxRecord]:
    """Approximants from simultaneous approximation of (alpha1, alpha2)."""
    if t.degree == 2:
        raise QuadraticTarget("target is quadratic")
    seen = set()
    emitted = 0
    with mpmath.workdps(t.precision):
        alpha1, alpha2 = t.coefvec
        Q = q_start
        for _ in range(max_steps):
            found = simultaneous_approximation(alpha1, alpha2, Q)
            Q *= q_ratio
            if found is None:
                continue
            n, p1, p2 = found
            res = _residuals(n, p1, p2, alpha1, alpha2)
            witness_q = mpmath.sqrt(n)
            rec = make_record(t, (p1, -n, p2), {"n": n, "p1": p1, "p2": p2,
                                                "Q": float(witness_q),
                                                "residual": float(res)})
            if rec is None or rec.poly in seen or rec.cosh_m1 >= CLOSE_LIMIT:
                continue
            seen.add(rec.poly)
            yield rec
            emitted += 1
            if emitted >= max_records:
                return


# ---------------------------------------------------------------------------
# exhaustive neighbourhood scans


def _neighbourhood(x: float, y: float, disc_bound: int, eps_bound, chunk_limit=4_000_000):
    """Primitive forms (a, b, c), a > 0, 3 <= D <= disc_bound, near x + iy.

    ``eps_bound(D)`` is a non-increasing upper bound for cosh(d) - 1.  Yields
    arrays (a, b, c, D, eps) with eps computed in floating point, filtered with
    a small relative slack so exact checks can follow.
    """
    eps0 = float(eps_bound(np.array([3.0]))[0])
    r0 = math.acosh(1 + eps0)
    ylow0 = y * math.exp(-r0)
    a_max = int(math.sqrt(disc_bound) / (2 * ylow0)) + 1
    for a in range(1, a_max + 1):
        dlo = max(3.0, 4.0 * a * a * ylow0 * ylow0)
        if dlo > disc_bound:
            continue
        eps_a = float(eps_bound(np.array([dlo]))[0])
        r = math.acosh(1 + eps_a)
        half = y * math.sinh(r)
        blo = math.ceil(-2 * a * (x + half))
        bhi = math.floor(-2 * a * (x - half))
        if bhi < blo:
            continue
        dmin = max(3, math.floor(4 * a * a * (y * math.exp(-r)) ** 2))
        dmax = min(disc_bound, math.ceil(4 * a * a * (y * math.exp(r)) ** 2))
        if dmax < dmin:
            continue
        bs = np.arange(blo, bhi + 1, dtype=np.int64)
        clo = (dmin + bs * bs + 4 * a - 1) // (4 * a)
        chi = (dmax + bs * bs) // (4 * a)
        counts = np.maximum(chi - clo + 1, 0)
        total = int(counts.sum())
        if total == 0:
            continue
        bb = np.repeat(bs, counts)
        starts = np.repeat(clo, counts)
        offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        cc = starts + offs
        dd = 4 * a * cc - bb * bb
        xs = -bb / (2.0 * a)
        ys = np.sqrt(dd.astype(float)) / (2.0 * a)
        eps = ((xs - x) ** 2 + (ys - y) ** 2) / (2 * y * ys)
        keep = eps <= eps_bound(dd.astype(float)) * (1 + 1e-6) + 1e-14
        keep &= np.gcd(np.gcd(np.int64(a), bb), cc) == 1
        if keep.any():
            idx = np.nonzero(keep)[0]
            yield (np.full(len(idx), a, dtype=np.int64), bb[idx], cc[idx], dd[idx], eps[idx])


def best_approximants(t: Target, disc_bound: int, top: int = 3) -> List[ApproxRecord]:
    """For each |disc| up to the bound, the nearest quadratic within d < acosh 2.

    Exhaustive: every primitive form whose root lies in the ball is examined.
    The few nearest candidates per discriminant are re-ranked at full
    precision so that exact hits and near-ties are decided correctly.
    """
    with mpmath.workdps(t.precision):
        x, y = float(t.work.real), float(t.work.imag)
    parts = list(_neighbourhood(x, y, disc_bound, lambda d: np.full_like(d, CLOSE_LIMIT)))
    if not parts:
        return []
    a, b, c, d, eps = (np.concatenate(col) for col in zip(*parts))
    order = np.lexsort((c, b, a, eps, d))
    a, b, c, d, eps = a[order], b[order], c[order], d[order], eps[order]
    starts = np.nonzero(np.r_[True, d[1:] != d[:-1]])[0]
    ends = np.r_[starts[1:], len(d)]
    records = []
    for s, e in zip(starts, ends):
        best = None
        # float ranking is trusted unless the runner-up is a near tie or the
        # leader is so close that it may be an exact hit
        stop = s + 1
        while stop < min(e, s + top) and (
                eps[stop] <= eps[s] * (1 + 1e-6) + 1e-13 or eps[stop - 1] < 1e-10):
            stop += 1
        for k in range(s, stop):
            rec = make_record(t, (int(a[k]), int(b[k]), int(c[k])))
            if rec is None or rec.cosh_m1 >= CLOSE_LIMIT:
                continue
            if best is None or rec.cosh_m1 < best.cosh_m1:
                best = rec
        if best is not None:
            records.append(best)
    records.sort(key=lambda r: (-r.quality, r.disc, r.poly.coeffs))
    return records


@dataclass
class RothScan:
    exponent: float
    disc_bound: int
    on_geodesic: List[ApproxRecord]
    off_geodesic: List[ApproxRecord]

    @property
    def count(self) -> int:
        return len(self.on_geodesic) + len(self.off_geodesic)

    def all(self) -> List[ApproxRecord]:
        return sorted(self.on_geodesic + self.off_geodesic, key=lambda r: (r.disc, r.poly.coeffs))


def roth_scan(t: Target, exponent: float, disc_bound: int,
              allow_transcendental: bool = False) -> RothScan:
    """All quadratics with cosh(d) - 1 < |disc|^-exponent and |disc| <= bound."""
    if t.poly is None and not allow_transcendental:
        raise NonAlgebraicTarget("roth_scan needs an algebraic target")
    with mpmath.workdps(t.precision):
        x, y = float(t.work.real), float(t.work.imag)
    on, off = [], []
    bound = lambda d: np.power(d, -float(exponent))  # noqa: E731
    with mpmath.workdps(t.precision):
        expo = mpmath.mpf(exponent)
        for a, b, c, d, eps in _neighbourhood(x, y, disc_bound, lambda d: 2 * bound(d)):
            for k in range(len(a)):
                rec = make_record(t, (int(a[k]), int(b[k]), int(c[k])))
                if rec is None:
                    continue
                if rec.cosh_m1 < mpmath.mpf(rec.disc) ** (-expo):
                    (on if rec.on_target_geodesic else off).append(rec)
    key = lambda r: (r.disc, r.poly.coeffs)  # noqa: E731
    return RothScan(float(exponent), disc_bound, sorted(on, key=key), sorted(off, key=key))


# ---------------------------------------------------------------------------
# Liouville chains


def _chain_holds(f1: Sequence[int], f2: Sequence[int], k: int) -> bool:
    """Exact test of cosh d(f1, f2) - 1 < |disc f1|^-k.

    With g = |<f1,f2>|, P = D1 D2 and D = D1 the inequality
    g / sqrt(P) < 1 + D^-k is equivalent to g^2 D^2k < (D^k + 1)^2 P.
    """
    a1, b1, c1 = f1
    a2, b2, c2 = f2
    d1 = 4 * a1 * c1 - b1 * b1
    d2 = 4 * a2 * c2 - b2 * b2
    g = abs(b1 * b2 - 2 * a1 * c2 - 2 * a2 * c1)
    dk = d1 ** k
    return g * g * dk * dk < (dk + 1) ** 2 * d1 * d2


def _circle_form(n: int, q: int) -> Tuple[int, int, int]:
    # q x^2 - n x + q has its roots on the unit circle at real part n / 2q
    return (q, -n, q)


def _neighbours(n: int, q: int) -> List[Tuple[int, int]]:
    """Farey neighbours (n', q') of n/q, i.e. n q' - n' q = +-1 and 0 <= q' <= q."""
    # extended Euclid for n q' - q n' = 1
    g, s, t = _egcd(n, q)
    if g != 1:
        raise ValueError("n/q must be in lowest terms")
    qp, np_ = s % q if q > 1 else 0, None
    # n*s + q*t = 1 -> q' = s, n' = -t (adjusted to 0 <= q' < q)
    base_q = s
    base_n = -t
    m = (base_q // q) if q else 0
    base_q -= m * q
    base_n -= m * n
    return [(base_n, base_q), (n - base_n, q - base_q)]


def _egcd(a: int, b: int):
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


@dataclass
class LiouvilleResult:
    polys: List[IntPoly]
    limit: mpmath.mpc
    chain_ok: List[bool]
    precision: int

    @property
    def discs(self) -> List[int]:
        return [4 * p[0] * p[2] - p[1] ** 2 for p in self.polys]


def liouville_build(steps: int, geodesic: str = "unit-circle", precision: int = 400,
                    start: Tuple[int, int] = (1, 1)) -> LiouvilleResult:
    """Build beta_1, beta_2, ... with d(beta_k, beta_k+1) < acosh(1 + |D_k|^-k).

    Every beta_k sits on the unit circle with real part n/2q.  The next term
    is a Farey-neighbour mediant m*(n, q) + (n', q') with the smallest m that
    satisfies the chain inequality, which is decided exactly in integers.
    The build stops with :class:`PrecisionExhausted` once the next gap would
    not be resolvable at the requested precision.
    """
    if geodesic != "unit-circle":
        raise ValueError("only unit-circle chains are supported")
    if steps < 1 or steps > 60:
        raise ValueError("steps must be in 1..60")
    n, q = start
    chain = [_circle_form(n, q)]
    oks: List[bool] = []
    for k in range(1, steps):
        f = chain[-1]
        disc = 4 * f[0] * f[2] - f[1] ** 2
        needed = k * math.log10(disc) + 10
        if needed > precision:
            raise PrecisionExhausted(
                f"step {k + 1} needs about {needed:.0f} digits, have {precision}",
                partial=_finish(chain, oks, precision))
        best = None
        for nn, qq in _neighbours(n, q):
            if qq <= 0:
                continue
            cand = _smallest_multiplier(n, q, nn, qq, f, k)
            cd = 4 * cand[1] * cand[1] - cand[0] ** 2
            if best is None or cd < best[2]:
                best = (cand[0], cand[1], cd)
        n, q = best[0], best[1]
        nxt = _circle_form(n, q)
        oks.append(_chain_holds(f, nxt, k))
        chain.append(nxt)
    return _finish(chain, oks, precision)


def _smallest_multiplier(n, q, nn, qq, f, k):
    def cand(m):
        return (m * n + nn, m * q + qq)

    def ok(m):
        cn, cq = cand(m)
        if abs(cn) >= 2 * cq:
            return False
        return _chain_holds(f, _circle_form(cn, cq), k)

    hi = 1
    while not ok(hi):
        hi *= 2
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return cand(hi)


def _finish(chain, oks, precision) -> LiouvilleResult:
    polys = [content_normalize(f) for f in chain]
    with mpmath.workdps(precision):
        a, b, c = chain[-1]
        disc = 4 * a * c - b * b
        limit = mpmath.mpc(mpmath.mpf(-b) / (2 * a), mpmath.sqrt(disc) / (2 * a))
    return LiouvilleResult(polys, limit, oks, precision)


# ---------------------------------------------------------------------------
# translation to classical (euclidean, naive height) statements


@dataclass(frozen=True)
class ClassicalRecord:
    euclid: mpmath.mpf
    psl_height: int
    psl_norm: float
    conformal_ratio: float
    euclid_exponent: Optional[float]
    upper_bound_ok: bool
    disc_ge_3h: bool


def classical_translate(r: ApproxRecord, t: Target, slack: float = 0.05) -> ClassicalRecord:
    """Euclidean distance and PSL-reduced height for a record.

    ``upper_bound_ok`` checks |alpha - beta| against the euclidean bound
    (1 + slack) Im(alpha) N^(k/2) sqrt(2C) / (3^(k/2) H^k) taken at the
    record's own quality k with C = 1.
    """
    with mpmath.workdps(t.precision):
        euclid = abs(t.value - r.beta)
        h = psl_height(r.poly)
        nrm = psl_norm(r.poly)
        ratio = float(euclid / (t.value.imag * r.dist)) if r.dist > 0 else float("nan")
        expo = float(-mpmath.log(euclid) / mpmath.log(h)) if h > 1 else None
        ok = True
        if r.quality is not None:
            k = r.quality
            bound = ((1 + slack) * t.value.imag * mpmath.mpf(nrm) ** (k / 2) * mpmath.sqrt(2)
                     / (mpmath.mpf(3) ** (k / 2) * mpmath.mpf(h) ** k))
            ok = bool(euclid < bound)
        return ClassicalRecord(euclid, h, nrm, ratio, expo, ok, r.disc >= 3 * h)
