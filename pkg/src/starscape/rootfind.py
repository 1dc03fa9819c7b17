"""Roots of integer binary forms in the extended complex plane.

Degree <= 2 is solved in closed form.  Higher degrees use Aberth-Ehrlich
simultaneous iteration followed by Newton polishing.  Real/complex
classification in degrees 2 and 3 always follows the exact sign of the
discriminant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .polylattice import IntPoly, discriminant_of

MAX_SWEEPS = 200


class RootFindingError(ArithmeticError):
    """Simultaneous iteration failed to converge within the sweep cap."""


@dataclass(frozen=True)
class ProjRoot:
    value: Optional[complex]  # None stands for the point at infinity
    multiplicity: int = 1

    @property
    def kind(self) -> str:
        return "infinity" if self.value is None else "finite"

    @property
    def is_real(self) -> bool:
        return self.value is None or self.value.imag == 0.0


@dataclass(frozen=True)
class RootSet:
    roots: Tuple[ProjRoot, ...]
    pairs: Tuple[Tuple[int, int], ...]  # (upper, lower) indices into roots

    @property
    def signature(self) -> Tuple[int, int]:
        real = sum(r.multiplicity for r in self.roots if r.is_real)
        pairs = sum(self.roots[i].multiplicity for i, _ in self.pairs)
        return real, pairs

    def finite(self) -> List[complex]:
        out = []
        for r in self.roots:
            if r.value is not None:
                out.extend([r.value] * r.multiplicity)
        return out


def _horner(c, z):
    val = np.zeros_like(z) + c[0]
    der = np.zeros_like(z)
    for coef in c[1:]:
        der = der * z + val
        val = val * z + coef
    return val, der


def _initial_points(c: Sequence[float]) -> np.ndarray:
    m = len(c) - 1
    height = max(abs(x) for x in c)
    radius = 1.0 + height / abs(c[0])
    k = np.arange(m)
    # a fixed irrational offset keeps the start points off symmetry axes
    angles = 2 * np.pi * k / m + 0.4
    radii = radius * (1.0 + 0.01 * np.cos(3.0 * k + 1.0))
    return radii * np.exp(1j * angles)


def aberth(c: Sequence[float], sweeps: int = MAX_SWEEPS) -> np.ndarray:
    """All roots of a squarefree polynomial with nonzero leading coefficient."""
    c = np.asarray(c, dtype=complex)
    m = len(c) - 1
    z = _initial_points(np.abs(c))
    for _ in range(sweeps):
        val, der = _horner(c, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = val / der
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            corr = ratio / (1.0 - ratio * inv.sum(axis=1))
        corr = np.where(np.isfinite(corr), corr, 0.0)
        z = z - corr
        if np.all(np.abs(corr) <= 4e-16 * np.maximum(1.0, np.abs(z))):
            break
    else:
        if not _residual_ok(c, z, 1e-9):
            raise RootFindingError(f"no convergence after {sweeps} sweeps for {c}")
    return _polish(c, z)


def _polish(c, z, steps: int = 2):
    for _ in range(steps):
        val, der = _horner(c, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = val / der
        step = np.where(np.isfinite(step), step, 0.0)
        # only accept steps that actually reduce the residual
        znew = z - step
        newval, _ = _horner(c, znew)
        z = np.where(np.abs(newval) <= np.abs(val), znew, z)
    return z


def _residual_ok(c, z, tol) -> bool:
    c = np.asarray(c, dtype=complex)
    m = len(c) - 1
    height = np.max(np.abs(c))
    val, _ = _horner(c, z)
    bound = tol * height * np.maximum(1.0, np.abs(z)) ** m
    return bool(np.all(np.abs(val) <= bound))


def _quadratic_roots(a: int, b: int, c: int) -> List[complex]:
    disc = b * b - 4 * a * c
    if disc < 0:
        x = -b / (2 * a)
        y = math.sqrt(-disc) / (2 * abs(a))
        return [complex(x, y), complex(x, -y)]
    sq = math.sqrt(disc)
    if disc == 0:
        r = -b / (2 * a)
        return [complex(r, 0.0), complex(r, 0.0)]
    # avoid cancellation: pick the sign that adds magnitudes
    qv = -0.5 * (b + math.copysign(sq, b)) if b != 0 else -0.5 * sq
    if qv == 0:
        r = math.sqrt(-c / a)
        return [complex(-r, 0.0), complex(r, 0.0)]
    return sorted([complex(qv / a, 0.0), complex(c / qv, 0.0)], key=lambda z: z.real)


def _snap_and_pair(zs: np.ndarray, real_count: Optional[int]) -> List[complex]:
    """Snap near-real roots to the real axis and symmetrize conjugate pairs."""
    zs = list(complex(z) for z in zs)
    n = len(zs)
    order = sorted(range(n), key=lambda i: abs(zs[i].imag))
    if real_count is None:
        real_idx = [i for i in order if abs(zs[i].imag) < 1e-10 * (1 + abs(zs[i].real))]
        # non-real roots come in pairs, so the parity must match
        if (n - len(real_idx)) % 2:
            real_idx = order[: len(real_idx) + 1]
    else:
        real_idx = order[:real_count]
    reals = sorted(zs[i].real for i in real_idx)
    rest = [zs[i] for i in range(n) if i not in set(real_idx)]
    uppers = sorted((z for z in rest if z.imag > 0), key=lambda z: (z.real, z.imag))
    lowers = [z for z in rest if z.imag <= 0]
    # rebalance if a near-real root landed on the wrong side
    while len(uppers) > len(lowers):
        z = min(uppers, key=lambda w: w.imag)
        uppers.remove(z)
        lowers.append(z)
    while len(lowers) > len(uppers):
        z = max(lowers, key=lambda w: w.imag)
        lowers.remove(z)
        uppers.append(z)
    paired = []
    lowers = list(lowers)
    for u in sorted(uppers, key=lambda z: (z.real, z.imag)):
        j = min(range(len(lowers)), key=lambda k: abs(u - lowers[k].conjugate()))
        w = lowers.pop(j)
        mid = (u + w.conjugate()) / 2
        mid = complex(mid.real, abs(mid.imag))
        paired.append(mid)
    return [complex(r, 0.0) for r in reals] + paired


def _squarefree_parts(c: Sequence[int]) -> List[Tuple[Tuple[int, ...], int]]:
    import sympy

    x = sympy.Symbol("x")
    _, parts = sympy.sqf_list(sympy.Poly(list(c), x))
    return [(tuple(int(v) for v in q.all_coeffs()), k) for q, k in parts]


def _solve_squarefree(c: Sequence[int]) -> List[complex]:
    m = len(c) - 1
    if m == 1:
        return [complex(-c[1] / c[0], 0.0)]
    if m == 2:
        return _quadratic_roots(*c)
    disc = discriminant_of(c)
    real_count = None
    if m == 3:
        real_count = 3 if disc > 0 else 1
    z = aberth([float(v) for v in c])
    return _snap_and_pair(z, real_count)


def _order_roots(values: List[complex]) -> List[complex]:
    reals = sorted((z for z in values if z.imag == 0), key=lambda z: z.real)
    uppers = sorted((z for z in values if z.imag > 0), key=lambda z: (z.real, z.imag))
    return reals + [w for u in uppers for w in (u, u.conjugate())]


def finite_roots(c: Sequence[int]) -> List[complex]:
    """Roots of a univariate integer polynomial with nonzero leading term."""
    c = [int(v) for v in c]
    if len(c) <= 1:
        return []
    if discriminant_of(c) != 0:
        return _order_roots(_solve_squarefree(c))
    out = []
    for part, mult in _squarefree_parts(c):
        if len(part) > 1:
            out.extend(_solve_squarefree(part) * mult)
    return _order_roots(out)


def roots(p: IntPoly, tol: float = 1e-12) -> RootSet:
    """All roots of p with multiplicity, ordered reals first then pairs."""
    if not 1e-15 <= tol <= 1e-6:
        raise ValueError("tol must lie in [1e-15, 1e-6]")
    c = p.stripped
    vals = finite_roots(c)
    if len(c) > 3 and vals:
        height = max(abs(v) for v in c)
        m = len(c) - 1
        for z in vals:
            val = sum(cj * z ** (m - j) for j, cj in enumerate(c))
            if abs(val) > tol * height * max(1.0, abs(z)) ** m * (m + 1):
                raise RootFindingError(f"residual {abs(val):.3g} too large at {z}")
    grouped: List[ProjRoot] = []
    if p.leading_zeros:
        grouped.append(ProjRoot(None, p.leading_zeros))
    counts = {}
    for z in vals:
        counts[z] = counts.get(z, 0) + 1
    seen = set()
    for z in vals:
        if z in seen:
            continue
        seen.add(z)
        grouped.append(ProjRoot(z, counts[z]))
    index = {r.value: i for i, r in enumerate(grouped)}
    pairs = tuple(
        (i, index[r.value.conjugate()])
        for i, r in enumerate(grouped)
        if r.value is not None and r.value.imag > 0
    )
    return RootSet(tuple(grouped), pairs)


def upper_roots(p: IntPoly) -> List[complex]:
    c = p.stripped
    if len(c) == 3:
        a, b, cc = c
        disc = b * b - 4 * a * cc
        if disc >= 0:
            return []
        return [complex(-b / (2 * a), math.sqrt(-disc) / (2 * abs(a)))]
    return [z for z in finite_roots(c) if z.imag > 0]


def upper_root(p: IntPoly) -> Optional[complex]:
    """The upper-half-plane root of a form with exactly one conjugate pair."""
    ups = upper_roots(p)
    if not ups:
        return None
    if len(ups) > 1:
        raise ValueError(f"{p} has {len(ups)} conjugate pairs; use upper_roots")
    return ups[0]


def classify(p: IntPoly) -> Tuple[int, int]:
    """(real root count, conjugate pair count), counting infinity as real."""
    c = p.stripped
    inf = p.leading_zeros
    m = len(c) - 1
    if m <= 1:
        return inf + m, 0
    if m in (2, 3):
        disc = discriminant_of(c)
        if disc >= 0:
            return inf + m, 0
        return inf + m - 2, 1
    return roots(p).signature


# ---------------------------------------------------------------------------
# batch solving for rendering


def batch_quadratic_upper(coeffs: np.ndarray) -> np.ndarray:
    """Upper roots of many quadratics with a > 0 and negative discriminant."""
    a = coeffs[:, 0].astype(float)
    b = coeffs[:, 1].astype(float)
    disc = (coeffs[:, 1].astype(np.int64) ** 2
            - 4 * coeffs[:, 0].astype(np.int64) * coeffs[:, 2].astype(np.int64))
    return (-b + 1j * np.sqrt(-disc.astype(float))) / (2 * a)


def batch_aberth(coeffs: np.ndarray, sweeps: int = MAX_SWEEPS) -> np.ndarray:
    """Roots of many squarefree polynomials of one degree, shape (N, d).

    Rows that fail to converge are re-solved one at a time.
    """
    c = np.asarray(coeffs, dtype=float)
    n, m = c.shape[0], c.shape[1] - 1
    if n == 0:
        return np.zeros((0, m), dtype=complex)
    height = np.max(np.abs(c), axis=1)
    radius = 1.0 + height / np.abs(c[:, 0])
    k = np.arange(m)
    start = np.exp(1j * (2 * np.pi * k / m + 0.4)) * (1.0 + 0.01 * np.cos(3.0 * k + 1.0))
    z = radius[:, None] * start[None, :]
    active = np.ones(n, dtype=bool)
    eye = np.eye(m, dtype=bool)
    for _ in range(sweeps):
        idx = np.nonzero(active)[0]
        if len(idx) == 0:
            break
        zz = z[idx]
        cc = c[idx]
        val = np.repeat(cc[:, :1], m, axis=1).astype(complex)
        der = np.zeros_like(val)
        for j in range(1, m + 1):
            der = der * zz + val
            val = val * zz + cc[:, j:j + 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = val / der
            diff = zz[:, :, None] - zz[:, None, :]
            diff[:, eye] = 1.0
            inv = 1.0 / diff
            inv[:, eye] = 0.0
            corr = ratio / (1.0 - ratio * inv.sum(axis=2))
        corr = np.where(np.isfinite(corr), corr, 0.0)
        zz = zz - corr
        z[idx] = zz
        done = np.all(np.abs(corr) <= 4e-16 * np.maximum(1.0, np.abs(zz)), axis=1)
        active[idx[done]] = False
    # Newton polish on every row
    for _ in range(2):
        val = np.repeat(c[:, :1], m, axis=1).astype(complex)
        der = np.zeros_like(val)
        for j in range(1, m + 1):
            der = der * z + val
            val = val * z + c[:, j:j + 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            step = val / der
        step = np.where(np.isfinite(step), step, 0.0)
        z = z - step
    for i in np.nonzero(active)[0]:
        z[i] = aberth(c[i])
    return z
