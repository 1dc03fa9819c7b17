"""Deterministic starscape rendering to SVG (and PNG through Pillow).

Every root in the upper half plane becomes a dot whose radius is a scale
constant divided by an arithmetic complexity.  In the hyperbolic metric the
radius is hyperbolic, so dots shrink towards the real axis.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .polylattice import FamilySpec, IntPoly, discriminant_of, family_array
from .rootfind import batch_aberth, batch_quadratic_upper

SIZINGS = ("root_disc", "naive", "mahler", "nuanced_disc", "nuanced_naive", "nuanced_mahler")
COLORS = ("by_degree", "by_real_root", "mono")
METRICS = ("hyperbolic", "euclidean")

CHUNK = 20000  # rows per work unit; fixed so results do not depend on thread count
DEGREE_PALETTE = {2: (0, 0, 0), 3: (200, 30, 30), 4: (30, 60, 200), 5: (20, 140, 60)}
OTHER = (120, 120, 120)
GRAY = (150, 150, 150)
RED = (210, 20, 20)
BLUE = (20, 60, 220)


class RenderSpecError(ValueError):
    pass


@dataclass(frozen=True)
class RenderSpec:
    region: Tuple[float, float, float, float] = (-1.0, 1.0, 0.001, 2.0)
    width_px: int = 1024
    metric: str = "hyperbolic"
    sizing: str = "root_disc"
    scale: Optional[float] = None  # None picks the 2%-of-height default
    color: str = "by_degree"
    min_radius_px: float = 0.05

    def __post_init__(self):
        re0, re1, im0, im1 = self.region
        if not (re1 > re0 and im1 > im0):
            raise RenderSpecError("region must have positive width and height")
        if self.metric not in METRICS:
            raise RenderSpecError(f"unknown metric {self.metric!r}")
        if self.metric == "hyperbolic" and im0 <= 0:
            raise RenderSpecError("hyperbolic rendering needs im_min > 0")
        if self.sizing not in SIZINGS:
            raise RenderSpecError(f"unknown sizing {self.sizing!r}")
        if self.color not in COLORS:
            raise RenderSpecError(f"unknown color mode {self.color!r}")
        if not 64 <= self.width_px <= 16384:
            raise RenderSpecError("width_px must be in [64, 16384]")
        if self.scale is not None and not self.scale > 0:
            raise RenderSpecError("scale must be positive")
        if self.min_radius_px < 0:
            raise RenderSpecError("min_radius_px must be non-negative")

    @property
    def px_per_unit(self) -> float:
        return self.width_px / (self.region[1] - self.region[0])

    @property
    def height_px(self) -> int:
        return max(1, int(round((self.region[3] - self.region[2]) * self.px_per_unit)))


@dataclass(frozen=True)
class Dot:
    center: complex
    radius_px: float
    color: Tuple[int, int, int, int]
    coeffs: Tuple[int, ...]
    root: complex

    @property
    def sort_key(self):
        return (-self.radius_px, self.coeffs, self.root.real, self.root.imag)


# ---------------------------------------------------------------------------
# sizing and geometry


def _exponent(sizing: str, degree: int) -> float:
    if sizing == "root_disc":
        return 1.0 / degree
    if sizing == "nuanced_disc":
        if degree < 2:
            raise ValueError("nuanced disc sizing needs degree >= 2")
        return (degree + 1) / (4 * degree - 4)
    if sizing in ("nuanced_naive", "nuanced_mahler"):
        return (degree + 1) / 2
    return 1.0


def _base_quantity(sizing: str, disc, naive, mahler):
    if sizing.endswith("disc"):
        return np.abs(disc)
    if sizing.endswith("naive"):
        return naive
    return mahler


def size_dot(p: IntPoly, root: complex, spec: RenderSpec) -> Optional[float]:
    """Radius (hyperbolic or euclidean units) of the dot for ``root`` of ``p``.

    Returns None when the sizing quantity vanishes (zero discriminant).
    """
    from .arithheight import mahler_measure, naive_height

    disc = abs(discriminant_of(p.coeffs))
    naive = naive_height(p)
    mahler = mahler_measure(p) if spec.sizing.endswith("mahler") else 0.0
    base = float(_base_quantity(spec.sizing, disc, naive, mahler))
    if base == 0:
        return None
    scale = 1.0 if spec.scale is None else spec.scale
    return scale / base ** _exponent(spec.sizing, p.degree)


def hyperbolic_dot(z: complex, rho: float) -> Tuple[complex, float]:
    """Euclidean circle (center, radius) of the hyperbolic disc of radius rho about z."""
    if rho < 0:
        raise ValueError("rho must be non-negative")
    return complex(z.real, z.imag * math.cosh(rho)), z.imag * math.sinh(rho)


# ---------------------------------------------------------------------------
# batch dot computation


def _batch_disc(rows: np.ndarray) -> np.ndarray:
    """Exact discriminants as int64 (degree <= 3, small coefficients) or objects."""
    deg = rows.shape[1] - 1
    big = rows.size and np.max(np.abs(rows)) > 3000
    if deg == 2 and not big:
        a, b, c = (rows[:, i] for i in range(3))
        return b * b - 4 * a * c
    if deg == 3 and not big:
        a, b, c, d = (rows[:, i] for i in range(4))
        return (b * b * c * c - 4 * a * c ** 3 - 4 * b ** 3 * d - 27 * a * a * d * d
                + 18 * a * b * c * d)
    return np.array([discriminant_of(tuple(int(v) for v in r)) for r in rows], dtype=object)


def _rational_real_root(rows: np.ndarray, real: np.ndarray) -> np.ndarray:
    """Rows (cubic, a != 0) whose real root is rational, decided exactly."""
    out = np.zeros(len(rows), dtype=bool)
    if len(rows) == 0:
        return out
    amax = int(np.max(np.abs(rows[:, 0])))
    height = int(np.max(np.abs(rows)))
    # |p| <= q (1 + H), so every term stays below (amax (1 + H))^3 H
    dtype = np.int64 if (amax * (1 + height)) ** 3 * height * 4 < 2 ** 62 else object
    a, b, c, d = (rows[:, i].astype(dtype) for i in range(4))
    for q in range(1, amax + 1):
        cand = (rows[:, 0] % q == 0) & ~out
        if not cand.any():
            continue
        idx = np.nonzero(cand)[0]
        p = np.round(real[idx] * q).astype(np.int64).astype(dtype)
        qq = q
        val = a[idx] * p ** 3 + b[idx] * p ** 2 * qq + c[idx] * p * qq ** 2 + d[idx] * qq ** 3
        out[idx[val == 0]] = True
    return out


@dataclass
class DotArrays:
    coeffs: np.ndarray  # (N, d+1) int64
    roots: np.ndarray  # complex
    base: np.ndarray  # sizing quantity before the exponent
    exponent: float
    eff_degree: np.ndarray
    first_real: np.ndarray  # smallest finite real root, nan if none

    @classmethod
    def empty(cls, width: int, exponent: float = 1.0) -> "DotArrays":
        return cls(np.zeros((0, width), dtype=np.int64), np.zeros(0, complex), np.zeros(0),
                   exponent, np.zeros(0, dtype=np.int64), np.zeros(0))

    def __len__(self):
        return len(self.roots)

    @staticmethod
    def concat(parts: List["DotArrays"], width: int, exponent: float) -> "DotArrays":
        parts = [p for p in parts if len(p)]
        if not parts:
            return DotArrays.empty(width, exponent)
        return DotArrays(np.concatenate([p.coeffs for p in parts]),
                         np.concatenate([p.roots for p in parts]),
                         np.concatenate([p.base for p in parts]), exponent,
                         np.concatenate([p.eff_degree for p in parts]),
                         np.concatenate([p.first_real for p in parts]))


def _chunk_dots(rows: np.ndarray, sizing: str) -> DotArrays:
    deg = rows.shape[1] - 1
    exponent = _exponent(sizing, deg)
    disc = _batch_disc(rows)
    rows = rows[disc != 0]
    disc = disc[disc != 0]
    out = []
    # leading zeros put a root at infinity; solve the stripped polynomial
    lead = np.argmax(rows != 0, axis=1)
    for lz in np.unique(lead):
        sub = rows[lead == lz]
        sdisc = disc[lead == lz]
        stripped = sub[:, lz:]
        sdeg = stripped.shape[1] - 1
        if sdeg < 2:
            continue
        flip = stripped[:, 0] < 0
        stripped = np.where(flip[:, None], -stripped, stripped)
        if sdeg == 2:
            ok = (stripped[:, 1] ** 2 - 4 * stripped[:, 0] * stripped[:, 2]) < 0
            ups = batch_quadratic_upper(stripped[ok])[:, None]
            allroots = None
            sub, sdisc, stripped = sub[ok], sdisc[ok], stripped[ok]
        else:
            allroots = batch_aberth(stripped)
            ups = allroots
        naive = np.max(np.abs(sub), axis=1).astype(float)
        if allroots is None:
            mods = np.abs(ups)
            mahler = stripped[:, 0] * np.maximum(1.0, mods[:, 0]) ** 2
            real = np.full(len(sub), np.nan)
            nreal = np.zeros(len(sub), dtype=np.int64)
        else:
            mahler = stripped[:, 0] * np.prod(np.maximum(1.0, np.abs(allroots)), axis=1)
            tol = 1e-9 * (1 + np.abs(allroots))
            isreal = np.abs(allroots.imag) <= tol
            real = np.min(np.where(isreal, allroots.real, np.inf), axis=1)
            real[~np.isfinite(real)] = np.nan
            nreal = isreal.sum(axis=1)
        base = _base_quantity(sizing, sdisc, naive, mahler)
        if base.dtype == object:
            base = np.array([float(v) for v in base])
        base = base.astype(float)
        eff = np.full(len(sub), sdeg, dtype=np.int64)
        if deg == 3 and sdeg == 3:
            eff[_rational_real_root(stripped, np.nan_to_num(real))] = 2
            eff[nreal == 0] = 3
        upper_mask = ups.imag > 1e-9 * (1 + np.abs(ups))
        r_idx, c_idx = np.nonzero(upper_mask)
        if len(r_idx) == 0:
            continue
        out.append(DotArrays(sub[r_idx], ups[r_idx, c_idx], base[r_idx], exponent,
                             eff[r_idx], real[r_idx]))
    return DotArrays.concat(out, rows.shape[1], exponent)


def compute_dots(coeffs: np.ndarray, sizing: str, threads: int = 1) -> DotArrays:
    """Upper roots and sizing quantities for every row, in row order."""
    coeffs = np.asarray(coeffs, dtype=np.int64)
    width = coeffs.shape[1] if coeffs.ndim == 2 else 3
    exponent = _exponent(sizing, width - 1)
    if len(coeffs) == 0:
        return DotArrays.empty(width, exponent)
    chunks = [coeffs[i:i + CHUNK] for i in range(0, len(coeffs), CHUNK)]
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda ch: _chunk_dots(ch, sizing), chunks))
    else:
        parts = [_chunk_dots(ch, sizing) for ch in chunks]
    return DotArrays.concat(parts, width, exponent)


# ---------------------------------------------------------------------------
# colors


def _blend_white(rgb, s):
    return tuple(int(round(255 - (255 - v) * s)) for v in rgb)


def color_real_root(p: IntPoly) -> Tuple[int, int, int, int]:
    """Quadratics black, no real root gray, otherwise red/blue by the sign of
    the smallest real root, fading to white as its size grows."""
    from .polylattice import has_rational_root
    from .rootfind import finite_roots

    c = p.stripped
    deg = len(c) - 1
    if deg <= 2:
        return (0, 0, 0, 255)
    if deg == 3 and has_rational_root(c):
        return (0, 0, 0, 255)
    reals = sorted(z.real for z in finite_roots(c) if z.imag == 0)
    if not reals:
        return GRAY + (255,)
    r = reals[0]
    return _blend_white(RED if r < 0 else BLUE, 1.0 / (1.0 + abs(r))) + (255,)


def _colors(d: DotArrays, mode: str) -> np.ndarray:
    n = len(d)
    out = np.zeros((n, 3), dtype=np.int64)
    if mode == "mono" or n == 0:
        return out
    if mode == "by_degree":
        for deg in np.unique(d.eff_degree):
            out[d.eff_degree == deg] = DEGREE_PALETTE.get(int(deg), OTHER)
        return out
    quad = d.eff_degree <= 2
    none = np.isnan(d.first_real) & ~quad
    r = np.nan_to_num(d.first_real)
    s = 1.0 / (1.0 + np.abs(r))
    base = np.where((r < 0)[:, None], np.array(RED), np.array(BLUE))
    blended = np.round(255 - (255 - base) * s[:, None]).astype(np.int64)
    out[:] = blended
    out[none] = GRAY
    out[quad] = 0
    return out


# ---------------------------------------------------------------------------
# layout


@dataclass
class Layout:
    """Emitted circles in pixel units, already sorted and clipped."""

    cx: np.ndarray
    cy: np.ndarray
    r: np.ndarray
    rgb: np.ndarray
    order_coeffs: np.ndarray
    roots: np.ndarray
    scale: float
    spec: RenderSpec
    source: np.ndarray = None  # row index into the DotArrays the layout came from

    def __len__(self):
        return len(self.r)

    def dots(self) -> List[Dot]:
        return [Dot(complex(self.cx[i], self.cy[i]), float(self.r[i]),
                    tuple(int(v) for v in self.rgb[i]) + (255,),
                    tuple(int(v) for v in self.order_coeffs[i]), complex(self.roots[i]))
                for i in range(len(self.r))]


def _radius_units(d: DotArrays, scale: float):
    return scale / d.base ** d.exponent


def _circles(d: DotArrays, spec: RenderSpec, scale: float):
    """Centers and radii in complex-plane units."""
    rad = _radius_units(d, scale)
    if spec.metric == "hyperbolic":
        y = d.roots.imag
        return d.roots.real, y * np.cosh(rad), y * np.sinh(rad)
    return d.roots.real, d.roots.imag, rad


def _in_region(x, y, region):
    re0, re1, im0, im1 = region
    return (x >= re0) & (x <= re1) & (y >= im0) & (y <= im1)


def default_scale(d: DotArrays, spec: RenderSpec, fraction: float = 0.02) -> float:
    """Scale that makes the largest in-frame dot `fraction` of the frame height."""
    inside = _in_region(d.roots.real, d.roots.imag, spec.region)
    if not inside.any():
        return 1.0
    sub = DotArrays(d.coeffs[inside], d.roots[inside], d.base[inside], d.exponent,
                    d.eff_degree[inside], d.first_real[inside])
    target = fraction * (spec.region[3] - spec.region[2])
    if spec.metric == "euclidean":
        return float(target / np.max(_radius_units(sub, 1.0)))

    def biggest(s):
        return float(np.max(_circles(sub, spec, s)[2]))

    lo, hi = 0.0, 1.0
    while biggest(hi) < target:
        hi *= 2
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if biggest(mid) < target:
            lo = mid
        else:
            hi = mid
    return hi


def layout(d: DotArrays, spec: RenderSpec) -> Layout:
    scale = spec.scale if spec.scale is not None else default_scale(d, spec)
    x, y, rad = _circles(d, spec, scale)
    keep = _in_region(x, y, spec.region)
    ppu = spec.px_per_unit
    rpx = rad * ppu
    keep &= rpx >= spec.min_radius_px
    idx = np.nonzero(keep)[0]
    x, y, rpx = x[idx], y[idx], rpx[idx]
    coeffs = d.coeffs[idx]
    roots = d.roots[idx]
    rgb = _colors(d, spec.color)[idx]
    # sort: radius descending, then coefficients, then root
    keys = [roots.imag, roots.real] + [coeffs[:, j] for j in range(coeffs.shape[1] - 1, -1, -1)]
    keys.append(-rpx)
    order = np.lexsort(keys) if len(idx) else np.zeros(0, dtype=np.int64)
    cx = (x[order] - spec.region[0]) * ppu
    cy = (spec.region[3] - y[order]) * ppu
    return Layout(cx, cy, rpx[order], rgb[order], coeffs[order], roots[order], scale, spec,
                  idx[order])


# ---------------------------------------------------------------------------
# emission


def _hex(rgb) -> str:
    return "#%02x%02x%02x" % tuple(int(v) for v in rgb)


def _svg_header(spec: RenderSpec) -> List[str]:
    w, h = spec.width_px, spec.height_px
    return ['<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" '
            f'height="{h}" viewBox="0 0 {w} {h}">']


def to_svg(lay: Layout) -> str:
    lines = _svg_header(lay.spec)
    for i in range(len(lay)):
        lines.append(f'<circle cx="{lay.cx[i]:.2f}" cy="{lay.cy[i]:.2f}" '
                     f'r="{lay.r[i]:.2f}" fill="{_hex(lay.rgb[i])}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def to_png(lay: Layout, path, supersample: int = 4) -> None:
    from PIL import Image, ImageDraw

    w, h = lay.spec.width_px * supersample, lay.spec.height_px * supersample
    img = Image.new("RGBA", (w, h), (255, 255, 255, 255))
    draw = ImageDraw.Draw(img)
    k = supersample
    for i in range(len(lay)):
        cx, cy, r = lay.cx[i] * k, lay.cy[i] * k, max(lay.r[i] * k, 0.5)
        draw.ellipse((cx - r, cy - r, cx + r, cy + r),
                     fill=tuple(int(v) for v in lay.rgb[i]) + (255,))
    img = img.resize((lay.spec.width_px, lay.spec.height_px), Image.Resampling.BOX)
    img.save(path, format="PNG")


@dataclass
class RenderResult:
    svg: str
    layout: Layout
    meta: Dict = field(default_factory=dict)

    @property
    def dot_count(self) -> int:
        return len(self.layout)

    def write(self, stem: str, png: bool = False) -> List[str]:
        """Write <stem>.svg, <stem>.json and optionally <stem>.png."""
        paths = [stem + ".svg", stem + ".json"]
        with open(paths[0], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.svg)
        with open(paths[1], "w", encoding="utf-8") as fh:
            json.dump(self.meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
        if png:
            paths.append(stem + ".png")
            to_png(self.layout, paths[-1])
        return paths


def _family_rows(family) -> Tuple[np.ndarray, str]:
    if isinstance(family, FamilySpec):
        return family_array(family), family.label or f"degree-{family.degree}"
    arr = np.asarray(family, dtype=np.int64)
    return arr, f"dataset-degree-{arr.shape[1] - 1 if arr.ndim == 2 else '?'}"


def _meta(label, spec: RenderSpec, lay: Layout, kind: str) -> Dict:
    s = asdict(spec)
    s["region"] = list(spec.region)
    s["scale"] = lay.scale
    return {"family": label, "kind": kind, "spec": s, "dot_count": len(lay),
            "scale": lay.scale}


def render_starscape(family, spec: RenderSpec, threads: int = 1) -> RenderResult:
    """Render a family (FamilySpec or coefficient array) to an SVG document."""
    rows, label = _family_rows(family)
    if rows.ndim != 2 or len(rows) == 0:
        width = rows.shape[1] if rows.ndim == 2 else 3
        d = DotArrays.empty(width)
    else:
        d = compute_dots(rows, spec.sizing, threads)
    lay = layout(d, spec)
    return RenderResult(to_svg(lay), lay, _meta(label, spec, lay, "starscape"))


def render_arrows(family, spec: RenderSpec, threads: int = 1,
                  length_factor: float = 2.0) -> RenderResult:
    """Cubic roots as tangent vectors: a segment from each complex root towards
    its real root, as long as `length_factor` dot radii."""
    rows, label = _family_rows(family)
    if rows.ndim == 2 and rows.shape[1] != 4:
        raise ValueError("arrows need a degree-3 family")
    if rows.ndim != 2 or len(rows) == 0:
        d = DotArrays.empty(4)
    else:
        d = compute_dots(rows, spec.sizing, threads)
        only = (d.coeffs[:, 0] == 0) | ~np.isnan(d.first_real)
        d = DotArrays(d.coeffs[only], d.roots[only], d.base[only], d.exponent,
                      d.eff_degree[only], d.first_real[only])
    lay = layout(d, spec)
    # direction towards the real root; a leading zero puts it at infinity
    zs = lay.roots
    lead_zero = lay.order_coeffs[:, 0] == 0
    real = np.nan_to_num(d.first_real[lay.source])
    dx = real - zs.real
    y = zs.imag
    vx = np.where(lead_zero, 0.0, 2 * y * dx)
    vy = np.where(lead_zero, 1.0, dx * dx - y * y)
    nrm = np.hypot(vx, vy)
    nrm[nrm == 0] = 1.0
    ux, uy = vx / nrm, vy / nrm
    ppu = spec.px_per_unit
    sx = (zs.real - spec.region[0]) * ppu
    sy = (spec.region[3] - zs.imag) * ppu
    lines = _svg_header(spec)
    for i in range(len(lay)):
        ln = length_factor * lay.r[i]
        x2 = sx[i] + ln * ux[i]
        y2 = sy[i] - ln * uy[i]  # screen y grows downwards
        lines.append(f'<line x1="{sx[i]:.2f}" y1="{sy[i]:.2f}" x2="{x2:.2f}" '
                     f'y2="{y2:.2f}" stroke="{_hex(lay.rgb[i])}" '
                     f'stroke-width="{max(0.1, lay.r[i] / 3):.2f}"/>')
    lines.append("</svg>")
    return RenderResult("\n".join(lines) + "\n", lay, _meta(label, spec, lay, "arrows"))
