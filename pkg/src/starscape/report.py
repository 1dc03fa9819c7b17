"""Matplotlib figures written next to the CLI's delimited reports."""

from __future__ import annotations

import math
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# keep PNG bytes free of version strings
_META = {"Software": None}


def quality_plot(records, path: str, title: str = "", slope: Optional[float] = None,
                 intercept: Optional[float] = None) -> str:
    """log(cosh d - 1) against log |disc| for a list of approximation records."""
    import mpmath

    disc = np.array([r.disc for r in records], dtype=float)
    eps = np.array([float(mpmath.log10(r.cosh_m1)) for r in records])
    fig, ax = plt.subplots(figsize=(6, 4.5), dpi=100)
    on = np.array([r.on_target_geodesic for r in records], dtype=bool)
    if len(disc):
        ax.scatter(np.log10(disc[~on]), eps[~on], s=12, c="tab:blue", label="off geodesic")
        ax.scatter(np.log10(disc[on]), eps[on], s=12, c="tab:red", label="on geodesic")
        xs = np.linspace(np.log10(disc.min()), np.log10(disc.max()), 50)
        for k, style in ((1.5, ":"), (2.0, "--")):
            ax.plot(xs, -k * xs, style, color="gray", lw=0.8, label=f"|disc|^-{k}")
        if slope is not None and intercept is not None:
            ax.plot(xs, slope * xs + intercept / math.log(10), color="black", lw=1,
                    label=f"fit slope {slope:.3f}")
    ax.set_xlabel("log10 |disc|")
    ax.set_ylabel("log10 (cosh d - 1)")
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, metadata=_META)
    plt.close(fig)
    return path


def torus_scatter(points: Sequence[Sequence[float]], path: str, colors=None,
                  title: str = "") -> str:
    """Three-dimensional scatter of unit-tangent-bundle points on the torus."""
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    fig = plt.figure(figsize=(6, 6), dpi=100)
    ax = fig.add_subplot(projection="3d")
    if len(pts):
        ax.scatter(pts[:, 0], pts[:, 1], pts[:, 2], s=1, c=colors if colors is not None else "k",
                   depthshade=False)
    ax.set_box_aspect((1, 1, 0.35))
    ax.set_axis_off()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, metadata=_META)
    plt.close(fig)
    return path
