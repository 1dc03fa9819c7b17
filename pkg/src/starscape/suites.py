"""Randomized and exhaustive invariant checks, shared by the CLI and the tests."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from . import arithheight, cubicut, dioph, hypgeo, polylattice, rootfind
from .polylattice import IntPoly, content_normalize, discriminant_of, is_minimal


@dataclass
class SuiteResult:
    name: str
    passed: bool
    details: Dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        info = ", ".join(f"{k}={_fmt(v)}" for k, v in self.details.items())
        return f"[{status}] {self.name} ({self.seconds:.2f}s) {info}"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.3g}"
    return str(v)


def _random_negative_quadratic(rng: random.Random, bound: int) -> IntPoly:
    while True:
        a, b, c = (rng.randint(-bound, bound) for _ in range(3))
        if b * b - 4 * a * c < 0:
            return content_normalize((a, b, c))


def _random_squarefree(rng: random.Random, degree: int, bound: int) -> IntPoly:
    while True:
        v = [rng.randint(-bound, bound) for _ in range(degree + 1)]
        if v[0] != 0 and discriminant_of(v) != 0:
            return content_normalize(v)


def isometry(pairs: int = 10_000, bound: int = 100, seed: int = 1, tol: float = 1e-10
             ) -> SuiteResult:
    """Coefficient-model distance against upper-half-plane distance of the roots."""
    rng = random.Random(seed)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(pairs):
        f1 = _random_negative_quadratic(rng, bound)
        f2 = _random_negative_quadratic(rng, bound)
        z1, z2 = rootfind.upper_root(f1), rootfind.upper_root(f2)
        err = abs(hypgeo.dist_coefs(f1.coeffs, f2.coeffs) - hypgeo.dist_uhp(z1, z2))
        worst = max(worst, err)
    return SuiteResult("isometry", worst < tol, {"pairs": pairs, "max_error": worst},
                       time.perf_counter() - t0)


def _match_roots(xs, ys, tol) -> float:
    """Worst relative mismatch after greedy matching; infinity only matches infinity."""
    ys = list(ys)
    worst = 0.0
    for x in xs:
        best, best_j = math.inf, None
        for j, y in enumerate(ys):
            if x is None or y is None:
                err = 0.0 if x is None and y is None else math.inf
            else:
                err = abs(x - y) / (1.0 + abs(x))
            if err < best:
                best, best_j = err, j
        if best_j is None:
            return math.inf
        ys.pop(best_j)
        worst = max(worst, best)
    return worst


def equivariance(samples: int = 1000, seed: int = 2, tol: float = 1e-9,
                 degrees=(2, 3)) -> SuiteResult:
    """Roots of rho(A) p against A applied to the roots of p."""
    rng = random.Random(seed)
    t0 = time.perf_counter()
    worst = 0.0
    failures = 0
    for i in range(samples):
        deg = degrees[i % len(degrees)]
        p = _random_squarefree(rng, deg, 10)
        A = hypgeo.random_word(rng, 6)
        moved = hypgeo.act(A, p)
        before = [r.value for r in rootfind.roots(p).roots]
        after = [r.value for r in rootfind.roots(moved).roots]
        images = [A.apply(z) for z in before]
        # an image far beyond the plane's numeric range is the point at infinity
        images = [None if z is not None and abs(z) > 1e12 else z for z in images]
        err = _match_roots(images, after, tol)
        worst = max(worst, err)
        if err > tol:
            failures += 1
    return SuiteResult("equivariance", failures == 0,
                       {"samples": samples, "max_error": worst, "failures": failures},
                       time.perf_counter() - t0)


def repulsion_forms(box: int = 20) -> np.ndarray:
    """Canonical minimal quadratics with negative discriminant in a coefficient box."""
    rows = polylattice.lattice_rows(2, [(1, 0, 0), (0, 1, 0), (0, 0, 1)], [(-box, box)] * 3)
    a, b, c = rows[:, 0], rows[:, 1], rows[:, 2]
    return rows[b * b - 4 * a * c < 0]


def repulsion(box: int = 20) -> SuiteResult:
    """Both repulsion bounds over every pair in the box, decided exactly.

    The corrected bound g^2 - D1 D2 = 4 Res(f1, f2) >= 4 is also checked and
    reported, since the general bound has counterexamples.
    """
    t0 = time.perf_counter()
    forms = repulsion_forms(box)
    res = dioph.repulsion_violations(forms)
    corrected = _corrected_violations(forms)
    details = {"forms": len(forms), "pairs": res["pairs"], "general_violations": res["general"],
               "equal_disc_violations": res["equal"], "corrected_violations": corrected}
    if res["examples"]:
        details["example"] = res["examples"][0]
    passed = res["general"] == 0 and res["equal"] == 0
    return SuiteResult("repulsion", passed, details, time.perf_counter() - t0)


def _corrected_violations(forms: np.ndarray) -> int:
    f = np.asarray(forms, dtype=np.int64)
    a, b, c = f[:, 0], f[:, 1], f[:, 2]
    disc = 4 * a * c - b * b
    bad = 0
    for i in range(len(f) - 1):
        j = slice(i + 1, None)
        g = b[i] * b[j] - 2 * a[i] * c[j] - 2 * a[j] * c[i]
        bad += int(np.count_nonzero(g * g - disc[i] * disc[j] < 4))
    return bad


def roundtrip(samples: int = 10_000, bound: int = 50, seed: int = 3, tol: float = 1e-9
              ) -> SuiteResult:
    """assemble_cubic(split_cubic(p)) is projectively p."""
    rng = random.Random(seed)
    t0 = time.perf_counter()
    worst = 0.0
    done = 0
    while done < samples:
        v = [rng.randint(-bound, bound) for _ in range(4)]
        if v[0] == 0 or discriminant_of(v) >= 0:
            continue
        done += 1
        u = cubicut.split_cubic(v)
        w = np.array(cubicut.assemble_cubic(u.direction, u.base))
        p = np.array(v, dtype=float)
        p /= p[0]
        w /= w[0]
        worst = max(worst, float(np.max(np.abs(p - w)) / max(1.0, np.max(np.abs(p)))))
    return SuiteResult("roundtrip", worst < tol, {"samples": samples, "max_error": worst},
                       time.perf_counter() - t0)


def heights(box: int = 20, cubic_samples: int = 10_000, seed: int = 4) -> SuiteResult:
    """Height comparison inequalities over a quadratic box and random cubics."""
    rng = random.Random(seed)
    t0 = time.perf_counter()
    failures: Dict[str, int] = {}
    checked = 0
    rows = polylattice.lattice_rows(2, [(1, 0, 0), (0, 1, 0), (0, 0, 1)], [(-box, box)] * 3)
    for row in rows:
        if row[0] == 0:
            continue
        p = IntPoly(tuple(int(v) for v in row))
        if not is_minimal(p):
            continue
        checked += 1
        for k in arithheight.verify_height_inequalities(p).failures():
            failures[k] = failures.get(k, 0) + 1
    cubics = 0
    while cubics < cubic_samples:
        v = [rng.randint(-box, box) for _ in range(4)]
        if v[0] == 0:
            continue
        p = content_normalize(v)
        if not is_minimal(p):
            continue
        cubics += 1
        for k in arithheight.verify_height_inequalities(p).failures():
            failures[k] = failures.get(k, 0) + 1
    details = {"quadratics": checked, "cubics": cubics, "violations": sum(failures.values())}
    details.update({f"fail_{k}": v for k, v in failures.items()})
    return SuiteResult("heights", not failures, details, time.perf_counter() - t0)


LEHMER = (1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1)
LEHMER_MAHLER = 1.176280818


def mahler() -> SuiteResult:
    t0 = time.perf_counter()
    lehmer = arithheight.mahler_measure(content_normalize(LEHMER))
    golden = arithheight.mahler_measure(content_normalize((1, -1, -1)))
    phi = (1 + math.sqrt(5)) / 2
    ok = abs(lehmer - LEHMER_MAHLER) <= 1e-6 and abs(golden - phi) <= 1e-10
    return SuiteResult("mahler", ok, {"lehmer": lehmer, "golden_error": abs(golden - phi)},
                       time.perf_counter() - t0)


def singular() -> SuiteResult:
    t0 = time.perf_counter()
    fibered = cubicut.PlanarFamily.from_basis([(1, 0, 0, 0), (0, 1, 0, 1), (0, 0, 1, 0)])
    depressed = cubicut.PlanarFamily.from_basis([(1, 0, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)])
    s1 = cubicut.singular_line(fibered)
    s2 = cubicut.singular_line(depressed)
    ok = (s1.kind == "fiber" and s1.quadratic == (0, 1) and s1.point == 1j
          and s2.kind == "transverse")
    return SuiteResult("singular", ok, {"a,b,c,b": s1.kind, "point": s1.point,
                                        "a,0,c,d": s2.kind}, time.perf_counter() - t0)


SUITES: Dict[str, Callable[[], SuiteResult]] = {
    "isometry": isometry,
    "equivariance": equivariance,
    "repulsion": repulsion,
    "roundtrip": roundtrip,
    "heights": heights,
    "mahler": mahler,
    "singular": singular,
}
