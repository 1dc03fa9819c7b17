"""starscape command line: generate, render, approx, verify, ut-export.

Exit codes: 0 success, 1 numeric failure (or a failed verification), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import re
import sys
from dataclasses import dataclass, fields
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__

GUARD = 10 ** 7


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration


@dataclass
class Config:
    precision: int = 100
    width: int = 1024
    metric: str = "hyperbolic"
    sizing: str = "root_disc"
    scale: Optional[float] = None
    color: str = "by_degree"
    min_radius: float = 0.05
    region: str = "-1,1,0.001,2"
    out_dir: str = "."
    threads: int = 1

    @classmethod
    def load(cls, path: Optional[str]) -> "Config":
        cfg = cls()
        if not path:
            return cfg
        types = {f.name: f.type for f in fields(cls)}
        with open(path, encoding="utf-8") as fh:
            for num, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{num}: expected key = value")
                key, value = (s.strip() for s in line.split("=", 1))
                key = key.replace("-", "_")
                if key not in types:
                    raise UsageError(f"{path}:{num}: unknown config key {key!r}")
                setattr(cfg, key, _convert(key, value))
        if cfg.precision < 50:
            raise UsageError("precision must be at least 50 digits")
        return cfg


def _convert(key: str, value: str):
    try:
        if key in ("precision", "width", "threads"):
            return int(value)
        if key in ("min_radius",):
            return float(value)
        if key == "scale":
            return None if value.lower() in ("", "auto", "none") else float(value)
    except ValueError as exc:
        raise UsageError(f"bad value for {key}: {value!r}") from exc
    return value


def _pick(flag, cfg_value):
    return cfg_value if flag is None else flag


# ---------------------------------------------------------------------------
# family patterns

_TERM = re.compile(r"\s*([+-]?)\s*(\d*)\s*([a-z]?)\s*")


@dataclass(frozen=True)
class Pattern:
    text: str
    params: Tuple[str, ...]
    basis: Tuple[Tuple[int, ...], ...]
    offset: Tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.offset) - 1


def _parse_slot(slot: str) -> Dict[str, int]:
    """Linear expression such as '2a', '-b', 'c+1' or '3' -> {letter or '': coefficient}."""
    slot = slot.strip()
    if not slot:
        raise UsageError("empty slot in pattern")
    out: Dict[str, int] = {}
    pos = 0
    first = True
    while pos < len(slot):
        m = _TERM.match(slot, pos)
        if not m or m.end() == pos:
            raise UsageError(f"cannot parse slot {slot!r}")
        sign, digits, letter = m.groups()
        if not digits and not letter:
            raise UsageError(f"cannot parse slot {slot!r}")
        if not first and not sign:
            raise UsageError(f"missing operator in slot {slot!r}")
        coef = int(digits) if digits else 1
        if sign == "-":
            coef = -coef
        out[letter] = out.get(letter, 0) + coef
        pos = m.end()
        first = False
    return out


def parse_pattern(text: str) -> Pattern:
    slots = [_parse_slot(s) for s in text.split(",")]
    if len(slots) < 2:
        raise UsageError("a pattern needs at least two slots")
    params = tuple(sorted({k for s in slots for k in s if k}))
    if not params:
        raise UsageError("pattern has no parameters")
    basis = tuple(tuple(s.get(p, 0) for s in slots) for p in params)
    offset = tuple(s.get("", 0) for s in slots)
    return Pattern(text, params, basis, offset)


def full_pattern(degree: int) -> str:
    if not 1 <= degree <= 25:
        raise UsageError("degree must be between 1 and 25")
    return ",".join("abcdefghijklmnopqrstuvwxyz"[: degree + 1])


def family_rows(args) -> Tuple[np.ndarray, str]:
    from . import polylattice

    text = args.pattern or (full_pattern(args.degree) if args.degree else None)
    if text is None:
        raise UsageError("give --pattern or --degree")
    pat = parse_pattern(text)
    if args.degree and args.pattern and pat.degree != args.degree:
        raise UsageError("--degree disagrees with the pattern length")
    offset = pat.offset
    if args.offset:
        extra = [int(v) for v in args.offset.split(",")]
        if len(extra) != len(offset):
            raise UsageError("--offset needs one entry per slot")
        offset = tuple(a + b for a, b in zip(offset, extra))
    if args.box is None and args.ball is None:
        raise UsageError("give --box N or --ball N")
    if args.box is not None and args.box < 0 or args.ball is not None and args.ball < 0:
        raise UsageError("bounds must be non-negative")
    radius = args.box if args.box is not None else args.ball + max(abs(v) for v in offset)
    box = [(-radius, radius)] * len(pat.params)
    count = (2 * radius + 1) ** len(pat.params)
    if count > GUARD and not args.force:
        raise UsageError(f"family has {count} parameter points (> {GUARD}); use --force")
    if polylattice._rank(pat.basis) != len(pat.basis):
        raise UsageError("pattern slots are linearly dependent in the parameters")
    if len(pat.params) <= 3:
        spec = polylattice.FamilySpec(pat.degree, pat.basis, tuple(box), offset, args.ball,
                                      label=text)
        return polylattice.family_array(spec), text
    return polylattice.lattice_rows(pat.degree, pat.basis, box, offset, args.ball), text


# ---------------------------------------------------------------------------
# generate


def _root_records(row: Sequence[int], geodesic=None) -> List[dict]:
    from .arithheight import mahler_measure
    from .polylattice import IntPoly, discriminant_of, is_minimal
    from .rootfind import finite_roots

    p = IntPoly(tuple(int(v) for v in row))
    stripped = p.stripped
    if len(stripped) < 2:
        return []
    disc = discriminant_of(p.coeffs)
    common = {
        "coeffs": list(p.coeffs),
        "degree": len(stripped) - 1,
        "disc": disc,
        "naive": max(abs(v) for v in p.coeffs),
        "mahler": round(mahler_measure(p), 12),
        "minimal": is_minimal(p),
    }
    if geodesic is not None and p.degree == 2 and disc < 0:
        common["on_geodesic"] = geodesic.contains(p.coeffs)
    out = []
    for z in finite_roots(stripped):
        if z.imag < 0:
            continue
        rec = dict(common)
        rec["root_re"] = round(z.real, 15)
        rec["root_im"] = round(z.imag, 15)
        out.append(rec)
    return out


def cmd_generate(args, cfg: Config) -> int:
    from .hypgeo import Geodesic

    rows, label = family_rows(args)
    geo = None
    if args.geodesic:
        geo = Geodesic(tuple(int(v) for v in args.geodesic.split(",")))
    out = _open_out(args.out)
    try:
        lines = []
        for row in rows:
            lines.extend(_root_records(row, geo))
        meta = {"pattern": label, "box": args.box, "ball": args.ball, "offset": args.offset,
                "polynomials": int(len(rows)), "roots": len(lines), "version": __version__}
        out.write(json.dumps({"_meta": meta}, sort_keys=True) + "\n")
        for rec in lines:
            out.write(json.dumps(rec, sort_keys=True) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _open_out(path):
    if not path or path == "-":
        return sys.stdout
    return open(path, "w", encoding="utf-8", newline="\n")


def _load_dataset(path: str) -> np.ndarray:
    seen = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if "_meta" in rec:
                continue
            seen.setdefault(tuple(rec["coeffs"]), None)
    if not seen:
        return np.zeros((0, 3), dtype=np.int64)
    widths = {len(k) for k in seen}
    if len(widths) != 1:
        raise UsageError("dataset mixes polynomial degrees")
    return np.array(list(seen), dtype=np.int64)


# ---------------------------------------------------------------------------
# render


def _region(text: str) -> Tuple[float, float, float, float]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad region {text!r}") from exc
    if len(vals) != 4:
        raise UsageError("region needs re_min,re_max,im_min,im_max")
    return vals


def render_spec(args, cfg: Config):
    from .render import RenderSpec

    return RenderSpec(
        region=_region(_pick(args.region, cfg.region)),
        width_px=_pick(args.width, cfg.width),
        metric=_pick(args.metric, cfg.metric),
        sizing=_pick(args.sizing, cfg.sizing),
        scale=_pick(args.scale, cfg.scale),
        color=_pick(args.color, cfg.color),
        min_radius_px=_pick(args.min_radius, cfg.min_radius),
    )


def cmd_render(args, cfg: Config) -> int:
    import os

    from .render import render_arrows, render_starscape

    spec = render_spec(args, cfg)
    if args.dataset:
        rows, label = _load_dataset(args.dataset), args.dataset
    else:
        rows, label = family_rows(args)
    threads = _pick(args.threads, cfg.threads)
    fn = render_arrows if args.arrows else render_starscape
    result = fn(rows, spec, threads=threads)
    result.meta["family"] = label
    stem = args.out or os.path.join(cfg.out_dir, "starscape")
    paths = result.write(stem, png=args.png)
    print(f"dots={result.dot_count} scale={result.layout.scale:.6g} -> {', '.join(paths)}")
    return 0


# ---------------------------------------------------------------------------
# approx


APPROX_FIELDS = ["disc", "a", "b", "c", "beta_re", "beta_im", "dist", "quality", "on_geodesic"]


def cmd_approx(args, cfg: Config) -> int:
    import mpmath

    from . import dioph

    precision = _pick(args.precision, cfg.precision)
    if precision < 50:
        raise UsageError("precision must be at least 50 digits")
    summary: List[str] = []
    records: List = []
    if args.mode == "liouville":
        res = dioph.liouville_build(args.steps, precision=max(precision, 50))
        target = dioph.Target.build(res.limit, res.precision, "liouville limit",
                                    find_geodesic=False)
        for p in res.polys[:-1]:
            rec = dioph.make_record(target, p.coeffs)
            if rec is not None:
                records.append(dataclass_replace(rec, on_target_geodesic=True))
        summary.append(f"steps={len(res.polys)} chain_ok={all(res.chain_ok)}")
        summary.append(f"limit={mpmath.nstr(res.limit, 30)}")
    else:
        if not args.target:
            raise UsageError("--target is required")
        target = dioph.parse_target(args.target, precision)
        geo = target.geodesic
        summary.append(f"target={mpmath.nstr(target.value, 25)} shift={target.shift} "
                       f"geodesic={None if geo is None else list(geo.normal)}")
        if args.mode == "geodesic":
            records = list(dioph.dirichlet_geodesic(target, args.records))
        elif args.mode == "general":
            records = list(dioph.dirichlet_general(target, args.records))
        elif args.mode == "best":
            records = dioph.best_approximants(target, args.disc_bound)
        elif args.mode == "roth":
            scan = dioph.roth_scan(target, args.exponent, args.disc_bound,
                                   allow_transcendental=args.allow_transcendental)
            records = scan.all()
            summary.append(f"violators={scan.count} on_geodesic={len(scan.on_geodesic)} "
                           f"off_geodesic={len(scan.off_geodesic)}")
    slope = intercept = None
    if len(records) >= 2:
        slope, intercept = dioph.fit_slope(records)
        summary.append(f"records={len(records)} slope={slope:.4f} "
                       f"K={math.exp(intercept):.4g}")
    else:
        summary.append(f"records={len(records)}")
    out = _open_out(args.out)
    try:
        writer = csv.DictWriter(out, fieldnames=APPROX_FIELDS, lineterminator="\n")
        writer.writeheader()
        for r in records:
            writer.writerow(r.row())
    finally:
        if out is not sys.stdout:
            out.close()
    if args.plot:
        from .report import quality_plot

        quality_plot(records, args.plot, title=f"{args.mode} approximants", slope=slope,
                     intercept=intercept)
        summary.append(f"plot -> {args.plot}")
    stream = sys.stderr if out is sys.stdout else sys.stdout
    for line in summary:
        print(line, file=stream)
    return 0


def dataclass_replace(obj, **kw):
    from dataclasses import replace

    return replace(obj, **kw)


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args, cfg: Config) -> int:
    from .suites import SUITES

    names = list(SUITES) if args.suite == "all" else [args.suite]
    ok = True
    for name in names:
        res = SUITES[name]()
        print(res.line(), flush=True)
        ok &= res.passed
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# ut-export


UT_FIELDS = ["x", "y", "z", "theta", "torus_x", "torus_y", "torus_z", "a", "b", "c", "d"]


def cmd_ut_export(args, cfg: Config) -> int:
    import os

    from . import cubicut
    from .render import compute_dots

    rows, label = family_rows(args)
    if rows.shape[1] != 4:
        raise UsageError("ut-export needs a cubic pattern")
    dots = compute_dots(rows, "naive", _pick(args.threads, cfg.threads))
    out_path = args.out or os.path.join(cfg.out_dir, "ut_points.csv")
    points = []
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(UT_FIELDS)
        for i in range(len(dots)):
            z = complex(dots.roots[i])
            row = dots.coeffs[i]
            r = None if row[0] == 0 else float(dots.first_real[i])
            if r is not None and math.isnan(r):
                continue
            u = cubicut.UTPoint(z, r)
            tx, ty, tz = cubicut.torus_embed(u)
            points.append((tx, ty, tz))
            writer.writerow([f"{z.real:.12g}", f"{z.imag:.12g}",
                             "" if r is None else f"{r:.12g}",
                             f"{cubicut.theta(z, r):.12g}", f"{tx:.12g}", f"{ty:.12g}",
                             f"{tz:.12g}"] + [int(v) for v in row])
    side = os.path.splitext(out_path)[0] + ".json"
    with open(side, "w", encoding="utf-8") as fh:
        json.dump({"family": label, "points": len(points), "torus_major": cubicut.TORUS_MAJOR,
                   "torus_minor": cubicut.TORUS_MINOR, "columns": UT_FIELDS}, fh, indent=2,
                  sort_keys=True)
        fh.write("\n")
    msg = f"points={len(points)} -> {out_path}, {side}"
    if args.plot:
        from .report import torus_scatter

        torus_scatter(points, args.plot, title=label)
        msg += f", {args.plot}"
    print(msg)
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _family_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("family")
    g.add_argument("--pattern", help="comma-separated slots, e.g. 'a,0,b,c' or 'a,b,c,b'")
    g.add_argument("--degree", type=int, help="full family of this degree")
    g.add_argument("--box", type=int, help="parameters range over [-N, N]")
    g.add_argument("--ball", type=int, help="keep coefficient vectors with sup-norm <= N")
    g.add_argument("--offset", help="integer vector added to every member")
    g.add_argument("--force", action="store_true", help="allow more than 10^7 points")


def _render_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("render")
    g.add_argument("--region", help="re_min,re_max,im_min,im_max")
    g.add_argument("--width", type=int, help="image width in pixels")
    g.add_argument("--metric", choices=["hyperbolic", "euclidean"])
    g.add_argument("--sizing", choices=["root_disc", "naive", "mahler", "nuanced_disc",
                                        "nuanced_naive", "nuanced_mahler"])
    g.add_argument("--scale", type=float, help="sizing constant (default: 2%% of height)")
    g.add_argument("--color", choices=["by_degree", "by_real_root", "mono"])
    g.add_argument("--min-radius", type=float, help="drop dots below this many pixels")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="starscape", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="key = value configuration file")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a JSON-lines dataset of roots")
    _family_flags(g)
    g.add_argument("--geodesic", help="normal n2,n1,n0 of a geodesic to test quadratics on")
    g.add_argument("--out", help="output file (default stdout)")

    r = sub.add_parser("render", help="draw a starscape to SVG/PNG")
    _family_flags(r)
    _render_flags(r)
    r.add_argument("--dataset", help="render the polynomials of a generate output")
    r.add_argument("--arrows", action="store_true", help="cubic arrow field instead of dots")
    r.add_argument("--png", action="store_true", help="also write a PNG raster")
    r.add_argument("--threads", type=int)
    r.add_argument("--out", help="output stem (writes .svg, .json and .png)")

    a = sub.add_parser("approx", help="quadratic approximation of a complex number")
    a.add_argument("--target", help="unit-circle:<x>, poly:<coeffs> or expr:<value>")
    a.add_argument("--mode", choices=["geodesic", "general", "best", "roth", "liouville"],
                   default="geodesic")
    a.add_argument("--records", type=int, default=20)
    a.add_argument("--disc-bound", type=int, default=10_000)
    a.add_argument("--exponent", type=float, default=2.0)
    a.add_argument("--steps", type=int, default=6)
    a.add_argument("--allow-transcendental", action="store_true")
    a.add_argument("--precision", type=int)
    a.add_argument("--out", help="CSV output (default stdout)")
    a.add_argument("--plot", help="PNG quality plot")

    v = sub.add_parser("verify", help="run invariant suites")
    from .suites import SUITES

    v.add_argument("suite", choices=sorted(SUITES) + ["all"])

    u = sub.add_parser("ut-export", help="cubic unit tangent bundle point cloud")
    _family_flags(u)
    u.add_argument("--threads", type=int)
    u.add_argument("--out", help="CSV path")
    u.add_argument("--plot", help="PNG torus scatter")
    return parser


COMMANDS = {
    "generate": cmd_generate,
    "render": cmd_render,
    "approx": cmd_approx,
    "verify": cmd_verify,
    "ut-export": cmd_ut_export,
}


VECTOR_FLAGS = ("--region", "--offset", "--geodesic")


def _join_vector_flags(argv: Sequence[str]) -> List[str]:
    """Let '--region -1,1,0,2' through; argparse would read the value as a flag."""
    out: List[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in VECTOR_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_vector_flags(argv))
    try:
        cfg = Config.load(args.config)
        return COMMANDS[args.command](args, cfg)
    except (UsageError, ValueError, OSError) as exc:
        print(f"starscape: error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"starscape: numeric failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
