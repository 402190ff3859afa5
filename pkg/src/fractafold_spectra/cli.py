"""Command-line entry point: spectrum | verify | kernel | resolve | e6 | julia."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import checks
from . import decimation as dec
from . import fractafold as ff
from . import lattice_harmonics as lh
from . import tree_harmonics as th
from .errors import FractafoldError
from .graph_core import brute_spectrum, cluster_eigenvalues, graph_from_json, octahedron
from .io import dumps, output_root, write_csv, write_json

MODELS = ("tree", "ladder", "honeycomb", "triangular-field", "custom", "fractafold")


@dataclass
class RunConfig:
    command: str
    model: str = "tree"
    cutoff: tuple[int, int] = (2, 4)
    grid: int = 64
    N: list[int] = field(default_factory=list)
    tol: float = 1e-8
    out: Path = Path(".")
    workers: int = 1
    seed: int = 0
    suites: list[str] = field(default_factory=lambda: ["default"])
    graph: str | None = None
    lam: list[float] = field(default_factory=list)

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("--tol must be positive")
        if self.workers < 1:
            raise ValueError("--workers must be at least 1")
        if self.grid < 2:
            raise ValueError("--grid must be at least 2")


def parse_cutoff(text: str) -> tuple[int, int]:
    """'4' -> (4, 4); '2,5' -> (max m0 = 2, max word length = 5)."""
    parts = [p for p in text.split(",") if p.strip()]
    if not parts or len(parts) > 2:
        raise argparse.ArgumentTypeError("cutoff must be 'L' or 'm0,L'")
    try:
        vals = [int(p) for p in parts]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if any(v < 0 for v in vals):
        raise argparse.ArgumentTypeError("cutoff entries must be nonnegative")
    return (vals[0], vals[0]) if len(vals) == 1 else (vals[0], vals[1])


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fractafold", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--model", choices=MODELS, default="tree")
        sp.add_argument("--cutoff", type=parse_cutoff, default=(2, 4))
        sp.add_argument("--grid", type=int, default=64)
        sp.add_argument("--N", type=_int_list, default=[])
        sp.add_argument("--tol", type=float, default=1e-8)
        sp.add_argument("--out", default=None, help="output directory (default $FRACTAFOLD_DATA_DIR)")
        sp.add_argument("--workers", type=int, default=os.cpu_count() or 1)
        sp.add_argument("--seed", type=int, default=0)
        return sp

    common(sub.add_parser("spectrum", help="bands and points of the fractafold spectrum"))
    sp = common(sub.add_parser("verify", help="run verification suites"))
    sp.add_argument("--suite", action="append", default=None,
                    help=f"suite name or group; one of {sorted(checks.SUITES) + sorted(checks.GROUPS)}")
    sp = common(sub.add_parser("kernel", help="kernel and spectral-measure dumps"))
    sp.add_argument("--lam", type=_float_list, default=[3.0])
    common(sub.add_parser("resolve", help="resolution-of-identity reports"))
    common(sub.add_parser("e6", help="E6 translate-basis coefficients of the honeycomb"))
    common(sub.add_parser("julia", help="Julia-set backward orbit and its fR preimages"))
    for name in ("spectrum", "kernel", "resolve"):
        sub.choices[name].add_argument("--graph", default=None, help="custom Gamma0 JSON")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=ns.command, model=ns.model, cutoff=ns.cutoff, grid=ns.grid, N=ns.N, tol=ns.tol,
        out=output_root(ns.out), workers=ns.workers, seed=ns.seed,
        suites=getattr(ns, "suite", None) or ["default"], graph=getattr(ns, "graph", None),
        lam=getattr(ns, "lam", []) or [],
    )


# ---------------------------------------------------------------------------
# commands

def _sigma0(cfg: RunConfig) -> dict:
    if cfg.model == "tree":
        return {"bands": [th.BAND], "points": []}
    if cfg.model in ("ladder", "honeycomb"):
        return {"bands": [(0.0, 6.0)], "points": [6.0]}
    if cfg.model == "triangular-field":
        lo, hi = lh.triangular_symbol_band()
        return {"bands": [(4 * lo, 4 * hi)], "points": []}
    if cfg.model in ("custom", "fractafold"):
        g0 = graph_from_json(Path(cfg.graph).read_text()) if cfg.graph else octahedron()
        vals = brute_spectrum(g0, ff.VARIANT).values
        return {"bands": [], "points": [round(v, 12) for v, _ in cluster_eigenvalues(vals, cfg.tol)]}
    raise ValueError(f"unknown model {cfg.model}")


def cmd_spectrum(cfg: RunConfig) -> int:
    rep = ff.fractafold_spectrum(_sigma0(cfg), cfg.cutoff)
    stem = cfg.model
    write_json(cfg.out / f"{stem}_spectrum.json", rep.to_json())
    write_csv(cfg.out / f"{stem}_bands.csv", ["band", "lower", "upper"],
              [(i, lo, hi) for i, (lo, hi, _) in enumerate(rep.bands)])
    write_csv(cfg.out / f"{stem}_points.csv", ["value", "series", "m0"],
              [(d["value"], d["series"], d["m0"]) for d in rep.points])
    if cfg.model == "honeycomb":
        u = np.arange(cfg.grid) / cfg.grid
        rows = []
        for uu in u:
            lp, lm, _, _ = lh.honeycomb_symbol(uu, u)
            rows += [(uu, vv, a, b) for vv, a, b in zip(u, lp, lm)]
        write_csv(cfg.out / "honeycomb_bloch.csv", ["u", "v", "lambda_plus", "lambda_minus"], rows)
    if cfg.model == "triangular-field":
        write_json(cfg.out / "triangular_field.json", lh.triangular_field_bands(cfg.cutoff))
    return 0


def run_checks(cfg: RunConfig) -> list[checks.Check]:
    names = checks.resolve_suites(cfg.suites)
    ctx = {"seed": cfg.seed, "N": cfg.N or None, "tol": cfg.tol}
    with ThreadPoolExecutor(max_workers=min(cfg.workers, len(names))) as pool:
        results = list(pool.map(lambda n: checks.SUITES[n](ctx), names))
    return [c for r in results for c in r]


def cmd_verify(cfg: RunConfig) -> int:
    try:
        results = run_checks(cfg)
    except KeyError as exc:
        print(f"unknown suite {exc}", file=sys.stderr)
        return 2
    report = [c.to_json() for c in results]
    write_json(cfg.out / "verify_report.json", report)
    print(dumps(report))
    return 0 if all(c.passed for c in results) else 1


def cmd_kernel(cfg: RunConfig) -> int:
    if cfg.model == "tree":
        dmax = cfg.N[0] if cfg.N else 12
        for lam in cfg.lam:
            p = th.TreeParameter.from_lambda(lam)
            d = np.arange(dmax + 1)
            rows = zip(d, th.kernel_profile("Gamma", p)(d), th.kernel_profile("Gamma0", p)(d))
            write_csv(cfg.out / f"tree_kernel_{lam:g}.csv", ["distance", "gamma", "gamma0"], rows)
        t = np.linspace(0.0, th.T_MAX, cfg.grid + 1)
        lam_t = 3.0 - 2.0 * th.SQRT2 * np.cos(t * th.LOG2)
        dens_t = th.dm_t(t)
        with np.errstate(invalid="ignore", divide="ignore"):
            dens_l = th.dm_lambda(lam_t)
        write_csv(cfg.out / "tree_measure.csv", ["t", "lambda", "dm_dt", "dm_dlambda"],
                  zip(t, lam_t, dens_t, np.nan_to_num(dens_l)))
        mass = float(np.trapezoid(dens_t, t))
        ok = abs(mass - 1.0) <= 1e-6
        print(dumps({"measure_mass_trapezoid": mass, "status": "pass" if ok else "fail"}))
        return 0 if ok else 1
    if cfg.model in ("fractafold", "custom"):
        level = cfg.N[0] if cfg.N else 2
        g0 = graph_from_json(Path(cfg.graph).read_text()) if cfg.graph else octahedron()
        mesh = ff.FractafoldMesh(g0, level)
        for mu in cfg.lam:
            addr = dec.EigenvalueAddress(m0=0, seed=mu)
            K = ff.fractafold_kernel(mesh, addr, ff.gamma0_projector(g0, mu, cfg.tol))
            n = K.shape[0]
            rows = ((i, j, K[i, j]) for i in range(n) for j in range(n))
            write_csv(cfg.out / f"fractafold_kernel_{mu:g}.csv", ["x", "y", "value"], rows)
        return 0
    print("kernel dumps are available for tree, fractafold and custom models", file=sys.stderr)
    return 2


def cmd_resolve(cfg: RunConfig) -> int:
    if cfg.model == "tree":
        radius = cfg.N[0] if cfg.N else 6
        ball = th.TreeBall(radius)
        v = th.resolve_identity(ball, "Gamma", {(): 1.0})
        target = np.zeros_like(v)
        target[ball.idx("Gamma", ())] = 1.0
        err = float(np.abs(v - target)[ball.depth <= 4].max())
        rep = {"model": "tree", "max_error_distance_le_4": err}
        ok = err <= 1e-6
    else:
        g0 = graph_from_json(Path(cfg.graph).read_text()) if cfg.graph else octahedron()
        mesh = ff.FractafoldMesh(g0, cfg.N[0] if cfg.N else 2)
        r = ff.resolution_of_identity(mesh, True, cfg.tol)
        r1 = ff.resolution_of_identity(mesh, False, cfg.tol)
        rep = {"model": "fractafold", "identity_error": r.identity_error,
               "identity_error_without_M": r1.identity_error,
               "decimated": r.n_decimated, "exceptional": r.n_exceptional}
        ok = r.identity_error <= 1e-8
    rep["status"] = "pass" if ok else "fail"
    write_json(cfg.out / f"resolve_{cfg.model}.json", rep)
    print(dumps(rep))
    return 0 if ok else 1


def cmd_e6(cfg: RunConfig) -> int:
    radius = cfg.N[0] if cfg.N else 5
    grid = max(cfg.grid, 2 * radius + 8)
    table = lh.hex_E6_basis_table(radius, grid=1 << int(np.ceil(np.log2(grid))))
    coeffs = {f"[{j},{k}]": float(table[j + radius, k + radius])
              for j in range(-radius, radius + 1) for k in range(-radius, radius + 1)}
    write_json(cfg.out / "e6_coefficients.json", coeffs)
    return 0


def cmd_julia(cfg: RunConfig) -> int:
    depth = cfg.N[0] if cfg.N else 6
    pts = dec.julia_backward_orbit(dec.GASKET, depth)
    write_csv(cfg.out / "julia_orbit.csv", ["point"], ((p,) for p in pts))
    disp = ff.barlow_perkins_display(depth, cfg.cutoff[1])
    write_csv(cfg.out / "julia_preimages.csv", ["value", "label"],
              ((d["value"], d["label"]) for d in disp))
    return 0


COMMANDS = {"spectrum": cmd_spectrum, "verify": cmd_verify, "kernel": cmd_kernel,
            "resolve": cmd_resolve, "e6": cmd_e6, "julia": cmd_julia}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        return COMMANDS[cfg.command](cfg)
    except (FractafoldError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
