"""Batch command-line front end.

Subcommands: ``group-info``, ``geodesic``, ``mesh make-annulus``,
``minimize``, ``verify-lemma``.  Experiments are driven by JSON configs
(``--config``); flags cover only paths, seed and output directory.  Every
run writes a ``report.json`` with the config echo, artifact paths and one
entry per asserted check (tolerance and measured value); the process exits
0 iff all asserted checks pass.  Identical config + seed produce
byte-identical artifacts; randomness, where used, comes from numpy's
seedable PCG64 generator.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from . import __version__
from .geometry import geodesic_integrate
from .group import Matrix2, group_constants, left_frame_at, metric_at
from .lemma import LemmaConfig, c1_constant, fuzz_lower_bound, verify_subharmonic_on_mesh
from .mesh import load_obj, save_obj
from .serialize import dumps_json, format_real, loads_json, write_text_atomic
from .variational import BoundaryCircles, SlabConfig, make_annulus_mesh, minimize

__all__ = ["main"]


class ConfigError(ValueError):
    pass


def _check_keys(cfg: dict, allowed, required, where: str) -> None:
    unknown = sorted(set(cfg) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown keys {unknown} in {where}")
    missing = sorted(set(required) - set(cfg))
    if missing:
        raise ConfigError(f"missing keys {missing} in {where}")


def _matrix(cfg: dict) -> Matrix2:
    try:
        return Matrix2.of(cfg["A"])
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"bad matrix A: {exc}") from exc


def _point(value, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise ConfigError(f"{name} must be a finite [x1, x2, x3] triple")
    return arr


def _check(name: str, measured: float, tolerance: float, passed: bool) -> dict:
    return {"name": name, "measured": measured, "tolerance": tolerance, "passed": bool(passed)}


# ---------------------------------------------------------------------------
# handlers: each returns (results, artifacts, checks)


def _cmd_group_info(cfg, out, seed):
    _check_keys(cfg, {"A", "H", "points"}, {"A"}, "group-info config")
    A = _matrix(cfg)
    H = float(cfg.get("H", 0.0))
    consts = group_constants(A)
    results = {
        "trace": consts.trace,
        "H0": consts.h0,
        "unimodular": consts.unimodular,
        "C1": c1_constant(A, H),
        "H": H,
        "flipped": A.flipped,
    }
    checks = []
    samples = []
    for k, raw in enumerate(cfg.get("points", [])):
        p = _point(raw, f"points[{k}]")
        frame = left_frame_at(p, A)
        g = metric_at(p, A)
        residual = float(np.max(np.abs(frame.T @ g @ frame - np.eye(3))))
        checks.append(_check(f"frame-orthonormal-point-{k}", residual, 1e-12, residual <= 1e-12))
        samples.append({"point": p.tolist(), "frame": frame.tolist(), "metric": g.tolist()})
    if samples:
        results["points"] = samples
    return results, {}, checks


def _cmd_geodesic(cfg, out, seed):
    _check_keys(cfg, {"A", "start", "velocity", "length", "steps"},
                {"A", "start", "velocity", "length", "steps"}, "geodesic config")
    A = _matrix(cfg)
    start = _point(cfg["start"], "start")
    velocity = _point(cfg["velocity"], "velocity")
    length = float(cfg["length"])
    steps = int(cfg["steps"])
    path = geodesic_integrate(start, velocity, length, steps, A)
    rows = ["t,x1,x2,x3,v1,v2,v3"]
    for t, p, v in zip(path.t, path.points, path.velocities):
        rows.append(",".join(format_real(x) for x in (t, *p, *v)))
    csv_path = os.path.join(out, "geodesic.csv")
    write_text_atomic(csv_path, "\n".join(rows) + "\n")
    drift = float(np.max(np.abs(path.speeds() - 1.0)))
    # RK4 drift contract is 1e-8 per unit length at 1e3 steps/unit; rescale as h^4
    resolution = max(1.0, 1e3 * length / steps) ** 4
    tol = 1e-8 * max(1.0, length) * resolution
    checks = [_check("unit-speed-drift", drift, tol, drift <= tol)]
    return {"steps": steps, "length": length}, {"path_csv": "geodesic.csv"}, checks


def _parse_circles(block) -> tuple[BoundaryCircles, int]:
    keys = {"R_in", "h_in", "R_out", "h_out", "n_seg", "rings"}
    _check_keys(block, keys, keys, "circles config")
    circles = BoundaryCircles(
        r_in=float(block["R_in"]), h_in=float(block["h_in"]),
        r_out=float(block["R_out"]), h_out=float(block["h_out"]),
        n_seg=int(block["n_seg"]))
    return circles, int(block["rings"])


def _cmd_make_annulus(cfg, out, seed):
    _check_keys(cfg, {"circles"}, {"circles"}, "make-annulus config")
    circles, rings = _parse_circles(cfg["circles"])
    mesh = make_annulus_mesh(circles, rings)
    obj_path = os.path.join(out, "annulus.obj")
    save_obj(mesh, obj_path)
    expected = circles.n_seg * (rings + 1)
    checks = [
        _check("vertex-count", float(mesh.n_vertices), 0.0, mesh.n_vertices == expected),
        _check("boundary-vertex-count", float(mesh.boundary_mask.sum()), 0.0,
               int(mesh.boundary_mask.sum()) == 2 * circles.n_seg),
    ]
    return ({"n_vertices": mesh.n_vertices, "n_faces": mesh.n_faces},
            {"mesh": "annulus.obj"}, checks)


def _cmd_minimize(cfg, out, seed):
    allowed = {"A", "eps", "circles", "tol_grad", "max_iter", "seed", "probe_radius"}
    _check_keys(cfg, allowed, {"A", "eps", "circles"}, "minimize config")
    A = _matrix(cfg)
    slab = SlabConfig(eps=float(cfg["eps"]), A=A)
    circles, rings = _parse_circles(cfg["circles"])
    circles.check_heights(slab.eps)
    start = make_annulus_mesh(circles, rings)
    tol_grad = float(cfg["tol_grad"]) if "tol_grad" in cfg else None
    max_iter = int(cfg.get("max_iter", 20000))
    probe_radius = float(cfg.get("probe_radius", 2.0 * min(circles.r_in, circles.r_out)))

    log_rows = ["iter,T,grad_norm,flatness"]

    def log(it, t_val, sup, flat):
        log_rows.append(",".join([str(it), format_real(t_val), format_real(sup), format_real(flat)]))

    final, report = minimize(start, slab, tol_grad=tol_grad, max_iter=max_iter,
                             probe_radius=probe_radius, log=log)
    save_obj(final, os.path.join(out, "minimized.obj"))
    write_text_atomic(os.path.join(out, "iterations.csv"), "\n".join(log_rows) + "\n")

    z = final.vertices[:, 2]
    slab_excess = float(max(0.0, -z.min(), z.max() - slab.eps))
    boundary_move = float(np.max(np.linalg.norm(
        final.vertices[final.boundary_mask] - start.vertices[start.boundary_mask], axis=1),
        initial=0.0))
    checks = [
        _check("converged-grad-sup", report.grad_sup, report.tol_grad,
               report.grad_sup <= report.tol_grad),
        _check("slab-confinement", slab_excess, 0.0, slab_excess == 0.0),
        _check("boundary-pinned", boundary_move, 0.0, boundary_move == 0.0),
        _check("interior-H-deviation", report.h_max_dev, 0.05, report.h_max_dev <= 0.05),
    ]
    results = {
        "T": report.t_value,
        "area": report.area,
        "volume": report.volume,
        "grad_sup": report.grad_sup,
        "h_mean": report.h_mean,
        "h_max_dev": report.h_max_dev,
        "flatness": report.flatness,
        "iterations": report.iterations,
        "converged": report.converged,
        "tol_grad": report.tol_grad,
    }
    return results, {"mesh": "minimized.obj", "iterations": "iterations.csv"}, checks


def _cmd_verify_lemma(cfg, out, seed):
    allowed = {"A", "H", "samples", "seed", "mode", "mesh_path", "K"}
    _check_keys(cfg, allowed, {"A", "H", "mode"}, "verify-lemma config")
    A = _matrix(cfg)
    H = float(cfg["H"])
    mode = cfg["mode"]
    if mode == "jets":
        samples = int(cfg.get("samples", 100000))
        used_seed = int(seed if seed is not None else cfg.get("seed", 0))
        res = fuzz_lower_bound(A, H, samples, used_seed)
        res["seed"] = used_seed
        checks = [_check("lower-bound-violations", float(res["violations"]), 1e-9,
                         res["violations"] == 0)]
        return res, {}, checks
    if mode == "mesh":
        if "mesh_path" not in cfg:
            raise ConfigError("mesh mode requires mesh_path")
        mesh = load_obj(cfg["mesh_path"])
        K = float(cfg.get("K", 10.0))
        rep = verify_subharmonic_on_mesh(mesh, LemmaConfig(A=A, H=H), K=K)
        results = {
            "min_laplacian": rep.min_laplacian,
            "threshold": rep.threshold,
            "mean_edge_length": rep.mean_edge_length,
            "violating_fraction": rep.violating_fraction,
            "n_interior": rep.n_interior,
            "C1": c1_constant(A, H),
        }
        checks = [_check("subharmonic-min", rep.min_laplacian, rep.threshold, rep.passed)]
        return results, {}, checks
    raise ConfigError(f"mode must be 'jets' or 'mesh', got {mode!r}")


_HANDLERS = {
    "group-info": _cmd_group_info,
    "geodesic": _cmd_geodesic,
    "make-annulus": _cmd_make_annulus,
    "minimize": _cmd_minimize,
    "verify-lemma": _cmd_verify_lemma,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semidirect",
                                     description="numerical geometry of R^2 x|_A R")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        return p

    add("group-info", help="group constants, frames and metric samples")
    add("geodesic", help="integrate a geodesic, emit CSV")
    mesh = sub.add_parser("mesh", help="mesh construction commands")
    mesh_sub = mesh.add_subparsers(dest="mesh_command", required=True)
    annulus = mesh_sub.add_parser("make-annulus", help="structured annulus between two circles")
    annulus.add_argument("--config", required=True)
    annulus.add_argument("--out", default=".")
    annulus.add_argument("--seed", type=int, default=None)
    add("minimize", help="minimize Area + 2 H0 Volume in the slab")
    add("verify-lemma", help="fuzz the subharmonicity bound or verify it on a mesh")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    command = args.command if args.command != "mesh" else args.mesh_command
    with open(args.config, "r", encoding="utf-8") as fh:
        cfg = loads_json(fh.read())
    if not isinstance(cfg, dict):
        print("error: config must be a JSON object", file=sys.stderr)
        return 2
    os.makedirs(args.out, exist_ok=True)
    started = time.perf_counter()
    try:
        results, artifacts, checks = _HANDLERS[command](cfg, args.out, args.seed)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    elapsed = time.perf_counter() - started
    passed = all(c["passed"] for c in checks)
    report = {
        "command": command,
        "version": __version__,
        "config": cfg,
        "artifacts": artifacts,
        "results": results,
        "checks": checks,
        "passed": passed,
    }
    report_path = os.path.join(args.out, "report.json")
    write_text_atomic(report_path, dumps_json(report))
    for c in checks:
        status = "PASS" if c["passed"] else "FAIL"
        print(f"[{status}] {c['name']}: measured {format_real(c['measured'])} "
              f"(tolerance {format_real(c['tolerance'])})")
    print(f"report: {report_path} ({elapsed:.2f} s)")
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
