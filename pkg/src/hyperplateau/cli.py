"""Command-line front end: configuration parsing, run orchestration, and
export of reports (JSON), tables (CSV), and meshes (OBJ).

Exit codes: 0 success, 2 solver non-convergence, 3 admissibility loss,
4 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import hypgeom, solver, symfunc, verify
from .errors import (
    AdmissibilityLostError,
    ConfigError,
    NonConvergenceError,
)

SCHEMA_VERSION = "1"

COMMANDS = ("verify-f", "solve", "sweep", "cap", "check-estimates", "refine")
FAMILIES = {
    "consecutive_quotient": symfunc.CONSECUTIVE_QUOTIENT,
    "general_quotient": symfunc.GENERAL_QUOTIENT,
    "kth_root": symfunc.KTH_ROOT,
}
EXPORTS = ("report-json", "table-csv", "mesh-obj")

_DEFAULTS = {
    "family": "consecutive_quotient",
    "k": 1,
    "l": None,
    "n": 2,
    "shape": "ball",
    "radius": 1.0,
    "axes": None,
    "sigma": None,
    "sigmas": None,
    "grid": 512,
    "epsilon_min": 1e-3,
    "seed": 0,
    "samples": 10000,
    "levels": 2,
    "threads": 1,
    "jacobian": "finite_difference",
    "out": ".",
    "export": ["report-json"],
}

_KNOWN_KEYS = {"command"} | set(_DEFAULTS)


# ---------------------------------------------------------------------------
# configuration


def validate_config(raw: dict) -> dict:
    """Normalize a raw config mapping: fill defaults, check every cross-field
    constraint, and reject unknown keys; all violations reported at once."""
    violations = []
    unknown = sorted(set(raw) - _KNOWN_KEYS)
    for key in unknown:
        violations.append(f"unknown config key {key!r}")

    cfg = dict(_DEFAULTS)
    cfg.update({k: v for k, v in raw.items() if k in _KNOWN_KEYS})

    command = cfg.get("command")
    if command not in COMMANDS:
        violations.append(f"command must be one of {COMMANDS}, got {command!r}")

    if cfg["family"] not in FAMILIES:
        violations.append(f"family must be one of {sorted(FAMILIES)}, got {cfg['family']!r}")
    try:
        cfg["k"] = int(cfg["k"])
        cfg["n"] = int(cfg["n"])
    except (TypeError, ValueError):
        violations.append("k and n must be integers")
    else:
        if cfg["n"] < 2:
            violations.append(f"n must be >= 2, got {cfg['n']}")
        if not 1 <= cfg["k"] <= cfg["n"]:
            violations.append(f"need 1 <= k <= n, got k={cfg['k']}, n={cfg['n']}")
        if cfg["family"] == "general_quotient":
            if cfg["l"] is None:
                violations.append("general_quotient requires l")
            else:
                cfg["l"] = int(cfg["l"])
                if not 0 <= cfg["l"] < cfg["k"]:
                    violations.append(f"general_quotient needs 0 <= l < k, got l={cfg['l']}, k={cfg['k']}")
        elif cfg["l"] is not None:
            violations.append("l is only meaningful for general_quotient")

    if cfg["shape"] not in (hypgeom.SHAPE_BALL, hypgeom.SHAPE_ELLIPSE, hypgeom.SHAPE_ANNULUS):
        violations.append(f"unknown shape {cfg['shape']!r}")
    if cfg["shape"] == hypgeom.SHAPE_ELLIPSE:
        axes = cfg.get("axes")
        if not (isinstance(axes, (list, tuple)) and len(axes) == 2):
            violations.append("ellipse requires axes = [a_axis, b_axis]")
        else:
            cfg["axes"] = [float(axes[0]), float(axes[1])]
            if not cfg["axes"][0] >= cfg["axes"][1] > 0:
                violations.append("ellipse needs a_axis >= b_axis > 0")
    else:
        cfg["radius"] = float(cfg["radius"])
        if cfg["radius"] <= 0:
            violations.append("radius must be positive")

    needs_sigma = command in ("solve", "cap", "check-estimates", "refine")
    if needs_sigma:
        if cfg["sigma"] is None:
            violations.append(f"command {command!r} requires sigma")
        else:
            cfg["sigma"] = float(cfg["sigma"])
            if not 0.0 < cfg["sigma"] < 1.0:
                violations.append(f"sigma must lie in (0, 1), got {cfg['sigma']}")
    if command == "sweep":
        sigmas = cfg.get("sigmas")
        if not sigmas:
            violations.append("sweep requires sigmas")
        else:
            cfg["sigmas"] = [float(s) for s in sigmas]
            if any(not 0.0 < s < 1.0 for s in cfg["sigmas"]):
                violations.append("every sweep sigma must lie in (0, 1)")
            if sorted(cfg["sigmas"], reverse=True) != cfg["sigmas"]:
                violations.append("sweep sigmas must be sorted descending")

    cfg["grid"] = int(cfg["grid"])
    if cfg["grid"] < 8:
        violations.append(f"grid must be >= 8, got {cfg['grid']}")
    cfg["epsilon_min"] = float(cfg["epsilon_min"])
    if not 0.0 < cfg["epsilon_min"] < 0.1:
        violations.append("epsilon_min must lie in (0, 0.1)")
    cfg["seed"] = int(cfg["seed"])
    cfg["samples"] = int(cfg["samples"])
    if cfg["samples"] < 1:
        violations.append("samples must be >= 1")
    cfg["levels"] = int(cfg["levels"])
    if command == "refine" and cfg["levels"] < 2:
        violations.append("refine needs levels >= 2")
    cfg["threads"] = int(cfg["threads"])
    if cfg["threads"] < 1:
        violations.append("threads must be >= 1")
    if cfg["jacobian"] not in ("finite_difference", "analytic_Fij"):
        violations.append(f"unknown jacobian mode {cfg['jacobian']!r}")

    if isinstance(cfg["export"], str):
        cfg["export"] = [e for e in cfg["export"].split(",") if e]
    bad = sorted(set(cfg["export"]) - set(EXPORTS))
    for e in bad:
        violations.append(f"unknown export format {e!r}")

    if violations:
        raise ConfigError(violations)
    return cfg


def _curvature_spec(cfg: dict) -> symfunc.CurvatureSpec:
    if cfg["family"] == "consecutive_quotient":
        return symfunc.CurvatureSpec.consecutive_quotient(cfg["k"], cfg["n"])
    if cfg["family"] == "general_quotient":
        return symfunc.CurvatureSpec.general_quotient(cfg["k"], cfg["l"], cfg["n"])
    return symfunc.CurvatureSpec.kth_root(cfg["k"], cfg["n"])


def _domain(cfg: dict) -> hypgeom.Domain:
    if cfg["shape"] == hypgeom.SHAPE_ELLIPSE:
        return hypgeom.Domain.ellipse(*cfg["axes"])
    if cfg["shape"] == hypgeom.SHAPE_ANNULUS:
        raise ConfigError(["annulus domains are not solvable (not mean-convex); "
                           "only ball and ellipse are supported by the solver"])
    return hypgeom.Domain.ball(cfg["radius"], cfg["n"])


def _solver_config(cfg: dict) -> solver.SolverConfig:
    return solver.SolverConfig(
        spec=_curvature_spec(cfg),
        domain=_domain(cfg),
        sigma_target=cfg["sigma"],
        grid_size=cfg["grid"],
        epsilon_min=cfg["epsilon_min"],
        jacobian_mode=cfg["jacobian"],
    )


# ---------------------------------------------------------------------------
# artifact writers (atomic: write-temp-then-rename)


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report_json(path: str, payload: dict, config: dict) -> None:
    doc = {"schema_version": SCHEMA_VERSION, "config": config, **payload}
    _atomic_write(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def write_table_csv(path: str, rows: list, columns: list) -> None:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore",
                            lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    _atomic_write(path, buf.getvalue())


def mesh_from_radial(solution, n_theta: int = 64) -> str:
    """Revolve a radial profile into an OBJ mesh.  Vertices are (x, y, u) in
    upper half-space coordinates; faces wind counterclockwise seen from
    above (+u side)."""
    rho = solution.rho
    u = solution.u
    lines = ["# radial graph, revolved profile"]
    # ring vertices, skipping the axis node; vertex 1 is the apex
    lines.append(f"v 0 0 {u[0]:.9g}")
    for i in range(1, len(rho)):
        for j in range(n_theta):
            t = 2.0 * math.pi * j / n_theta
            lines.append(f"v {rho[i] * math.cos(t):.9g} {rho[i] * math.sin(t):.9g} {u[i]:.9g}")

    def ring(i, j):  # 1-based OBJ index of ring i >= 1, sector j
        return 2 + (i - 1) * n_theta + (j % n_theta)

    for j in range(n_theta):
        lines.append(f"f 1 {ring(1, j)} {ring(1, j + 1)}")
    for i in range(1, len(rho) - 1):
        for j in range(n_theta):
            a, b = ring(i, j), ring(i, j + 1)
            c, d = ring(i + 1, j), ring(i + 1, j + 1)
            lines.append(f"f {a} {c} {d}")
            lines.append(f"f {a} {d} {b}")
    return "\n".join(lines) + "\n"


def mesh_from_grid(solution) -> str:
    """Tensor-grid solution to OBJ: vertices (x, y, u) for every node of a
    cell touching the interior; two triangles per cell, counterclockwise
    from above."""
    xs, ys, U, mask = solution.xs, solution.ys, solution.u2d, solution.mask
    nx, ny = U.shape
    index = -np.ones((nx, ny), dtype=int)
    lines = ["# tensor-grid graph over the ellipse"]
    used = np.zeros((nx, ny), dtype=bool)
    cells = []
    for i in range(nx - 1):
        for j in range(ny - 1):
            if mask[i:i + 2, j:j + 2].any():
                cells.append((i, j))
                used[i:i + 2, j:j + 2] = True
    count = 0
    for i in range(nx):
        for j in range(ny):
            if used[i, j]:
                count += 1
                index[i, j] = count
                lines.append(f"v {xs[i]:.9g} {ys[j]:.9g} {U[i, j]:.9g}")
    for i, j in cells:
        a, b = index[i, j], index[i + 1, j]
        c, d = index[i + 1, j + 1], index[i, j + 1]
        lines.append(f"f {a} {b} {c}")
        lines.append(f"f {a} {c} {d}")
    return "\n".join(lines) + "\n"


def _maybe_write_mesh(cfg, solution, artifacts):
    if "mesh-obj" not in cfg["export"]:
        return
    if solution.spec.n != 2:
        raise ConfigError(["mesh-obj export requires n = 2"])
    path = os.path.join(cfg["out"], "mesh.obj")
    if solution.kind == "radial":
        _atomic_write(path, mesh_from_radial(solution))
    else:
        _atomic_write(path, mesh_from_grid(solution))
    artifacts.append(path)


# ---------------------------------------------------------------------------
# command handlers


def _cmd_verify_f(cfg):
    spec = _curvature_spec(cfg)
    report = symfunc.check_conditions(spec, cfg["samples"], cfg["seed"])
    return {"condition_report": report.to_dict()}, None, None


def _cmd_cap(cfg):
    cap = hypgeom.make_cap(cfg["radius"], cfg["sigma"])
    payload = {
        "cap": {
            "R": cap.R, "sigma": cap.sigma, "r": cap.r, "c": cap.c,
            "u0": cap.apex_height,
        }
    }
    sol = solver.radial_solution_from_profile(
        _curvature_spec(cfg), hypgeom.Domain.ball(cfg["radius"], cfg["n"]),
        cfg["sigma"], cfg["grid"],
        hypgeom.make_cap_with_boundary_height(
            cfg["radius"], cfg["sigma"], cfg["epsilon_min"]).height,
        cfg["epsilon_min"],
    )
    return payload, sol, None


def _cmd_solve(cfg):
    sol = solver.continuation_solve(_solver_config(cfg))
    return {"statistics": sol.report.statistics()}, sol, None


def _cmd_sweep(cfg):
    base = _solver_config(dict(cfg, sigma=cfg["sigmas"][0]))
    rows = solver.sweep_sigma(base, cfg["sigmas"])
    columns = ["sigma", "status", "converged", "u0", "kappa_max",
               "min_nu_vertical", "iterations", "below_sigma0"]
    return {"sweep": rows}, None, (rows, columns)


def _cmd_refine(cfg):
    study = solver.refine_study(_solver_config(cfg), cfg["levels"])
    columns = ["grid_size", "converged", "u0", "kappa_max",
               "final_residual", "status"]
    return {"refine": study}, None, (study["rows"], columns)


def _cmd_check_estimates(cfg):
    sol = solver.continuation_solve(_solver_config(cfg))
    min_nu, grad_pass = verify.gradient_estimate_check(sol)
    consts, sets = verify.estimate_constants(sol)
    algebra = verify.algebraic_subinequalities(cfg["samples"], cfg["seed"])
    payload = {
        "statistics": sol.report.statistics(),
        "gradient_estimate": {"min_nu_vertical": min_nu, "passed": grad_pass},
        "estimate_constants": consts.to_dict(),
        "index_sets": sets.to_dict(),
        "algebraic_subinequalities": algebra,
    }
    return payload, sol, None


_HANDLERS = {
    "verify-f": _cmd_verify_f,
    "cap": _cmd_cap,
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "refine": _cmd_refine,
    "check-estimates": _cmd_check_estimates,
}


def run(raw_config: dict) -> int:
    """Validate, dispatch, write artifacts; returns the process exit code."""
    try:
        cfg = validate_config(raw_config)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 4

    try:
        payload, solution, table = _HANDLERS[cfg["command"]](cfg)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 4
    except NonConvergenceError as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return 2
    except AdmissibilityLostError as exc:
        print(f"admissibility lost: {exc}", file=sys.stderr)
        return 3

    artifacts = []
    if "report-json" in cfg["export"]:
        path = os.path.join(cfg["out"], "report.json")
        write_report_json(path, payload, cfg)
        artifacts.append(path)
    if "table-csv" in cfg["export"]:
        if table is None:
            print("table-csv export is only available for sweep and refine",
                  file=sys.stderr)
            return 4
        rows, columns = table
        path = os.path.join(cfg["out"], "table.csv")
        write_table_csv(path, rows, columns)
        artifacts.append(path)
    if solution is not None:
        try:
            _maybe_write_mesh(cfg, solution, artifacts)
        except ConfigError as exc:
            print(str(exc), file=sys.stderr)
            return 4
    elif "mesh-obj" in cfg["export"]:
        print(f"mesh-obj export is not available for {cfg['command']}",
              file=sys.stderr)
        return 4

    for path in artifacts:
        print(path)
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperplateau",
        description="Constant-curvature graphs over planar domains in the "
                    "upper half-space model: solver, verification, exports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("verify-f", "run the structural condition suite for a curvature function"),
        ("solve", "solve the Dirichlet problem at one sigma"),
        ("sweep", "warm-started solve over a descending list of sigmas"),
        ("cap", "evaluate the closed-form umbilic cap"),
        ("check-estimates", "solve, then check the gradient/curvature estimate machinery"),
        ("refine", "solve across grid refinement levels"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config file with flat keys; flags override")
        p.add_argument("--family", choices=sorted(FAMILIES))
        p.add_argument("--k", type=int)
        p.add_argument("--l", type=int)
        p.add_argument("--n", type=int)
        p.add_argument("--shape", choices=["ball", "ellipse", "annulus"])
        p.add_argument("--radius", type=float)
        p.add_argument("--axes", help="ellipse semi-axes as A,B")
        p.add_argument("--sigma", type=float)
        p.add_argument("--sigmas", help="comma-separated descending list")
        p.add_argument("--grid", type=int)
        p.add_argument("--epsilon-min", dest="epsilon_min", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--samples", type=int)
        p.add_argument("--levels", type=int)
        p.add_argument("--threads", type=int)
        p.add_argument("--jacobian", choices=["finite_difference", "analytic_Fij"])
        p.add_argument("--out", help="output directory (default: current)")
        p.add_argument("--export", help="comma-separated subset of "
                                        "report-json,table-csv,mesh-obj")
    return parser


def _raw_config_from_args(args: argparse.Namespace) -> dict:
    raw = {}
    if args.config:
        try:
            with open(args.config) as f:
                raw = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError([f"cannot read config file: {exc}"]) from exc
        if not isinstance(raw, dict):
            raise ConfigError(["config file must contain a JSON object"])
    raw["command"] = args.command
    for key in ("family", "k", "l", "n", "shape", "radius", "sigma", "grid",
                "epsilon_min", "seed", "samples", "levels", "threads",
                "jacobian", "out", "export"):
        val = getattr(args, key, None)
        if val is not None:
            raw[key] = val
    if args.axes is not None:
        raw["axes"] = [float(x) for x in args.axes.split(",")]
    if args.sigmas is not None:
        raw["sigmas"] = [float(x) for x in args.sigmas.split(",")]
    return raw


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        raw = _raw_config_from_args(args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"invalid flag value: {exc}", file=sys.stderr)
        return 4
    return run(raw)


if __name__ == "__main__":
    sys.exit(main())
