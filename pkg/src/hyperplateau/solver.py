"""Damped Newton continuation for the Dirichlet problem f(kappa[graph u]) =
sigma with u = epsilon on the domain boundary.

The radial path (any n, ball domains) discretizes the profile ODE on a
uniform grid with a symmetry node at the axis; the tensor-grid path for
ellipse domains lives in `grid`.  Continuation first walks sigma down from
0.8 at a moderate boundary height, then shrinks the boundary height; every
accepted Newton iterate is admissible at every interior node.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import solve_banded

from . import hypgeom, symfunc
from .errors import (
    AdmissibilityLostError,
    NonConvergenceError,
    SingularJacobianError,
    UnsupportedSolutionError,
)
from .hypgeom import Domain, radial_principal_curvatures
from .symfunc import CurvatureSpec

SIGMA0_INTERVAL = (0.3703, 0.3704)  # classical small-sigma threshold, from the literature


def default_epsilon_schedule(epsilon_min: float = 1e-3, start: float = 0.1) -> tuple:
    vals = []
    e = start
    while e > epsilon_min * (1.0 + 1e-12):
        vals.append(e)
        e *= 0.5
    vals.append(epsilon_min)
    return tuple(vals)


def default_sigma_schedule(sigma_target: float, start: float = 0.8, step: float = 0.05) -> tuple:
    if abs(sigma_target - start) < 1e-12:
        return (sigma_target,)
    direction = -1.0 if sigma_target < start else 1.0
    vals = [start]
    while True:
        nxt = vals[-1] + direction * step
        if direction * (sigma_target - nxt) <= 1e-12:
            break
        vals.append(nxt)
    vals.append(sigma_target)
    return tuple(vals)


@dataclass
class SolverConfig:
    spec: CurvatureSpec
    domain: Domain
    sigma_target: float
    grid_size: int = 1024
    epsilon_min: float = 1e-3
    epsilon_schedule: tuple | None = None
    sigma_schedule: tuple | None = None
    newton_tol: float | None = None  # default 1e-10 radial, 1e-8 grid
    max_newton_iters: int = 50
    damping_factor: float = 0.5
    max_damping_steps: int = 20
    jacobian_mode: str = "finite_difference"  # or "analytic_Fij"

    def resolved(self) -> "SolverConfig":
        cfg = replace(self)
        if not 0.0 < cfg.sigma_target < 1.0:
            raise ValueError("sigma_target must lie in (0, 1)")
        if cfg.epsilon_schedule is None:
            cfg.epsilon_schedule = default_epsilon_schedule(cfg.epsilon_min)
        if cfg.sigma_schedule is None:
            cfg.sigma_schedule = default_sigma_schedule(cfg.sigma_target)
        eps = np.asarray(cfg.epsilon_schedule)
        sig = np.asarray(cfg.sigma_schedule)
        if np.any(eps <= 0.0) or np.any(np.diff(eps) >= 0.0):
            raise ValueError("epsilon schedule must be positive and strictly decreasing")
        if np.any((sig <= 0.0) | (sig >= 1.0)):
            raise ValueError("sigma schedule values must lie in (0, 1)")
        if len(sig) > 1 and not (np.all(np.diff(sig) < 0.0) or np.all(np.diff(sig) > 0.0)):
            raise ValueError("sigma schedule must be strictly monotone")
        if cfg.newton_tol is None:
            cfg.newton_tol = 1e-10 if cfg.domain.shape == hypgeom.SHAPE_BALL else 1e-8
        if cfg.jacobian_mode not in ("finite_difference", "analytic_Fij"):
            raise ValueError(f"unknown jacobian_mode {cfg.jacobian_mode!r}")
        return cfg


@dataclass
class SolveReport:
    converged: bool
    final_residual: float
    newton_iterations: list
    kappa_max: float
    min_nu_vertical: float
    admissibility_violations: int
    wall_time: float
    sigma: float
    epsilon: float
    grid_size: int
    sigma0_interval: tuple = SIGMA0_INTERVAL
    u0_by_epsilon: dict = field(default_factory=dict)

    @property
    def below_sigma0(self) -> bool:
        return self.sigma < self.sigma0_interval[0]

    def statistics(self) -> dict:
        """Deterministic statistics block (no timing)."""
        return {
            "converged": self.converged,
            "final_residual": self.final_residual,
            "newton_iterations": list(self.newton_iterations),
            "kappa_max": self.kappa_max,
            "min_nu_vertical": self.min_nu_vertical,
            "admissibility_violations": self.admissibility_violations,
            "sigma": self.sigma,
            "epsilon": self.epsilon,
            "grid_size": self.grid_size,
            "below_sigma0": self.below_sigma0,
            "u0_by_epsilon": {f"{k:.12g}": v for k, v in self.u0_by_epsilon.items()},
        }


@dataclass
class GraphSolution:
    domain: Domain
    spec: CurvatureSpec
    sigma: float
    epsilon: float
    kind: str  # "radial" or "grid"
    u: np.ndarray
    kappa: np.ndarray
    nu_vertical: np.ndarray
    w: np.ndarray
    report: SolveReport | None = None
    # radial layout
    rho: np.ndarray | None = None
    up: np.ndarray | None = None
    # grid layout
    xs: np.ndarray | None = None
    ys: np.ndarray | None = None
    mask: np.ndarray | None = None
    u2d: np.ndarray | None = None

    @property
    def u0(self) -> float:
        """Height at the center (radial) or the maximal height (grid)."""
        return float(self.u[0]) if self.kind == "radial" else float(np.max(self.u))

    def interior_jet(self, i: int) -> hypgeom.PointJet:
        if self.kind != "radial":
            raise UnsupportedSolutionError("per-node jets only exposed for radial solutions")
        h = self.rho[1] - self.rho[0]
        up, upp = _radial_derivatives(self.u, h)
        return hypgeom.radial_jet(self.u[i], up[i], upp[i], self.rho[i], self.spec.n)


# ---------------------------------------------------------------------------
# radial discretization


def _radial_derivatives(u: np.ndarray, h: float):
    """Second-order derivatives of a radial profile; symmetry at the axis,
    one-sided second-order stencils at the outer boundary."""
    up = np.empty_like(u)
    upp = np.empty_like(u)
    up[0] = 0.0
    up[1:-1] = (u[2:] - u[:-2]) / (2.0 * h)
    up[-1] = (3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * h)
    upp[0] = 2.0 * (u[1] - u[0]) / h**2
    upp[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / h**2
    upp[-1] = (2.0 * u[-1] - 5.0 * u[-2] + 4.0 * u[-3] - u[-4]) / h**2
    return up, upp


def _radial_kappa(u: np.ndarray, rho: np.ndarray, n: int):
    h = rho[1] - rho[0]
    up, upp = _radial_derivatives(u, h)
    kappa, w = radial_principal_curvatures(u, up, upp, rho, n)
    return kappa, w, up


def residual(u: np.ndarray, spec: CurvatureSpec, sigma: float, epsilon: float,
             rho: np.ndarray, n: int | None = None) -> np.ndarray:
    """Radial residual: f(kappa) - sigma at interior nodes (axis included),
    u - epsilon at the boundary node.  Raises AdmissibilityLostError with the
    offending node list when any interior curvature leaves the cone."""
    n = n if n is not None else spec.n
    bad_height = np.flatnonzero(u[:-1] <= 0.0)
    if bad_height.size:
        raise AdmissibilityLostError(bad_height, "non-positive height at interior nodes")
    kappa, _, _ = _radial_kappa(u, rho, n)
    interior = kappa[:-1]
    ok = np.atleast_1d(symfunc.cone_contains(interior, spec.cone_index))
    if not ok.all():
        raise AdmissibilityLostError(np.flatnonzero(~ok))
    res = np.empty_like(u)
    res[:-1] = symfunc.eval_f(spec, interior, check_cone=False) - sigma
    res[-1] = u[-1] - epsilon
    return res


def _assemble_banded(dres_du, dres_dup, dres_dupp, m, h):
    """Assemble the tridiagonal Jacobian from per-node partials w.r.t. the
    local jet (u_i, u'_i, u''_i), using the exact stencil weights; scipy
    solve_banded (1,1) layout."""
    ab = np.zeros((3, m))
    i = np.arange(1, m - 1)
    ab[1, i] = dres_du[i] + dres_dupp[i] * (-2.0 / h**2)
    ab[2, i - 1] = dres_dup[i] * (-1.0 / (2.0 * h)) + dres_dupp[i] / h**2   # J[i, i-1]
    ab[0, i + 1] = dres_dup[i] * (1.0 / (2.0 * h)) + dres_dupp[i] / h**2   # J[i, i+1]
    # axis node: u' = 0, u'' = 2(u1 - u0)/h^2
    ab[1, 0] = dres_du[0] + dres_dupp[0] * (-2.0 / h**2)
    ab[0, 1] = dres_dupp[0] * (2.0 / h**2)
    # boundary Dirichlet row
    ab[1, m - 1] = 1.0
    ab[2, m - 2] = 0.0
    return ab


def _jacobian_fd(u, spec, rho, n, step: float = 1e-6):
    """Jacobian with the per-node partials of f(kappa[jet]) taken by centered
    differences in the local jet variables, then assembled through the exact
    stencil weights.  Differencing the assembled residual instead would fold
    the probe truncation error through the 1/h^2-stiff stencil map and stall
    Newton on fine grids; the pointwise map has O(1) scales and is safe."""
    h = rho[1] - rho[0]
    up, upp = _radial_derivatives(u, h)
    ui, upi, uppi, rhoi = u[:-1], up[:-1], upp[:-1], rho[:-1]

    def G(a, b, c):
        kappa, _ = radial_principal_curvatures(a, b, c, rhoi, n)
        return symfunc.eval_f(spec, kappa, check_cone=False)

    du = step * (1.0 + np.abs(ui))
    dp = step * (1.0 + np.abs(upi))
    dq = step * (1.0 + np.abs(uppi))
    dres_du = (G(ui + du, upi, uppi) - G(ui - du, upi, uppi)) / (2.0 * du)
    dres_dup = (G(ui, upi + dp, uppi) - G(ui, upi - dp, uppi)) / (2.0 * dp)
    dres_dupp = (G(ui, upi, uppi + dq) - G(ui, upi, uppi - dq)) / (2.0 * dq)
    return _assemble_banded(dres_du, dres_dup, dres_dupp, len(u), h)


def _jacobian_analytic(u, spec, sigma, epsilon, rho, n):
    """Chain rule through the curvature-function gradient and the radial jet
    map; same tridiagonal banded layout as the finite-difference path."""
    h = rho[1] - rho[0]
    up, upp = _radial_derivatives(u, h)
    kappa, w, _ = _radial_kappa(u, rho, n)
    g = symfunc.grad_f(spec, kappa[:-1], check_cone=False)
    f_rad = g[:, 0]
    f_tan = np.sum(g[:, 1:], axis=1)

    ui, upi, uppi, rhoi, wi = u[:-1], up[:-1], upp[:-1], rho[:-1], w[:-1]
    dkr_du = uppi / wi**3
    dkr_dup = -3.0 * ui * uppi * upi / wi**5 - upi / wi**3
    dkr_dupp = ui / wi**3
    with np.errstate(divide="ignore", invalid="ignore"):
        dkt_du = np.where(rhoi > 0, upi / (rhoi * wi), uppi)
        dkt_dup = np.where(
            rhoi > 0,
            ui / (rhoi * wi) - ui * upi**2 / (rhoi * wi**3) - upi / wi**3,
            0.0,
        )
    dkt_dupp = np.where(rhoi > 0, 0.0, ui)
    dkr_du = np.where(rhoi > 0, dkr_du, uppi)
    dkr_dup = np.where(rhoi > 0, dkr_dup, 0.0)
    dkr_dupp = np.where(rhoi > 0, dkr_dupp, ui)

    dres_du = f_rad * dkr_du + f_tan * dkt_du
    dres_dup = f_rad * dkr_dup + f_tan * dkt_dup
    dres_dupp = f_rad * dkr_dupp + f_tan * dkt_dupp
    return _assemble_banded(dres_du, dres_dup, dres_dupp, len(u), h)


def newton_step(u, spec, sigma, epsilon, rho, config: SolverConfig):
    """One damped Newton step.  Backtracking keeps every trial iterate
    admissible and requires the residual sup-norm to not increase."""
    n = spec.n

    def resfun(v):
        return residual(v, spec, sigma, epsilon, rho, n)

    base = resfun(u)
    base_norm = float(np.max(np.abs(base)))
    if config.jacobian_mode == "analytic_Fij":
        ab = _jacobian_analytic(u, spec, sigma, epsilon, rho, n)
    else:
        ab = _jacobian_fd(u, spec, rho, n)
    try:
        delta = solve_banded((1, 1), ab, -base)
    except np.linalg.LinAlgError as exc:
        raise SingularJacobianError(str(exc)) from exc
    if not np.all(np.isfinite(delta)):
        raise SingularJacobianError("linear solve produced non-finite update")

    t = 1.0
    for _ in range(config.max_damping_steps + 1):
        trial = u + t * delta
        try:
            r = resfun(trial)
        except AdmissibilityLostError:
            t *= config.damping_factor
            continue
        norm = float(np.max(np.abs(r)))
        if norm < base_norm or norm <= config.newton_tol:
            return trial, float(np.max(np.abs(t * delta))), norm
        t *= config.damping_factor
    raise NonConvergenceError(
        f"backtracking exhausted {config.max_damping_steps} halvings at sigma={sigma}, eps={epsilon}"
    )


def _newton_solve(u, spec, sigma, epsilon, rho, config: SolverConfig):
    norm = float(np.max(np.abs(residual(u, spec, sigma, epsilon, rho, spec.n))))
    step_norm = None
    for it in range(config.max_newton_iters):
        if norm <= config.newton_tol:
            return u, it, norm
        try:
            u, step_norm, norm = newton_step(u, spec, sigma, epsilon, rho, config)
        except NonConvergenceError:
            # stagnation at the round-off floor of the 1/h^2 stencils: the
            # update has collapsed to rounding noise while the residual sits
            # just above the nominal tolerance -- accept rather than fail
            if (
                norm <= 1e3 * config.newton_tol
                and step_norm is not None
                and step_norm <= 1e-9 * (1.0 + float(np.max(np.abs(u))))
            ):
                return u, it, norm
            raise
    if norm <= config.newton_tol:
        return u, config.max_newton_iters, norm
    raise NonConvergenceError(
        f"Newton stalled at residual {norm:.3e} (sigma={sigma}, eps={epsilon})"
    )


def _march(u, spec, rho, config, values, solve_at, record=None):
    """Walk a continuation schedule with up-to-8-deep step bisection."""
    iters = []
    current = None
    for target in values:
        stack = [target]
        depth = 0
        while stack:
            nxt = stack[-1]
            try:
                u, it, _ = solve_at(u, nxt)
            except (NonConvergenceError, SingularJacobianError):
                if current is None or depth >= 8:
                    raise
                depth += 1
                stack.append(0.5 * (current + nxt))
                continue
            iters.append(it)
            current = nxt
            stack.pop()
            if record is not None and nxt == target:
                record(u, nxt)
    return u, iters


def _assemble_radial(u, spec, domain, sigma, epsilon, rho, report) -> GraphSolution:
    kappa, w, up = _radial_kappa(u, rho, spec.n)
    return GraphSolution(
        domain=domain, spec=spec, sigma=sigma, epsilon=epsilon, kind="radial",
        u=u, kappa=kappa, nu_vertical=1.0 / w, w=w, rho=rho, up=up, report=report,
    )


def radial_solution_from_profile(spec: CurvatureSpec, domain: Domain, sigma: float,
                                 grid_size: int, height_fn, epsilon: float = 0.0) -> GraphSolution:
    """Build a radial GraphSolution by sampling a closed-form profile (used
    for oracle solutions such as caps and horospheres)."""
    if domain.shape != hypgeom.SHAPE_BALL:
        raise UnsupportedSolutionError("profile sampling needs a ball domain")
    R = domain.params[0]
    rho = np.linspace(0.0, R, grid_size + 1)
    u = np.maximum(np.asarray(height_fn(rho), dtype=float), max(epsilon, 1e-300))
    return _assemble_radial(u, spec, domain, sigma, epsilon, rho, None)


def continuation_solve(config: SolverConfig) -> GraphSolution:
    """Solve to (sigma_target, min epsilon) by continuation in sigma then in
    the boundary height, Newton-iterating at every step."""
    cfg = config.resolved()
    if cfg.domain.shape == hypgeom.SHAPE_ELLIPSE:
        from . import grid as _grid

        return _grid.continuation_solve_grid(cfg)
    if cfg.domain.shape != hypgeom.SHAPE_BALL:
        raise UnsupportedSolutionError(f"solver does not support shape {cfg.domain.shape!r}")

    t0 = time.perf_counter()
    spec = cfg.spec
    R = cfg.domain.params[0]
    rho = np.linspace(0.0, R, cfg.grid_size + 1)
    eps0 = cfg.epsilon_schedule[0]
    cap = hypgeom.make_cap_with_boundary_height(R, cfg.sigma_schedule[0], eps0)
    u = cap.height(rho)
    u[-1] = eps0

    iters = []
    u, it = _march(
        u, spec, rho, cfg, cfg.sigma_schedule,
        lambda v, s: _newton_solve(v, spec, s, eps0, rho, cfg),
    )
    iters.extend(it)

    u0_by_eps = {}

    def record(v, e):
        u0_by_eps[float(e)] = float(v[0])

    u, it = _march(
        u, spec, rho, cfg, cfg.epsilon_schedule,
        lambda v, e: _newton_solve(v, spec, cfg.sigma_target, e, rho, cfg),
        record=record,
    )
    iters.extend(it)

    epsilon = cfg.epsilon_schedule[-1]
    final = residual(u, spec, cfg.sigma_target, epsilon, rho, spec.n)
    kappa, w, _ = _radial_kappa(u, rho, spec.n)
    report = SolveReport(
        converged=True,
        final_residual=float(np.max(np.abs(final))),
        newton_iterations=iters,
        kappa_max=float(np.max(kappa[:-1])),
        min_nu_vertical=float(np.min(1.0 / w[:-1])),
        admissibility_violations=0,
        wall_time=time.perf_counter() - t0,
        sigma=cfg.sigma_target,
        epsilon=epsilon,
        grid_size=cfg.grid_size,
        u0_by_epsilon=u0_by_eps,
    )
    return _assemble_radial(u, spec, cfg.domain, cfg.sigma_target, epsilon, rho, report)


def solve_with_epsilon_extrapolation(config: SolverConfig, eps_values=(4e-3, 2e-3, 1e-3)):
    """Solve once, marching the boundary height through the given values, and
    Richardson-extrapolate the center height to the zero-boundary limit using
    the empirically observed order."""
    eps_values = tuple(sorted(eps_values, reverse=True))
    sched = [e for e in default_epsilon_schedule(eps_values[0] * 1.5) if e > eps_values[0]]
    cfg = replace(config, epsilon_schedule=tuple(sched) + eps_values,
                  epsilon_min=eps_values[-1])
    sol = continuation_solve(cfg)
    u0 = [sol.report.u0_by_epsilon[float(e)] for e in eps_values]
    d1 = u0[0] - u0[1]
    d2 = u0[1] - u0[2]
    ratio = eps_values[0] / eps_values[1]
    if d2 == 0.0 or d1 / d2 <= 1.0:
        order = 1.0
    else:
        order = math.log(d1 / d2, ratio)
    factor = (eps_values[1] / eps_values[2]) ** order - 1.0
    extrapolated = u0[2] - d2 / factor
    return extrapolated, {"u0": dict(zip(map(float, eps_values), u0)), "order": order,
                          "solution": sol}


def sweep_sigma(config: SolverConfig, sigmas) -> list:
    """Warm-started sweep over sigma values (descending); one row per sigma,
    per-row failures recorded rather than raised."""
    sigmas = list(sigmas)
    if sorted(sigmas, reverse=True) != sigmas:
        raise ValueError("sigmas must be sorted descending")
    rows = []
    warm = None
    for s in sigmas:
        cfg = replace(config, sigma_target=s, sigma_schedule=None)
        cfg = cfg.resolved()
        row = {"sigma": s, "below_sigma0": s < SIGMA0_INTERVAL[0]}
        try:
            if warm is None:
                sol = continuation_solve(cfg)
            else:
                rho = warm.rho
                u, its = _march(
                    warm.u.copy(), cfg.spec, rho, cfg, (s,),
                    lambda v, sv: _newton_solve(v, cfg.spec, sv, warm.epsilon, rho, cfg),
                )
                final = residual(u, cfg.spec, s, warm.epsilon, rho, cfg.spec.n)
                kappa, w, _ = _radial_kappa(u, rho, cfg.spec.n)
                report = SolveReport(
                    converged=True, final_residual=float(np.max(np.abs(final))),
                    newton_iterations=its, kappa_max=float(np.max(kappa[:-1])),
                    min_nu_vertical=float(np.min(1.0 / w[:-1])),
                    admissibility_violations=0, wall_time=0.0, sigma=s,
                    epsilon=warm.epsilon, grid_size=cfg.grid_size,
                )
                sol = _assemble_radial(u, cfg.spec, cfg.domain, s, warm.epsilon, rho, report)
            warm = sol
            row.update(
                status="ok", converged=True, u0=sol.u0,
                kappa_max=sol.report.kappa_max,
                min_nu_vertical=sol.report.min_nu_vertical,
                iterations=int(sum(sol.report.newton_iterations)),
            )
        except (NonConvergenceError, AdmissibilityLostError, SingularJacobianError) as exc:
            row.update(status=f"failed: {type(exc).__name__}", converged=False,
                       u0=float("nan"), kappa_max=float("nan"),
                       min_nu_vertical=float("nan"), iterations=0)
        rows.append(row)
    return rows


def refine_study(config: SolverConfig, levels: int) -> dict:
    """Solve at grid sizes N, 2N, ...; report the empirical order of the
    center height and the drift of the largest curvature between levels."""
    if levels < 2:
        raise ValueError("refine_study needs at least 2 levels")
    rows = []
    for j in range(levels):
        cfg = replace(config, grid_size=config.grid_size * 2**j)
        row = {"grid_size": cfg.grid_size}
        try:
            sol = continuation_solve(cfg)
            row.update(converged=True, u0=sol.u0, kappa_max=sol.report.kappa_max,
                       final_residual=sol.report.final_residual)
        except (NonConvergenceError, AdmissibilityLostError, SingularJacobianError) as exc:
            row.update(converged=False, status=f"failed: {type(exc).__name__}",
                       u0=float("nan"), kappa_max=float("nan"))
        rows.append(row)
    out = {"rows": rows}
    good = [r for r in rows if r.get("converged")]
    if len(good) >= 3:
        d1 = good[-3]["u0"] - good[-2]["u0"]
        d2 = good[-2]["u0"] - good[-1]["u0"]
        out["observed_order"] = math.log2(abs(d1 / d2)) if d2 != 0.0 else float("inf")
    if len(good) >= 2:
        a, b = good[-2]["kappa_max"], good[-1]["kappa_max"]
        out["kappa_max_drift"] = abs(b - a) / max(abs(a), 1e-300)
    return out
