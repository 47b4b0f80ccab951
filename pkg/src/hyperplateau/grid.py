"""Tensor-grid solver path for ellipse domains (n = 2).

The ellipse is embedded in its bounding box; nodes strictly inside the
ellipse are unknowns of the curvature equation, every other node carries the
Dirichlet boundary height.  The nine-point linearization is assembled from
per-node partials of f(kappa[jet]) taken by centered differences in the local
jet variables -- the same device as the radial path, and for the same reason:
differencing the assembled residual folds probe truncation error through the
stiff stencil map.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.linalg import splu

from . import hypgeom, symfunc
from .errors import (
    AdmissibilityLostError,
    NonConvergenceError,
    SingularJacobianError,
)


@dataclass(frozen=True)
class GridLayout:
    xs: np.ndarray
    ys: np.ndarray
    hx: float
    hy: float
    inside: np.ndarray  # boolean (nx, ny); True = interior unknown
    a_axis: float
    b_axis: float

    @property
    def shape(self):
        return self.inside.shape


def make_layout(domain: hypgeom.Domain, grid_size: int) -> GridLayout:
    a, b = domain.params
    nx = grid_size + 1
    ny = max(int(round(grid_size * b / a)), 8) + 1
    xs = np.linspace(-a, a, nx)
    ys = np.linspace(-b, b, ny)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    level = (X / a) ** 2 + (Y / b) ** 2
    inside = level < 1.0
    # interior unknowns need the full nine-point neighborhood on the grid
    inside[0, :] = inside[-1, :] = False
    inside[:, 0] = inside[:, -1] = False
    return GridLayout(xs=xs, ys=ys, hx=xs[1] - xs[0], hy=ys[1] - ys[0],
                      inside=inside, a_axis=a, b_axis=b)


def _jet_fields(U: np.ndarray, layout: GridLayout):
    """Centered first/second differences of the full node array; values on
    the outermost frame are never used (the frame is Dirichlet)."""
    hx, hy = layout.hx, layout.hy
    Ux = np.zeros_like(U)
    Uy = np.zeros_like(U)
    Uxx = np.zeros_like(U)
    Uyy = np.zeros_like(U)
    Uxy = np.zeros_like(U)
    Ux[1:-1, :] = (U[2:, :] - U[:-2, :]) / (2.0 * hx)
    Uy[:, 1:-1] = (U[:, 2:] - U[:, :-2]) / (2.0 * hy)
    Uxx[1:-1, :] = (U[2:, :] - 2.0 * U[1:-1, :] + U[:-2, :]) / hx**2
    Uyy[:, 1:-1] = (U[:, 2:] - 2.0 * U[:, 1:-1] + U[:, :-2]) / hy**2
    Uxy[1:-1, 1:-1] = (
        U[2:, 2:] - U[2:, :-2] - U[:-2, 2:] + U[:-2, :-2]
    ) / (4.0 * hx * hy)
    return Ux, Uy, Uxx, Uyy, Uxy


def principal_curvatures_2d(u, ux, uy, uxx, uyy, uxy):
    """Vectorized hyperbolic principal curvatures of a 2-D graph; closed-form
    eigenvalues of the symmetrized shape operator.  Returns (kappa, w) with
    kappa[..., 0] >= kappa[..., 1]."""
    w = np.sqrt(1.0 + ux**2 + uy**2)
    c = 1.0 / (w * (1.0 + w))
    # gamma = I - c * Du Du^T
    g11 = 1.0 - c * ux * ux
    g12 = -c * ux * uy
    g22 = 1.0 - c * uy * uy
    # M = gamma D2u gamma (symmetric)
    t11 = g11 * uxx + g12 * uxy
    t12 = g11 * uxy + g12 * uyy
    t21 = g12 * uxx + g22 * uxy
    t22 = g12 * uxy + g22 * uyy
    m11 = t11 * g11 + t12 * g12
    m12 = t11 * g12 + t12 * g22
    m22 = t21 * g12 + t22 * g22
    a11 = u * m11 / w + 1.0 / w
    a12 = u * m12 / w
    a22 = u * m22 / w + 1.0 / w
    mean = 0.5 * (a11 + a22)
    rad = np.sqrt((0.5 * (a11 - a22)) ** 2 + a12**2)
    return np.stack([mean + rad, mean - rad], axis=-1), w


def residual_grid(U: np.ndarray, spec: symfunc.CurvatureSpec, sigma: float,
                  epsilon: float, layout: GridLayout) -> np.ndarray:
    """Flat residual over all nodes: f(kappa) - sigma at interior unknowns,
    u - epsilon on Dirichlet nodes."""
    ins = layout.inside
    bad = np.flatnonzero((U[ins] <= 0.0))
    if bad.size:
        raise AdmissibilityLostError(bad, "non-positive height at interior nodes")
    Ux, Uy, Uxx, Uyy, Uxy = _jet_fields(U, layout)
    kappa, _ = principal_curvatures_2d(
        U[ins], Ux[ins], Uy[ins], Uxx[ins], Uyy[ins], Uxy[ins]
    )
    ok = np.atleast_1d(symfunc.cone_contains(kappa, spec.cone_index))
    if not ok.all():
        raise AdmissibilityLostError(np.flatnonzero(~ok))
    res = U - epsilon
    res[ins] = symfunc.eval_f(spec, kappa, check_cone=False) - sigma
    return res.ravel()


def _jacobian_grid(U: np.ndarray, spec: symfunc.CurvatureSpec,
                   layout: GridLayout, step: float = 1e-6) -> csr_matrix:
    """Sparse nine-point Jacobian: centered differences of the pointwise map
    (u, ux, uy, uxx, uyy, uxy) -> f(kappa), assembled with exact stencil
    weights; Dirichlet rows are identity."""
    ins = layout.inside
    hx, hy = layout.hx, layout.hy
    Ux, Uy, Uxx, Uyy, Uxy = _jet_fields(U, layout)
    jet = [U[ins], Ux[ins], Uy[ins], Uxx[ins], Uyy[ins], Uxy[ins]]

    def G(vals):
        kappa, _ = principal_curvatures_2d(*vals)
        return symfunc.eval_f(spec, kappa, check_cone=False)

    parts = []
    for j in range(6):
        d = step * (1.0 + np.abs(jet[j]))
        hi = list(jet)
        lo = list(jet)
        hi[j] = jet[j] + d
        lo[j] = jet[j] - d
        parts.append((G(hi) - G(lo)) / (2.0 * d))
    c_u, c_x, c_y, c_xx, c_yy, c_xy = parts

    nx, ny = layout.shape
    flat = np.arange(nx * ny).reshape(nx, ny)
    ii, jj = np.nonzero(ins)
    center = flat[ii, jj]
    rows, cols, vals = [], [], []

    def add(di, dj, coeff):
        rows.append(center)
        cols.append(flat[ii + di, jj + dj])
        vals.append(coeff)

    add(0, 0, c_u - 2.0 * c_xx / hx**2 - 2.0 * c_yy / hy**2)
    add(1, 0, c_x / (2.0 * hx) + c_xx / hx**2)
    add(-1, 0, -c_x / (2.0 * hx) + c_xx / hx**2)
    add(0, 1, c_y / (2.0 * hy) + c_yy / hy**2)
    add(0, -1, -c_y / (2.0 * hy) + c_yy / hy**2)
    cross = c_xy / (4.0 * hx * hy)
    add(1, 1, cross)
    add(-1, -1, cross)
    add(1, -1, -cross)
    add(-1, 1, -cross)

    dirichlet = flat[~ins]
    rows.append(dirichlet)
    cols.append(dirichlet)
    vals.append(np.ones(dirichlet.size))

    m = nx * ny
    return csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(m, m),
    )


def _newton_solve_grid(U, spec, sigma, epsilon, layout, cfg):
    norm = float(np.max(np.abs(residual_grid(U, spec, sigma, epsilon, layout))))
    for _it in range(cfg.max_newton_iters):
        if norm <= cfg.newton_tol:
            return U, _it, norm
        base = residual_grid(U, spec, sigma, epsilon, layout)
        J = _jacobian_grid(U, spec, layout)
        try:
            delta = splu(J.tocsc()).solve(-base)
        except RuntimeError as exc:
            raise SingularJacobianError(str(exc)) from exc
        if not np.all(np.isfinite(delta)):
            raise SingularJacobianError("linear solve produced non-finite update")
        delta = delta.reshape(layout.shape)
        t = 1.0
        accepted = False
        for _ in range(cfg.max_damping_steps + 1):
            trial = U + t * delta
            try:
                r = residual_grid(trial, spec, sigma, epsilon, layout)
            except AdmissibilityLostError:
                t *= cfg.damping_factor
                continue
            new_norm = float(np.max(np.abs(r)))
            if new_norm < norm or new_norm <= cfg.newton_tol:
                U, norm = trial, new_norm
                accepted = True
                break
            t *= cfg.damping_factor
        if not accepted:
            raise NonConvergenceError(
                f"backtracking exhausted {cfg.max_damping_steps} halvings "
                f"(grid, sigma={sigma}, eps={epsilon})"
            )
    if norm <= cfg.newton_tol:
        return U, cfg.max_newton_iters, norm
    raise NonConvergenceError(
        f"Newton stalled at residual {norm:.3e} (grid, sigma={sigma}, eps={epsilon})"
    )


def _initial_height(layout: GridLayout, sigma: float, epsilon: float) -> np.ndarray:
    """Cap of the inscribed ball, carried along the elliptical level sets so
    it meets the boundary height on the rim."""
    b = layout.b_axis
    cap = hypgeom.make_cap_with_boundary_height(b, sigma, epsilon)
    X, Y = np.meshgrid(layout.xs, layout.ys, indexing="ij")
    s = np.sqrt((X / layout.a_axis) ** 2 + (Y / b) ** 2)
    U = cap.height(np.minimum(s, 1.0) * b)
    U[~layout.inside] = epsilon
    return U


def _assemble_grid_solution(U, spec, domain, sigma, epsilon, layout, report):
    from .solver import GraphSolution  # local import to avoid a cycle

    ins = layout.inside
    Ux, Uy, Uxx, Uyy, Uxy = _jet_fields(U, layout)
    kappa, w = principal_curvatures_2d(
        U[ins], Ux[ins], Uy[ins], Uxx[ins], Uyy[ins], Uxy[ins]
    )
    return GraphSolution(
        domain=domain, spec=spec, sigma=sigma, epsilon=epsilon, kind="grid",
        u=U[ins].copy(), kappa=kappa, nu_vertical=1.0 / w, w=w, report=report,
        xs=layout.xs, ys=layout.ys, mask=ins, u2d=U,
    )


def continuation_solve_grid(cfg):
    """Grid analogue of the radial continuation: sigma marches down first at
    the initial boundary height, then the boundary height shrinks."""
    from .solver import SolveReport, _march  # local import to avoid a cycle

    t0 = time.perf_counter()
    spec = cfg.spec
    layout = make_layout(cfg.domain, cfg.grid_size)
    eps0 = cfg.epsilon_schedule[0]
    U = _initial_height(layout, cfg.sigma_schedule[0], eps0)

    iters = []
    U, it = _march(
        U, spec, None, cfg, cfg.sigma_schedule,
        lambda v, s: _newton_solve_grid(v, spec, s, eps0, layout, cfg),
    )
    iters.extend(it)

    u0_by_eps = {}

    def record(v, e):
        u0_by_eps[float(e)] = float(np.max(v[layout.inside]))

    U, it = _march(
        U, spec, None, cfg, cfg.epsilon_schedule,
        lambda v, e: _newton_solve_grid(v, spec, cfg.sigma_target, e, layout, cfg),
        record=record,
    )
    iters.extend(it)

    epsilon = cfg.epsilon_schedule[-1]
    final = residual_grid(U, spec, cfg.sigma_target, epsilon, layout)
    ins = layout.inside
    Ux, Uy, Uxx, Uyy, Uxy = _jet_fields(U, layout)
    kappa, w = principal_curvatures_2d(
        U[ins], Ux[ins], Uy[ins], Uxx[ins], Uyy[ins], Uxy[ins]
    )
    report = SolveReport(
        converged=True,
        final_residual=float(np.max(np.abs(final))),
        newton_iterations=iters,
        kappa_max=float(np.max(kappa)),
        min_nu_vertical=float(np.min(1.0 / w)),
        admissibility_violations=0,
        wall_time=time.perf_counter() - t0,
        sigma=cfg.sigma_target,
        epsilon=epsilon,
        grid_size=cfg.grid_size,
        u0_by_epsilon=u0_by_eps,
    )
    return _assemble_grid_solution(U, spec, cfg.domain, cfg.sigma_target,
                                   epsilon, layout, report)
