"""Normalized elementary symmetric polynomials, Garding cones and the three
curvature-function families H_k/H_{k-1}, (H_k/H_l)^{1/(k-l)}, H_k^{1/k}.

All point-wise operations are vectorized over a leading batch axis: a
"kappa" argument may be shaped (n,) or (..., n).  Values, gradients and
Hessians are analytic (no finite differences anywhere in this module).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AdmissibilityError

CONSECUTIVE_QUOTIENT = "consecutive_quotient"
GENERAL_QUOTIENT = "general_quotient"
KTH_ROOT = "kth_root"

_FAMILIES = (CONSECUTIVE_QUOTIENT, GENERAL_QUOTIENT, KTH_ROOT)


@dataclass(frozen=True)
class CurvatureSpec:
    """One member of the three curvature-function families.

    Every family is of the form f = (H_k / H_l)^(1/(k-l)) with H_0 = 1:
    the consecutive quotient has l = k-1, the k-th root has l = 0.
    ``cone_index`` is the Garding cone K_j used for admissibility checks;
    direct construction is unvalidated on purpose (negative controls), use
    the classmethods for checked construction.
    """

    family: str
    n: int
    k: int
    l: int
    cone_index: int

    @classmethod
    def consecutive_quotient(cls, k: int, n: int) -> "CurvatureSpec":
        if not (2 <= n and 1 <= k <= n):
            raise ValueError(f"consecutive quotient needs 1 <= k <= n, n >= 2; got k={k}, n={n}")
        return cls(CONSECUTIVE_QUOTIENT, n, k, k - 1, k)

    @classmethod
    def general_quotient(cls, k: int, l: int, n: int) -> "CurvatureSpec":
        if not (2 <= n and 1 <= l < k <= n):
            raise ValueError(f"general quotient needs 1 <= l < k <= n, n >= 2; got k={k}, l={l}, n={n}")
        return cls(GENERAL_QUOTIENT, n, k, l, min(k + 1, n))

    @classmethod
    def kth_root(cls, k: int, n: int, cone_index: int | None = None) -> "CurvatureSpec":
        if not (2 <= n and 1 <= k <= n):
            raise ValueError(f"k-th root needs 1 <= k <= n, n >= 2; got k={k}, n={n}")
        if cone_index is None:
            cone_index = min(k + 1, n)
        if cone_index not in (min(k + 1, n), n):
            raise ValueError(f"k-th root admissibility cone must be K_{min(k + 1, n)} or K_{n}")
        return cls(KTH_ROOT, n, k, 0, cone_index)

    @property
    def power(self) -> float:
        """Outer exponent 1/(k-l)."""
        return 1.0 / (self.k - self.l)

    @property
    def required_cone(self) -> int:
        """Smallest cone index in which the family is admissible."""
        if self.family == CONSECUTIVE_QUOTIENT:
            return self.k
        return min(self.k + 1, self.n)

    @property
    def vanishing_cone(self) -> int:
        """Cone K_k on whose boundary f vanishes (H_k -> 0)."""
        return self.k

    def describe(self) -> str:
        if self.family == CONSECUTIVE_QUOTIENT:
            name = f"H_{self.k}/H_{self.k - 1}"
        elif self.family == KTH_ROOT:
            name = f"H_{self.k}^(1/{self.k})"
        else:
            name = f"(H_{self.k}/H_{self.l})^(1/{self.k - self.l})"
        return f"{name} on K_{self.cone_index}, n={self.n}"


def _as_kappa(kappa, n: int | None = None) -> np.ndarray:
    arr = np.asarray(kappa, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] < 2:
        raise ValueError("kappa must have at least 2 entries along the last axis")
    if not np.all(np.isfinite(arr)):
        raise ValueError("kappa entries must be finite")
    if n is not None and arr.shape[-1] != n:
        raise ValueError(f"kappa has {arr.shape[-1]} entries, spec expects n={n}")
    return arr


def esym_table(kappa) -> np.ndarray:
    """All unnormalized elementary symmetric values e_0..e_n, shape (..., n+1).

    Single-pass prefix recurrence; no subset enumeration.
    """
    arr = _as_kappa(kappa)
    n = arr.shape[-1]
    e = np.zeros(arr.shape[:-1] + (n + 1,))
    e[..., 0] = 1.0
    for i in range(n):
        top = min(i + 1, n)
        for j in range(top, 0, -1):
            e[..., j] += arr[..., i] * e[..., j - 1]
    return e


def _esym_drop1(arr: np.ndarray) -> np.ndarray:
    """D[..., i, j] = e_j(kappa with entry i removed), j = 0..n-1."""
    n = arr.shape[-1]
    out = np.empty(arr.shape[:-1] + (n, n))
    for i in range(n):
        rest = np.delete(arr, i, axis=-1)
        out[..., i, :] = esym_table(rest)[..., :n] if n > 2 else _table_of(rest, n - 1)
    return out


def _table_of(rest: np.ndarray, m: int) -> np.ndarray:
    # esym_table requires >= 2 entries; handle the 1-entry tail directly.
    e = np.zeros(rest.shape[:-1] + (m + 1,))
    e[..., 0] = 1.0
    if m >= 1:
        e[..., 1] = rest[..., 0]
    return e


def _esym_drop2(arr: np.ndarray) -> np.ndarray:
    """D[..., i, j, m] = e_m(kappa with entries i and j removed), m = 0..n-2."""
    n = arr.shape[-1]
    out = np.zeros(arr.shape[:-1] + (n, n, n - 1))
    for i in range(n):
        for j in range(i + 1, n):
            rest = np.delete(arr, (i, j), axis=-1)
            if n - 2 >= 2:
                tab = esym_table(rest)[..., : n - 1]
            else:
                tab = _table_of(rest, n - 2)
            out[..., i, j, :] = tab
            out[..., j, i, :] = tab
    return out


def elementary_symmetric(kappa, k: int):
    """Unnormalized e_k(kappa); e_0 = 1."""
    arr = _as_kappa(kappa)
    n = arr.shape[-1]
    if not 0 <= k <= n:
        raise ValueError(f"order k={k} out of range 0..{n}")
    out = esym_table(arr)[..., k]
    return float(out) if out.ndim == 0 else out


def normalized_Hk(kappa, k: int):
    """H_k = e_k / binom(n, k), so H_k(1,...,1) = 1."""
    arr = _as_kappa(kappa)
    n = arr.shape[-1]
    if not 0 <= k <= n:
        raise ValueError(f"order k={k} out of range 0..{n}")
    out = esym_table(arr)[..., k] / math.comb(n, k)
    return float(out) if out.ndim == 0 else out


def _binoms(n: int) -> np.ndarray:
    return np.array([math.comb(n, j) for j in range(n + 1)], dtype=float)


def cone_contains(kappa, k: int):
    """Strict membership in the Garding cone K_k = {H_j > 0, 1 <= j <= k}."""
    arr = _as_kappa(kappa)
    n = arr.shape[-1]
    if not 1 <= k <= n:
        raise ValueError(f"cone index k={k} out of range 1..{n}")
    e = esym_table(arr)
    ok = np.all(e[..., 1 : k + 1] > 0.0, axis=-1)
    return bool(ok) if ok.ndim == 0 else ok


def _check_cone(spec: CurvatureSpec, arr: np.ndarray) -> None:
    ok = cone_contains(arr, spec.cone_index)
    if not np.all(ok):
        bad = int(np.size(ok) - np.count_nonzero(ok))
        raise AdmissibilityError(
            f"{bad} point(s) outside K_{spec.cone_index} for {spec.describe()}"
        )


def _quotient_terms(spec: CurvatureSpec, arr: np.ndarray):
    """H_k, H_l and their first-derivative tables for the batch."""
    n = spec.n
    binom = _binoms(n)
    e = esym_table(arr)
    Hk = e[..., spec.k] / binom[spec.k]
    Hl = e[..., spec.l] / binom[spec.l]
    d1 = _esym_drop1(arr)
    dHk = d1[..., spec.k - 1] / binom[spec.k]
    if spec.l >= 1:
        dHl = d1[..., spec.l - 1] / binom[spec.l]
    else:
        dHl = np.zeros_like(dHk)
    return Hk, Hl, dHk, dHl


def eval_f(spec: CurvatureSpec, kappa, check_cone: bool = True):
    """Value of the curvature function; degree-1 homogeneous, f(1,...,1) = 1."""
    arr = _as_kappa(kappa, spec.n)
    if check_cone:
        _check_cone(spec, arr)
    binom = _binoms(spec.n)
    e = esym_table(arr)
    g = (e[..., spec.k] / binom[spec.k]) / (e[..., spec.l] / binom[spec.l])
    p = spec.power
    with np.errstate(invalid="ignore"):
        out = g if p == 1.0 else np.where(g > 0, np.abs(g) ** p, np.nan)
    return float(out) if np.ndim(out) == 0 else out


def grad_f(spec: CurvatureSpec, kappa, check_cone: bool = True):
    """Analytic gradient (f_1, ..., f_n); strictly positive on the cone."""
    arr = _as_kappa(kappa, spec.n)
    if check_cone:
        _check_cone(spec, arr)
    Hk, Hl, dHk, dHl = _quotient_terms(spec, arr)
    g = Hk / Hl
    gi = (dHk * Hl[..., None] - Hk[..., None] * dHl) / (Hl**2)[..., None]
    p = spec.power
    if p == 1.0:
        return gi
    with np.errstate(invalid="ignore"):
        scale = p * np.abs(g) ** (p - 1.0)
    return scale[..., None] * gi


def hessian_f(spec: CurvatureSpec, kappa, check_cone: bool = True):
    """Analytic Hessian (..., n, n); negative semidefinite on the cone with
    the radial direction kappa as a null direction."""
    arr = _as_kappa(kappa, spec.n)
    if check_cone:
        _check_cone(spec, arr)
    n, k, l = spec.n, spec.k, spec.l
    binom = _binoms(n)
    Hk, Hl, dHk, dHl = _quotient_terms(spec, arr)
    d2 = _esym_drop2(arr)
    eye = np.eye(n, dtype=bool)

    def second(order: int) -> np.ndarray:
        if order < 2:
            return np.zeros(arr.shape[:-1] + (n, n))
        m = d2[..., order - 2] / binom[order]
        return np.where(eye, 0.0, m)

    d2Hk = second(k)
    d2Hl = second(l)
    Hl_ = Hl[..., None, None]
    Hk_ = Hk[..., None, None]
    outer_kl = np.einsum("...i,...j->...ij", dHk, dHl)
    outer_ll = np.einsum("...i,...j->...ij", dHl, dHl)
    gij = (
        d2Hk / Hl_
        - (outer_kl + np.swapaxes(outer_kl, -1, -2)) / Hl_**2
        - Hk_ * d2Hl / Hl_**2
        + 2.0 * Hk_ * outer_ll / Hl_**3
    )
    g = Hk / Hl
    gi = (dHk * Hl[..., None] - Hk[..., None] * dHl) / (Hl**2)[..., None]
    p = spec.power
    if p == 1.0:
        return gij
    outer_gg = np.einsum("...i,...j->...ij", gi, gi)
    g_ = np.abs(g)[..., None, None]
    return p * (p - 1.0) * g_ ** (p - 2.0) * outer_gg + p * g_ ** (p - 1.0) * gij


def monotone_difference_quotients(spec: CurvatureSpec, kappa) -> np.ndarray:
    """Matrix of (f_i - f_j)/(kappa_i - kappa_j), i != j; diagonal is zero.

    Near-equal pairs use the analytic limit f_ii - f_ij so the matrix stays
    continuous across repeated principal curvatures.
    """
    arr = _as_kappa(kappa, spec.n)
    if arr.ndim != 1:
        raise ValueError("monotone_difference_quotients takes a single point")
    g = grad_f(spec, arr)
    h = hessian_f(spec, arr)
    n = spec.n
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            dk = arr[i] - arr[j]
            if abs(dk) < 1e-8 * (1.0 + abs(arr[i])):
                out[i, j] = h[i, i] - h[i, j]
            else:
                out[i, j] = (g[i] - g[j]) / dk
    return out


def F_value_and_Fij(A, spec: CurvatureSpec):
    """Spectral extension F(A) = f(eigenvalues) and its gradient matrix F^{ij}.

    F^{ij} = sum_m f_m v_m v_m^T in the eigenbasis; well defined for repeated
    eigenvalues.
    """
    M = np.asarray(A, dtype=float)
    if M.shape != (spec.n, spec.n):
        raise ValueError(f"expected {spec.n}x{spec.n} matrix, got {M.shape}")
    if not np.allclose(M, M.T, rtol=0.0, atol=1e-10 * (1.0 + np.abs(M).max())):
        raise ValueError("matrix must be symmetric")
    lam, V = np.linalg.eigh(0.5 * (M + M.T))
    F = eval_f(spec, lam)
    g = grad_f(spec, lam)
    Fij = (V * g) @ V.T
    return F, 0.5 * (Fij + Fij.T)


def second_contraction(kappa, B, spec: CurvatureSpec) -> float:
    """Second directional derivative d^2/dt^2 F(diag(kappa) + tB) at t = 0:
    f_ij B_ii B_jj plus the off-diagonal difference-quotient sum."""
    arr = _as_kappa(kappa, spec.n)
    Bm = np.asarray(B, dtype=float)
    if Bm.shape != (spec.n, spec.n) or not np.allclose(Bm, Bm.T, atol=1e-12 * (1 + np.abs(Bm).max())):
        raise ValueError("B must be a symmetric n x n matrix")
    h = hessian_f(spec, arr)
    q = monotone_difference_quotients(spec, arr)
    diag = np.diag(Bm)
    val = float(diag @ h @ diag)
    off = ~np.eye(spec.n, dtype=bool)
    val += float(np.sum(q[off] * (Bm**2)[off]))
    return val


# ---------------------------------------------------------------------------
# Cone sampling


def _draw_in_cone(rng, n: int, cone_index: int, count: int, box: float) -> np.ndarray:
    got = []
    have = 0
    for _ in range(10_000):
        cand = rng.uniform(-box, box, size=(max(4 * count, 256), n))
        keep = cand[cone_contains(cand, cone_index)]
        if keep.size:
            got.append(keep)
            have += keep.shape[0]
        if have >= count:
            break
    else:
        raise RuntimeError(f"cone sampler failed to fill K_{cone_index} in R^{n}")
    return np.concatenate(got, axis=0)[:count]


def _exterior_points(rng, m: int, n: int, cone_index: int, box: float) -> np.ndarray:
    out = np.empty((m, n))
    need = np.ones(m, dtype=bool)
    for _ in range(10_000):
        if not need.any():
            return out
        cand = rng.uniform(-box, box, size=(int(need.sum()), n))
        ext = ~np.atleast_1d(cone_contains(cand, cone_index))
        idx = np.flatnonzero(need)[ext]
        out[idx] = cand[ext]
        need[idx] = False
    raise RuntimeError("could not find exterior directions")


def boundary_points(rng, inside: np.ndarray, cone_index: int, box: float = 3.0, iters: int = 60) -> np.ndarray:
    """For each interior point, a boundary point of K_{cone_index} found by
    bisection along a segment toward a random exterior point."""
    inside = np.atleast_2d(np.asarray(inside, dtype=float))
    m, n = inside.shape
    lo = inside.copy()
    hi = _exterior_points(rng, m, n, cone_index, box)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        ok = np.atleast_1d(cone_contains(mid, cone_index))
        lo[ok] = mid[ok]
        hi[~ok] = mid[~ok]
    return 0.5 * (lo + hi)


def push_toward_boundary(samples: np.ndarray, cone_index: int, rng, t, box: float = 3.0) -> np.ndarray:
    """Move each sample toward a boundary point of K_{cone_index}: result is
    a + t(b - a) with b on the boundary; t close to 1 means nearly degenerate."""
    t = np.broadcast_to(np.asarray(t, dtype=float), (samples.shape[0],))
    b = boundary_points(rng, samples, cone_index, box)
    cand = samples + t[:, None] * (b - samples)
    ok = np.atleast_1d(cone_contains(cand, cone_index))
    return np.where(ok[:, None], cand, samples)


def sample_cone(
    n: int,
    cone_index: int,
    count: int,
    seed: int,
    box: float = 3.0,
    boundary_fraction: float = 0.2,
) -> np.ndarray:
    """Rejection sampling of K_{cone_index} from the box [-box, box]^n, with a
    fraction of points scaled toward sampled boundary points for coverage of
    the near-degenerate region.  Deterministic given seed."""
    rng = np.random.default_rng(seed)
    samples = _draw_in_cone(rng, n, cone_index, count, box)
    m = int(boundary_fraction * count)
    if m:
        idx = rng.choice(count, size=m, replace=False)
        t = rng.uniform(0.9, 0.999, size=m)
        samples[idx] = push_toward_boundary(samples[idx], cone_index, rng, t, box)
    return samples


# ---------------------------------------------------------------------------
# Structural conditions (2.1)-(2.6) and the partial-derivative assumptions


@dataclass
class ConditionRecord:
    condition: str
    samples: int
    worst_margin: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "samples": self.samples,
            "worst_margin": self.worst_margin,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass
class ConditionReport:
    spec: CurvatureSpec
    seed: int
    sample_count: int
    cone_violations: int
    records: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.cone_violations == 0 and all(r.passed for r in self.records)

    def record(self, condition: str) -> ConditionRecord:
        for r in self.records:
            if r.condition == condition:
                return r
        raise KeyError(condition)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.describe(),
            "seed": self.seed,
            "sample_count": self.sample_count,
            "cone_violations": self.cone_violations,
            "passed": self.passed,
            "records": [r.to_dict() for r in self.records],
        }

    def to_text(self) -> str:
        lines = [f"condition report: {self.spec.describe()}  seed={self.seed}"]
        if self.cone_violations:
            lines.append(f"  cone violations: {self.cone_violations}  FAIL")
        for r in self.records:
            status = "pass" if r.passed else "FAIL"
            lines.append(
                f"  ({r.condition})  samples={r.samples}  worst_margin={r.worst_margin:.3e}"
                f"  tol={r.tolerance:.1e}  {status}"
            )
        lines.append(f"  overall: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def check_conditions(spec: CurvatureSpec, sample_count: int, seed: int) -> ConditionReport:
    """Sampled verification of ellipticity, concavity, boundary vanishing,
    normalization, homogeneity and the large-entry lower bound, plus the
    partial-derivative assumption relevant to the family.  Failures are
    recorded, never raised."""
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    n = spec.n
    samples = sample_cone(n, spec.cone_index, sample_count, seed)
    ok = np.atleast_1d(cone_contains(samples, spec.required_cone))
    violations = int(np.size(ok) - np.count_nonzero(ok))
    valid = samples[ok]
    report = ConditionReport(spec, seed, sample_count, violations)

    if valid.shape[0] == 0:
        report.records.append(ConditionRecord("2.1", 0, float("-inf"), 1e-9, False))
        return report

    f = eval_f(spec, valid, check_cone=False)
    g = grad_f(spec, valid, check_cone=False)
    h = hessian_f(spec, valid, check_cone=False)
    m = valid.shape[0]

    # (2.1) ellipticity: every partial derivative strictly positive
    margin = float(np.min(g))
    report.records.append(ConditionRecord("2.1", m, margin, 1e-9, margin >= -1e-9))

    # (2.2) concavity: Hessian eigenvalues below tolerance
    eigs = np.linalg.eigvalsh(h)
    margin = float(-np.max(eigs))
    report.records.append(ConditionRecord("2.2", m, margin, 1e-8, margin >= -1e-8))

    # (2.3) positivity inside, decay to zero along rays to the boundary of
    # the vanishing cone K_k (where H_k -> 0).  Boundary targets are kept to
    # the generic stratum H_k = 0, H_j > 0 for j < k; on lower strata the
    # quotient families need not extend continuously by zero.
    margin = float(np.min(f))
    pool = valid[: min(4 * 32, m)]
    b = boundary_points(rng, pool, spec.vanishing_cone)
    if spec.k > 1:
        e_b = esym_table(b)
        generic = np.all(e_b[:, 1 : spec.k] > 1e-2, axis=-1)
    else:
        generic = np.ones(b.shape[0], dtype=bool)
    b, a = b[generic][:32], pool[generic][:32]
    if a.shape[0]:
        fa = np.atleast_1d(eval_f(spec, a, check_cone=False))
        dists = (1e-3, 1e-6, 1e-9, 1e-12)
        vals = np.stack(
            [np.atleast_1d(eval_f(spec, b + d * (a - b), check_cone=False)) for d in dists]
        )
        if np.any(np.isnan(vals)):
            margin = -1.0
        else:
            # decay to (near) zero, monotone over the asymptotic distances
            margin = min(margin, float(np.min(vals[1:-1] - vals[2:] + 1e-12)))
            margin = min(margin, float(np.min(0.01 * (1.0 + fa) - vals[-1])))
    report.records.append(ConditionRecord("2.3", m, margin, 1e-9, margin >= -1e-9))

    # (2.4) normalization f(1,...,1) = 1
    err = abs(eval_f(spec, np.ones(n), check_cone=False) - 1.0)
    report.records.append(ConditionRecord("2.4", 1, -err, 1e-9, err <= 1e-9))

    # (2.5) degree-1 homogeneity
    t = rng.uniform(0.1, 10.0, size=m)
    ft = eval_f(spec, valid * t[:, None], check_cone=False)
    rel = np.abs(ft - t * f) / (1.0 + np.abs(t * f))
    margin = float(-np.max(rel))
    report.records.append(ConditionRecord("2.5", m, margin, 1e-9, margin >= -1e-9))

    # (2.6) uniform lower bound after a large last entry, near (1,...,1)
    eps0, delta0, big = 0.1, 0.1, 1e3
    m6 = min(1000, sample_count)
    dirs = rng.normal(size=(m6, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    lam = np.ones(n) + rng.uniform(0.0, delta0, size=(m6, 1)) * dirs
    lam_shift = lam.copy()
    lam_shift[:, -1] += big
    fshift = eval_f(spec, lam_shift, check_cone=False)
    margin = float(np.min(fshift - (1.0 + eps0)))
    report.records.append(ConditionRecord("2.6", m6, margin, 1e-9, margin >= -1e-9))

    # family-specific partial-derivative assumption
    if spec.family == CONSECUTIVE_QUOTIENT:
        bound = float(max(spec.k, n - spec.k + 1))
        margin = float(bound - np.max(np.sum(g, axis=-1)))
        report.records.append(ConditionRecord("1.3", m, margin, 1e-8, margin >= -1e-8))
    else:
        pos = valid > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(pos, valid * g / f[:, None], -np.inf)
        margin = float(1.0 / (spec.k - spec.l) - np.max(ratios))
        report.records.append(ConditionRecord("1.4", m, margin, 1e-8, margin >= -1e-8))

    return report


def sup_gradient_sum(spec: CurvatureSpec, sample_count: int, seed: int) -> float:
    """Empirical supremum of sum_i f_i over K_k for f = H_k/H_{k-1}.

    Includes near-boundary refinement (the supremum k is approached as
    H_k -> 0); finite by construction and reproducible given the seed.
    """
    if spec.family != CONSECUTIVE_QUOTIENT:
        raise ValueError("sup_gradient_sum applies to the consecutive quotient family")
    rng = np.random.default_rng(seed)
    samples = sample_cone(spec.n, spec.k, sample_count, seed)
    m = max(1, sample_count // 10)
    deep = push_toward_boundary(samples[:m].copy(), spec.k, rng, 1.0 - 1e-8)
    allpts = np.concatenate([samples, deep], axis=0)
    allpts = allpts[cone_contains(allpts, spec.cone_index)]
    sums = np.sum(grad_f(spec, allpts), axis=-1)
    return float(np.max(sums))


def sup_ratio_assumption(spec: CurvatureSpec, sample_count: int, seed: int) -> float:
    """Empirical supremum of kappa_i f_i / f over samples of K_{k+1} and
    indices with kappa_i > 0; bounded by 1/(k-l)."""
    if spec.family not in (GENERAL_QUOTIENT, KTH_ROOT):
        raise ValueError("sup_ratio_assumption applies to quotient/root families on K_{k+1}")
    rng = np.random.default_rng(seed)
    samples = sample_cone(spec.n, spec.required_cone, sample_count, seed)
    m = max(1, sample_count // 10)
    deep = push_toward_boundary(samples[:m].copy(), spec.required_cone, rng, 1.0 - 1e-6)
    allpts = np.concatenate([samples, deep], axis=0)
    allpts = allpts[cone_contains(allpts, spec.required_cone)]
    f = eval_f(spec, allpts)
    g = grad_f(spec, allpts)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(allpts > 0, allpts * g / f[:, None], -np.inf)
    return float(np.max(ratios))
