"""Numerical verification of Laplace-transform growth bounds on tube domains.

Every verifier fits the minimal constant on a finite grid (log scale), then
refits on refined grids; a bound is reported as verified when the fitted
constant drifts by less than 5% under each refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .cones import DEFAULT_SEED, Cone
from .errors import DomainError, InvariantViolation
from .gelfand import CatalogElement, Mollifier, TestFunction, gs_norm, pair
from .laplace import LaplaceFunction, as_laplace_function, laplace, tube_distance
from .report import BoundReport, stable
from .weights import (
    RSequence,
    WeightSequence,
    associated,
    scaled_associated,
    scaled_star_associated,
    star_associated,
)

BEURLING_ELLS = (0.25, 0.5, 1.0, 2.0, 4.0)


def beurling_family(ells: Sequence[float] = BEURLING_ELLS) -> list[RSequence]:
    return [RSequence.beurling(e) for e in ells]


# grids ------------------------------------------------------------------------


def _lattice(lo: float, hi: float, per_decade: int) -> np.ndarray:
    """10^(j/per_decade) for the integers j with lo <= value <= hi.

    Refining ``per_decade`` by an integer factor or widening [lo, hi] yields a
    superset of points, which keeps grid fits monotone.
    """
    j0 = math.ceil(math.log10(lo) * per_decade - 1e-9)
    j1 = math.floor(math.log10(hi) * per_decade + 1e-9)
    return 10.0 ** (np.arange(j0, j1 + 1) / per_decade)


def _default_y_dirs(cone: Cone) -> np.ndarray:
    omega = cone.dual_witness()
    if cone.dim == 1:
        return omega[None, :]
    rng = np.random.default_rng(DEFAULT_SEED)
    extra = cone.sample_dual_interior(rng, 3)
    extra = extra / np.linalg.norm(extra, axis=1, keepdims=True)
    return np.vstack([omega, extra])


def _default_x_dirs(dim: int) -> np.ndarray:
    eye = np.eye(dim)
    return np.vstack([eye, -eye])


@dataclass(frozen=True)
class TubeGrid:
    """Points x + iσy with |x| and σ on logarithmic lattices.

    x runs over ``x_dirs`` scaled by |x| in [x_min, x_max] (plus x = 0), σ over
    [sigma_min, sigma_max], and y over the unit vectors ``y_dirs`` in C.
    """

    cone: Cone
    x_min: float = 1e-2
    x_max: float = 1e3
    x_per_decade: int = 10
    sigma_min: float = 1e-4
    sigma_max: float = 1.0
    sigma_per_decade: int = 20
    x_dirs: tuple | None = None
    y_dirs: tuple | None = None

    def __post_init__(self):
        if not (0 < self.x_min <= self.x_max and 0 < self.sigma_min <= self.sigma_max):
            raise DomainError("grid ranges must be positive and ordered")
        n = self.cone.dim
        xd = _default_x_dirs(n) if self.x_dirs is None else np.asarray(self.x_dirs, dtype=float).reshape(-1, n)
        yd = _default_y_dirs(self.cone) if self.y_dirs is None else np.asarray(self.y_dirs, dtype=float).reshape(-1, n)
        if np.any(~(self.cone.dual_distance(yd) > 0)):
            raise DomainError("y directions must lie in the open dual cone C")
        object.__setattr__(self, "x_dirs", tuple(map(tuple, xd.tolist())))
        object.__setattr__(self, "y_dirs", tuple(map(tuple, yd.tolist())))

    @property
    def dim(self) -> int:
        return self.cone.dim

    def x_points(self) -> np.ndarray:
        mags = _lattice(self.x_min, self.x_max, self.x_per_decade)
        xd = np.asarray(self.x_dirs)
        pts = (mags[:, None, None] * xd[None, :, :]).reshape(-1, self.dim)
        return np.vstack([np.zeros((1, self.dim)), pts])

    def sigmas(self) -> np.ndarray:
        return _lattice(self.sigma_min, self.sigma_max, self.sigma_per_decade)

    def imag_points(self) -> np.ndarray:
        yd = np.asarray(self.y_dirs)
        return (self.sigmas()[:, None, None] * yd[None, :, :]).reshape(-1, self.dim)

    def points(self) -> np.ndarray:
        x, y = self.x_points(), self.imag_points()
        return (x[None, :, :] + 1j * y[:, None, :]).reshape(-1, self.dim)

    def refinements(self) -> dict:
        return {
            "x-range": replace(self, x_max=2 * self.x_max),
            "sigma-min": replace(self, sigma_min=self.sigma_min / 4),
            "density": replace(self, x_per_decade=2 * self.x_per_decade, sigma_per_decade=2 * self.sigma_per_decade),
        }

    def to_dict(self) -> dict:
        return {
            "kind": "tube",
            "cone": self.cone.to_dict(),
            "x_range": [self.x_min, self.x_max],
            "x_per_decade": self.x_per_decade,
            "sigma_range": [self.sigma_min, self.sigma_max],
            "sigma_per_decade": self.sigma_per_decade,
            "x_dirs": [list(d) for d in self.x_dirs],
            "y_dirs": [list(d) for d in self.y_dirs],
            "size": int(len(self.x_points()) * len(self.imag_points())),
        }


@dataclass(frozen=True)
class SliceGrid:
    """Explicit points x + iσω; refinements add 2x, σ/4 and midpoints."""

    cone: Cone
    omega: tuple
    x: tuple
    sigma: tuple

    @classmethod
    def build(cls, cone: Cone, omega, x_grid, sigma_grid) -> "SliceGrid":
        n = cone.dim
        om = np.asarray(omega, dtype=float).reshape(n)
        x = np.asarray(x_grid, dtype=float).reshape(-1, n)
        s = np.asarray(sigma_grid, dtype=float).ravel()
        if np.any(s <= 0):
            raise DomainError("σ grid must be positive")
        return cls(cone, tuple(om), tuple(map(tuple, x.tolist())), tuple(sorted(set(s.tolist()))))

    @property
    def dim(self) -> int:
        return self.cone.dim

    def points(self) -> np.ndarray:
        x = np.asarray(self.x)
        s = np.asarray(self.sigma)
        om = np.asarray(self.omega)
        return (x[None, :, :] + 1j * s[:, None, None] * om[None, None, :]).reshape(-1, self.dim)

    def refinements(self) -> dict:
        x = np.asarray(self.x)
        s = np.asarray(self.sigma)
        mid_x = (x[:-1] + x[1:]) / 2 if len(x) > 1 else x
        mid_s = np.sqrt(s[:-1] * s[1:]) if len(s) > 1 else s
        return {
            "x-range": replace(self, x=tuple(map(tuple, np.vstack([x, 2 * x]).tolist()))),
            "sigma-min": replace(self, sigma=tuple(sorted(set(s.tolist()) | set((s / 4).tolist())))),
            "density": replace(
                self,
                x=tuple(map(tuple, np.vstack([x, mid_x]).tolist())),
                sigma=tuple(sorted(set(s.tolist()) | set(mid_s.tolist()))),
            ),
        }

    def to_dict(self) -> dict:
        return {
            "kind": "slice",
            "cone": self.cone.to_dict(),
            "omega": list(self.omega),
            "x_count": len(self.x),
            "x_extent": float(np.max(np.linalg.norm(np.asarray(self.x), axis=1))) if self.x else 0.0,
            "sigma_range": [min(self.sigma), max(self.sigma)],
            "sigma_count": len(self.sigma),
        }


def slice_grid(cone: Cone, omega, sigma0: float, **kw) -> TubeGrid:
    """The default lattice restricted to Im z = σω with σ <= σ₀."""
    om = np.asarray(omega, dtype=float).reshape(cone.dim)
    return TubeGrid(cone, sigma_max=sigma0, y_dirs=(tuple(om),), **kw)


# fitting core -----------------------------------------------------------------


def _log_abs(F: LaplaceFunction, z: np.ndarray) -> np.ndarray:
    return np.asarray(F.log_abs(z), dtype=float).reshape(-1)


def _fit(log_lhs: np.ndarray, log_rhs: np.ndarray):
    excess = log_lhs - log_rhs
    i = int(np.argmax(excess))
    log_c = float(excess[i])
    return log_c, i, excess - log_c if math.isfinite(log_c) else np.full_like(excess, -math.inf)


def _grid_fit(bound_id, evaluate, grid, parameters, notes=()) -> BoundReport:
    """Fit on ``grid`` and on each of its refinements.

    ``evaluate(grid)`` returns (points, log_lhs, log_rhs).
    """
    pts, lhs, rhs = evaluate(grid)
    log_c, i, res = _fit(lhs, rhs)
    drift = {}
    ok = True
    for name, g in grid.refinements().items():
        _, lhs_r, rhs_r = evaluate(g)
        log_r, _, _ = _fit(lhs_r, rhs_r)
        drift[name] = log_r
        ok = ok and stable(log_c, log_r)
    worst = pts[i].tolist() if pts.ndim > 1 else complex(pts[i])
    grid_d = grid.to_dict()
    grid_d["refined_log_constants"] = drift
    return BoundReport(
        bound_id,
        log_c,
        passed=bool(ok and log_c < math.inf),
        refinement_stable=ok,
        worst_residual=0.0 if math.isfinite(log_c) else -math.inf,
        worst_point=worst,
        grid=grid_d,
        parameters=parameters,
        residuals=res,
        points=pts,
        notes=list(notes),
    )


def _params(W_M, W_N, R, **extra):
    d = {"M": W_M.to_dict(), "N": W_N.to_dict(), "R": R.to_dict()}
    d.update(extra)
    return d


def _prepare(F, W_M, W_N, R, cone):
    F = as_laplace_function(F, cone)
    return F, WeightSequence.from_spec(W_M), WeightSequence.from_spec(W_N), RSequence.from_spec(R)


def _check_grid_dim(grid, F):
    if grid.dim != F.dim:
        raise DomainError(f"grid dimension {grid.dim} does not match F dimension {F.dim}")


# tube bounds ------------------------------------------------------------------


def _tube_rhs(W_M, W_N, R, z, delta, eps):
    mod = np.linalg.norm(z, axis=-1)
    y_norm = np.linalg.norm(z.imag, axis=-1)
    return eps * y_norm + scaled_associated(W_M, R, mod) + scaled_star_associated(W_N, R, 1.0 / delta)


def verify_bound_tube(F, W_M, W_N, R, eps: float, grid: TubeGrid | None = None, *, bound_id="tube-bound") -> BoundReport:
    """|F(z)| <= L exp(ε|Im z| + M_l(|z|) + N*_l(1/Δ_C(Im z))) on the grid."""
    if eps < 0:
        raise DomainError("ε must be nonnegative")
    F, W_M, W_N, R = _prepare(F, W_M, W_N, R, getattr(grid, "cone", None))
    grid = grid or TubeGrid(F.cone)
    _check_grid_dim(grid, F)

    def evaluate(g):
        z = g.points()
        delta = tube_distance(g.cone, z)
        return z, _log_abs(F, z), _tube_rhs(W_M, W_N, R, z, delta, eps)

    return _grid_fit(bound_id, evaluate, grid, _params(W_M, W_N, R, eps=eps, F=F.label))


def verify_bound_3_1_i(F, W_M, W_N, R, eps: float, z_grid: TubeGrid | None = None) -> BoundReport:
    """Growth bound with the ε|Im z| slack; eps must be positive."""
    if not eps > 0:
        raise DomainError("ε must be positive")
    return verify_bound_tube(F, W_M, W_N, R, eps, z_grid, bound_id="tube-eps")


def verify_bound_strong(F, W_M, W_N, R, z_grid: TubeGrid | None = None) -> BoundReport:
    """Growth bound without the ε|Im z| slack."""
    return verify_bound_tube(F, W_M, W_N, R, 0.0, z_grid, bound_id="tube-strong")


def verify_bound_3_1_ii(
    F, W_M, W_N, R, omega, sigma0: float, x_grid=None, sigma_grid=None
) -> BoundReport:
    """|F(x + iσω)| <= L exp(M_l(|x|) + N*_l(1/σ)) for 0 < σ <= σ₀.

    Explicit grids refine by union with 2x, σ/4 and midpoints; without them the
    default lattice on the slice is used.
    """
    F, W_M, W_N, R = _prepare(F, W_M, W_N, R, None)
    cone = F.cone
    om = np.asarray(omega, dtype=float).reshape(cone.dim)
    if not cone.dual_distance(om) > 0:
        raise DomainError("ω must lie in the open dual cone C")
    if not sigma0 > 0:
        raise DomainError("σ₀ must be positive")
    tg = slice_grid(cone, om, sigma0)
    if x_grid is None and sigma_grid is None:
        grid = tg
    else:
        s = tg.sigmas() if sigma_grid is None else np.asarray(sigma_grid, dtype=float)
        if np.any(s > sigma0) or np.any(s <= 0):
            raise DomainError("σ grid must lie in (0, σ₀]")
        grid = SliceGrid.build(cone, om, tg.x_points() if x_grid is None else x_grid, s)
    om_norm = float(np.linalg.norm(om))

    def evaluate(g):
        z = g.points()
        sigma = np.linalg.norm(z.imag, axis=-1) / om_norm
        log_rhs = scaled_associated(W_M, R, np.linalg.norm(z.real, axis=-1)) + scaled_star_associated(W_N, R, 1.0 / sigma)
        return z, _log_abs(F, z), log_rhs

    params = _params(W_M, W_N, R, omega=om.tolist(), sigma0=sigma0, F=F.label)
    return _grid_fit("slice", evaluate, grid, params)


def verify_family(verifier: Callable, F, W_M, W_N, family=None, mapper: Callable = map, **kw) -> BoundReport:
    """Run ``verifier`` for every R in ``family`` (default: the Beurling ℓ-grid).

    The bound needs one admissible (l_p), so the family passes when some
    member passes; the member with the smallest constant is reported.
    ``mapper`` must preserve order (``map``, ``Executor.map``).
    """
    family = beurling_family() if family is None else [RSequence.from_spec(r) for r in family]
    reports = list(mapper(lambda r: verifier(F, W_M, W_N, r, **kw), family))
    parts = {_family_key(r): rep for r, rep in zip(family, reports)}
    passing = [k for k, v in parts.items() if v.passed]
    pool = passing or list(parts)
    best = min(pool, key=lambda k: parts[k].log_constant)
    b = parts[best]
    return BoundReport(
        b.bound_id + "/family",
        b.log_constant,
        passed=bool(passing),
        refinement_stable=b.refinement_stable,
        worst_residual=b.worst_residual,
        worst_point=b.worst_point,
        grid=b.grid,
        parameters={"best": best, "passing": passing, "verdicts": {k: v.passed for k, v in parts.items()}},
        parts=parts,
    )


def _family_key(r: RSequence) -> str:
    return f"ell={r.ell:g}" if r.is_beurling else f"{r.kind}:{r.ell:g}"


def violator(cone: Cone | None = None) -> LaplaceFunction:
    """F(z) = exp(1/(ω·Im z)) held in log form: grows like e^{1/σ} at the boundary."""
    cone = cone or Cone.orthant(1)
    om = cone.dual_witness()
    return LaplaceFunction.from_callable(
        lambda z: 1.0 / (np.imag(z) @ om), cone, label="exp(1/Im z)", log=True
    )


# weighted sup norms -------------------------------------------------------------


def o_ell_norm(F, W_M, W_N, ell: float, z_grid: TubeGrid | None = None) -> float:
    """Grid sup of |F(z)| exp(-M(l|z|) - N*(l/Δ_C(Im z)))."""
    if not ell > 0:
        raise DomainError("ℓ must be positive")
    F = as_laplace_function(F, getattr(z_grid, "cone", None))
    W_M, W_N = WeightSequence.from_spec(W_M), WeightSequence.from_spec(W_N)
    grid = z_grid or TubeGrid(F.cone, sigma_max=10.0)
    _check_grid_dim(grid, F)
    z = grid.points()
    delta = tube_distance(grid.cone, z)
    log_w = associated(W_M, ell * np.linalg.norm(z, axis=-1)) + star_associated(W_N, ell / delta)
    vals = _log_abs(F, z) - log_w
    top = float(np.max(vals))
    return math.exp(top) if top < 709 else math.inf


# sup-difference estimate --------------------------------------------------------


def _unit_directions(cone: Cone, count: int, seed: int) -> np.ndarray:
    if cone.dim == 1:
        return np.ones((1, 1))
    rng = np.random.default_rng(seed)
    pts = cone.sample(rng, count)
    if cone.kind == "orthant":
        pts = np.vstack([np.eye(cone.dim), pts])
    elif cone.kind == "polyhedral":
        pts = np.vstack([cone.generators, pts])
    nrm = np.linalg.norm(pts, axis=1, keepdims=True)
    return pts[nrm[:, 0] > 0] / nrm[nrm[:, 0] > 0]


def verify_sup_diff(W_N, R, cone: Cone, y, t_grid=None, *, directions: int = 64, seed: int = DEFAULT_SEED) -> BoundReport:
    """sup over sampled ξ in Γ of N_l(|ξ|) - y·ξ against N*_l(1/Δ_C(y)).

    The inequality has no free constant, so a single positive residual is a
    violation and raises with the offending ξ.
    """
    W_N, R = WeightSequence.from_spec(W_N), RSequence.from_spec(R)
    y = np.asarray(y, dtype=float).reshape(cone.dim)
    delta = float(cone.dual_distance(y))
    if not delta > 0:
        raise DomainError("y must lie in the open dual cone C")
    t = np.concatenate([[0.0], np.logspace(-3, 4, 400)]) if t_grid is None else np.asarray(t_grid, dtype=float)
    u = _unit_directions(cone, directions, seed)
    xi = (t[:, None, None] * u[None, :, :]).reshape(-1, cone.dim)
    lhs = scaled_associated(W_N, R, np.linalg.norm(xi, axis=1)) - xi @ y
    rhs = float(scaled_star_associated(W_N, R, 1.0 / delta))
    res = lhs - rhs
    i = int(np.argmax(res))
    tol = 1e-9 * max(1.0, abs(rhs))
    if res[i] > tol:
        raise InvariantViolation(f"sup estimate fails by {res[i]:.3e}", witness={"xi": xi[i].tolist(), "y": y.tolist()})
    return BoundReport(
        "sup-difference",
        0.0,
        passed=True,
        refinement_stable=None,
        worst_residual=float(res[i]),
        worst_point=xi[i].tolist(),
        grid={"t_range": [float(t.min()), float(t.max())], "t_count": int(t.size), "directions": int(u.shape[0])},
        parameters={"N": W_N.to_dict(), "R": R.to_dict(), "y": y.tolist(), "delta": delta, "slack": float(-res[i]) + 0.0},
        residuals=res,
        points=xi,
    )


def sample_sup_diff(W_N, R, cone: Cone, samples: int = 10_000, seed: int = DEFAULT_SEED) -> dict:
    """Random pairs (ξ in Γ, y in C) checked against the sup estimate."""
    W_N, R = WeightSequence.from_spec(W_N), RSequence.from_spec(R)
    rng = np.random.default_rng(seed)
    xi = cone.sample(rng, samples)
    y = cone.sample_dual_interior(rng, samples)
    delta = cone.dual_distance(y)
    keep = delta > 0
    xi, y, delta = xi[keep], y[keep], delta[keep]
    lhs = scaled_associated(W_N, R, np.linalg.norm(xi, axis=1)) - np.sum(xi * y, axis=1)
    rhs = scaled_star_associated(W_N, R, 1.0 / delta)
    bad = lhs > rhs + 1e-9 * np.maximum(1.0, np.abs(rhs))
    out = {"samples": int(keep.sum()), "violations": int(bad.sum()), "max_excess": float(np.max(lhs - rhs))}
    if bad.any():
        k = int(np.argmax(bad))
        out["witness"] = {"xi": xi[k].tolist(), "y": y[k].tolist()}
    return out


# mollifier times exponential ------------------------------------------------------


def _lemma_box(eta: Mollifier, z: np.ndarray, beta_max: int):
    """Box outside which |ξ^β η(ξ) e^{iz·ξ}| is below 1e-16 of its peak."""
    delta = float(eta.cone.dual_distance(z.imag))
    reach = 40.0 / delta
    for _ in range(3):
        reach = (37.0 + beta_max * math.log(max(reach, 1.0))) / delta
    return -2.0 * eta.eps, max(reach, 4.0 * eta.eps)


def _modulated_norm(eta, z, W_M, W_N, a, b, alpha_max, beta_max, density=1):
    lo, hi = _lemma_box(eta, z, beta_max)
    phi = eta.modulated(z)
    spacing = min(eta.eps / 64, 0.25 / (1.0 + float(np.linalg.norm(z.real))))
    if eta.dim == 1:
        points = int(math.ceil((hi - lo) / spacing * density)) + 1
        points = min(points, 400_001)
    else:
        points = min(int(math.ceil((hi - lo) / (eta.eps / 8) * density)) + 1, 161)
    return gs_norm(phi, W_M, W_N, a, b, alpha_max, beta_max, t_box=(lo, hi), points=points)


def verify_lemma_3_4(
    eta: Mollifier, W_M, W_N, a, b, z_list, alpha_max: int = 3, beta_max: int = 3, family=None
) -> BoundReport:
    """Truncated Gelfand-Shilov norm of η e^{iz·ξ} against
    H exp(4ε|Im z| + M_l(|z|) + N*_l(1/Δ_C(Im z))), H fitted per family member.
    """
    W_M, W_N = WeightSequence.from_spec(W_M), WeightSequence.from_spec(W_N)
    a, b = RSequence.from_spec(a), RSequence.from_spec(b)
    family = beurling_family() if family is None else [RSequence.from_spec(r) for r in family]
    z = np.asarray(z_list, dtype=complex).reshape(-1, eta.dim)
    delta = tube_distance(eta.cone, z)
    log_norm = np.empty(len(z))
    log_norm_fine = np.empty(len(z))
    for k, zk in enumerate(z):
        v = _modulated_norm(eta, zk, W_M, W_N, a, b, alpha_max, beta_max).value
        vf = _modulated_norm(eta, zk, W_M, W_N, a, b, alpha_max, beta_max, density=2).value
        log_norm[k] = math.log(v) if v > 0 else -math.inf
        log_norm_fine[k] = math.log(vf) if vf > 0 else -math.inf
    mod = np.linalg.norm(z, axis=1)
    base = 4 * eta.eps * np.linalg.norm(z.imag, axis=1)
    parts, fits = {}, {}
    for r in family:
        rhs = base + scaled_associated(W_M, r, mod) + scaled_star_associated(W_N, r, 1.0 / delta)
        log_h, i, res = _fit(log_norm, rhs)
        log_hf, _, _ = _fit(log_norm_fine, rhs)
        ok = stable(log_h, log_hf)
        key = _family_key(r)
        fits[key] = log_h
        parts[key] = BoundReport(
            "mollifier-exponential",
            log_h,
            passed=bool(ok and math.isfinite(log_h)),
            refinement_stable=ok,
            worst_point=z[i].tolist(),
            grid={"z_count": int(len(z)), "refined_log_constant": log_hf},
            parameters={"R": r.to_dict()},
            residuals=res,
            points=z,
        )
    best = min(fits, key=fits.get)
    b_rep = parts[best]
    return BoundReport(
        "mollifier-exponential",
        b_rep.log_constant,
        passed=b_rep.passed,
        refinement_stable=b_rep.refinement_stable,
        worst_residual=0.0,
        worst_point=b_rep.worst_point,
        grid={"z": z.tolist(), "alpha_max": alpha_max, "beta_max": beta_max},
        parameters={
            "eps": eta.eps,
            "M": W_M.to_dict(),
            "N": W_N.to_dict(),
            "a": a.to_dict(),
            "b": b.to_dict(),
            "best": best,
            "log_H": fits,
            "log_norms": log_norm.tolist(),
        },
        residuals=b_rep.residuals,
        points=z,
        parts=parts,
    )


# sequence convergence -------------------------------------------------------------


def delta_approximants(ks: Sequence[float]) -> list[CatalogElement]:
    """f_k = k e^{-kξ} on [0, ∞), tending to δ as k grows."""
    from .gelfand import power

    return [power(0.0, float(k), coef=float(k)) for k in ks]


def sequence_convergence_check(
    fs: Sequence[CatalogElement],
    g: CatalogElement,
    W_M,
    W_N,
    R,
    battery: Sequence[TestFunction],
    *,
    omega=None,
    sigma0: float = 1.0,
    y_grid=None,
    tol: float = 1e-3,
) -> BoundReport:
    """Uniform slice-bound constants plus pointwise Laplace convergence on a
    ray grid, checked to imply convergence of the pairings on the battery.
    """
    g = CatalogElement.from_dict(g)
    cone = g.cone
    om = cone.dual_witness() if omega is None else np.asarray(omega, dtype=float)
    y = np.logspace(-1, 1, 9) if y_grid is None else np.asarray(y_grid, dtype=float)
    ys = y[:, None] * om[None, :] if y.ndim == 1 else y
    consts = []
    for f in fs:
        rep = verify_bound_3_1_ii(f, W_M, W_N, R, om, sigma0)
        consts.append(rep.log_constant if rep.passed else math.inf)
    consts = np.array(consts)
    # uniform: the later members do not push the constant up
    head = consts[: max(len(fs) // 2, 1)]
    uniform = bool(np.all(np.isfinite(consts)) and stable(float(head.max()), float(consts.max())))
    lg = np.asarray(laplace(g, 1j * ys))
    lap_err = np.array([float(np.max(np.abs(np.asarray(laplace(f, 1j * ys)) - lg))) for f in fs])
    targets = np.array([pair(g, phi) for phi in battery])
    pair_err = np.array([float(np.max(np.abs(np.array([pair(f, phi) for phi in battery]) - targets))) for f in fs])
    pointwise = bool(lap_err[-1] < tol and lap_err[-1] <= lap_err[0])
    converges = bool(pair_err[-1] < tol and pair_err[-1] <= pair_err[0])
    return BoundReport(
        "sequence-convergence",
        float(consts.max()),
        passed=uniform and pointwise and converges,
        refinement_stable=uniform,
        grid={"y": ys.tolist(), "sigma0": sigma0, "omega": om.tolist()},
        parameters={
            "log_constants": consts.tolist(),
            "laplace_errors": lap_err.tolist(),
            "pairing_errors": pair_err.tolist(),
            "uniform": uniform,
            "pointwise": pointwise,
            "pairings_converge": converges,
        },
    )
