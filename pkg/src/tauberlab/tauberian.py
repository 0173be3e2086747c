"""Regular variation, quasiasymptotics, and deducing them from Laplace data.

The pipeline takes a catalog element f and a regularly varying ρ, checks that
r^n L{f}(riy)/ρ(1/r) has limits on a set of rays, checks the weighted bound on
the unit hemisphere as r -> 0+, identifies the homogeneous limit g from the ray
limits, and cross-validates against the direct dilation oracle.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .cones import DEFAULT_SEED, Cone
from .errors import DomainError, PreconditionError, UsageError
from .gelfand import (
    Bump,
    CatalogElement,
    Gaussian,
    PointDerivative,
    PowerExpDensity,
    TestFunction,
    cone_basis,
    multi_indices,
    pair,
)
from .laplace import laplace
from .report import BoundReport, dumps, stable
from .weights import RSequence, WeightSequence, check_conditions, scaled_star_associated

SLOW_FACTORS = ("none", "log", "loglog", "osc")
LIMIT_DRIFT = 1e-6
ORACLE_RTOL = 1e-4
IDENTIFY_RTOL = 1e-6


# regularly varying functions ------------------------------------------------------


@dataclass(frozen=True)
class RegularlyVarying:
    """ρ(λ) = λ^alpha S(λ) with S one of 1, log^beta(e + λ),
    (log log(e^e + λ))^beta, or the non-slowly-varying 2 + sin(log λ).

    ``cutoff`` replaces ρ by 1 below that λ; only the pipeline sets it.
    """

    alpha: float = 0.0
    slow: str = "none"
    beta: float = 1.0
    cutoff: float | None = None

    def __post_init__(self):
        if self.slow not in SLOW_FACTORS:
            raise UsageError(f"unknown slowly varying factor {self.slow!r}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))

    @classmethod
    def power(cls, alpha: float) -> "RegularlyVarying":
        return cls(alpha)

    @classmethod
    def from_spec(cls, spec) -> "RegularlyVarying":
        """Accepts an instance, a number (the index), ``lambda^a`` or a dict."""
        if isinstance(spec, RegularlyVarying):
            return spec
        if isinstance(spec, (int, float)):
            return cls(float(spec))
        if isinstance(spec, str):
            s = spec.replace(" ", "")
            if s in ("1", "const"):
                return cls(0.0)
            for head in ("lambda^", "λ^"):
                if s.startswith(head):
                    try:
                        return cls(float(s[len(head):]))
                    except ValueError:
                        break
            if s in ("lambda", "λ"):
                return cls(1.0)
            raise UsageError(f"cannot parse ρ shorthand {spec!r}")
        spec = dict(spec)
        return cls(float(spec.get("alpha", 0.0)), spec.get("slow", "none"), float(spec.get("beta", 1.0)))

    def to_dict(self) -> dict:
        d = {"alpha": self.alpha, "slow": self.slow, "beta": self.beta}
        if self.cutoff is not None:
            d["cutoff"] = self.cutoff
        return d

    def normalized(self, cutoff: float) -> "RegularlyVarying":
        return replace(self, cutoff=float(cutoff))

    def log(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        if np.any(~(lam > 0)):
            raise DomainError("ρ is evaluated at λ > 0 only")
        out = self.alpha * np.log(lam)
        if self.slow == "log":
            out = out + self.beta * np.log(np.log(math.e + lam))
        elif self.slow == "loglog":
            out = out + self.beta * np.log(np.log(np.log(math.exp(math.e) + lam)))
        elif self.slow == "osc":
            out = out + np.log(2.0 + np.sin(np.log(lam)))
        if self.cutoff is not None:
            out = np.where(lam < self.cutoff, 0.0, out)
        return out

    def __call__(self, lam):
        v = np.exp(self.log(lam))
        return float(v) if np.ndim(v) == 0 else v


def rho_eval(rho: RegularlyVarying, lam) -> float:
    return RegularlyVarying.from_spec(rho)(lam)


def regular_variation_check(rho: RegularlyVarying, a_values=(0.5, 2.0), lam_grid=None) -> dict:
    """Deviation |ρ(λa)/(ρ(λ)a^α) - 1| along a λ-grid.

    Slowly varying logarithmic factors converge like 1/log λ, so the flag asks
    for a deviation that decays monotonically along the grid rather than a
    fixed tolerance; the value at λ = 1e6 is reported alongside.
    """
    rho = RegularlyVarying.from_spec(rho)
    lam = np.logspace(3, 12, 37) if lam_grid is None else np.asarray(lam_grid, dtype=float)
    flag = True
    dev = {}
    at_1e6 = {}
    for a in a_values:
        d = np.abs(np.expm1(rho.log(lam * a) - rho.log(lam) - rho.alpha * math.log(a)))
        dev[a] = d.tolist()
        flag = flag and bool(np.all(np.diff(d) <= 1e-12 + 1e-9 * d[:-1])) and d[-1] < 0.1
        at_1e6[a] = float(np.exp(rho.log(1e6 * a) - rho.log(1e6)))
    return {"regularly_varying": flag, "ratio_at_1e6": at_1e6, "deviation": dev, "lam": lam.tolist()}


def _potter_fit(rho, lam, t):
    L, T = np.meshgrid(lam, t, indexing="ij")
    val = rho.log(L * T) - rho.log(L) - rho.alpha * np.log(T) - np.abs(np.log(T))
    i = np.unravel_index(int(np.argmax(val)), val.shape)
    return float(val[i]), (float(L[i]), float(T[i])), val


def potter_check(rho, lam_grid=None, t_grid=None) -> BoundReport:
    """Fit L₃ with ρ(λt)/ρ(λ) <= L₃ t^α max(t, 1/t); pass needs a stable fit
    and a regularly varying ρ."""
    rho = RegularlyVarying.from_spec(rho)
    lam = np.logspace(0, 6, 61) if lam_grid is None else np.asarray(lam_grid, dtype=float)
    t = np.logspace(-3, 3, 61) if t_grid is None else np.asarray(t_grid, dtype=float)
    if np.any(lam <= 0) or np.any(t <= 0):
        raise DomainError("Potter grids must be positive")
    log_c, arg, val = _potter_fit(rho, lam, t)
    refined = {
        "lambda-range": _potter_fit(rho, np.concatenate([lam, lam * 100.0]), t)[0],
        "t-range": _potter_fit(rho, lam, np.concatenate([t / 2, t, t * 2]))[0],
        "density": _potter_fit(rho, np.concatenate([lam, np.sqrt(lam[:-1] * lam[1:])]), np.concatenate([t, np.sqrt(t[:-1] * t[1:])]))[0],
    }
    ok = all(stable(log_c, v) for v in refined.values())
    rv = regular_variation_check(rho)
    notes = [] if rv["regularly_varying"] else ["ratio ρ(λa)/ρ(λ) does not settle to a^α: not regularly varying"]
    return BoundReport(
        "potter",
        log_c,
        passed=bool(ok and rv["regularly_varying"]),
        refinement_stable=ok,
        worst_point=list(arg),
        grid={"lambda": [float(lam.min()), float(lam.max()), int(lam.size)], "t": [float(t.min()), float(t.max()), int(t.size)], "refined_log_constants": refined},
        parameters={"rho": rho.to_dict(), "regular_variation": {k: v for k, v in rv.items() if k != "deviation" and k != "lam"}},
        residuals=(val - log_c).ravel(),
        notes=notes,
    )


# ray limits ------------------------------------------------------------------------


def default_r_grid() -> np.ndarray:
    """r = 10^(-k/8) from 0.1 down to 1e-6."""
    return 10.0 ** (-np.arange(8, 49) / 8)


@dataclass
class LimitTable:
    """Values of r^n L{f}(riy)/ρ(1/r) per ray, with their limit estimates."""

    rays: np.ndarray
    r: np.ndarray
    values: np.ndarray
    limits: np.ndarray
    drift: np.ndarray
    converged: np.ndarray
    method: list

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))

    def to_dict(self) -> dict:
        return {
            "rays": self.rays.tolist(),
            "r": self.r.tolist(),
            "values": [[complex(v) for v in row] for row in self.values],
            "limits": [complex(v) for v in self.limits],
            "drift": self.drift.tolist(),
            "converged": self.converged.tolist(),
            "method": self.method,
        }


def _octave_drift(r, v):
    """Relative spread of v over the last octave of r (r sorted decreasing)."""
    last = v[-1]
    if not np.isfinite(last) or abs(last) < 1e-300:
        return math.inf
    mask = r <= 2.0 * r[-1]
    return float(np.max(np.abs(v[mask] - last)) / abs(last))


def _extrapolate(r, v):
    """Remove a term linear in r from consecutive pairs."""
    return (r[:-1] * v[1:] - r[1:] * v[:-1]) / (r[:-1] - r[1:])


def _rays(rays, cone: Cone) -> np.ndarray:
    y = np.asarray(rays, dtype=float)
    y = y.reshape(-1, 1) if cone.dim == 1 and y.ndim == 1 else y.reshape(-1, cone.dim)
    if np.any(~(cone.dual_distance(y) > 0)):
        raise DomainError("rays must lie in the open dual cone C")
    return y


def default_rays(cone: Cone) -> np.ndarray:
    """ω and four points of a solid subcone around it."""
    om = cone.dual_witness()
    if cone.dim == 1:
        return np.array([[0.5], [1.0], [2.0], [3.0]])
    rng = np.random.default_rng(DEFAULT_SEED)
    pert = rng.standard_normal((4, cone.dim))
    pert -= (pert @ om)[:, None] * om[None, :]
    pert /= np.linalg.norm(pert, axis=1, keepdims=True)
    delta = float(cone.dual_distance(om))
    scales = np.array([1.0, 2.0, 0.5, 1.5])
    pts = om[None, :] + 0.5 * delta * pert
    return np.vstack([om, pts * scales[:, None]])


def scaled_laplace_limit(f, rho, y_rays=None, r_grid=None) -> LimitTable:
    """r^n L{f}(riy)/ρ(1/r) along r -> 0+ on each ray.

    A ray limit is accepted when the raw values, or the values with their
    linear-in-r term removed, drift by less than 1e-6 relative over the last
    octave; otherwise the ray has no limit (reported, not raised).
    """
    f = CatalogElement.from_dict(f)
    rho = RegularlyVarying.from_spec(rho)
    n = f.dim
    y = default_rays(f.cone) if y_rays is None else _rays(y_rays, f.cone)
    r = default_r_grid() if r_grid is None else np.sort(np.asarray(r_grid, dtype=float))[::-1]
    if r.size < 3 or np.any(r <= 0):
        raise DomainError("r grid needs at least three positive values")
    z = 1j * r[None, :, None] * y[:, None, :]
    lap = np.asarray(laplace(f, z.reshape(-1, n))).reshape(len(y), len(r))
    scale = np.exp(n * np.log(r) - rho.log(1.0 / r))
    vals = lap * scale[None, :]
    limits = np.empty(len(y), dtype=complex)
    drift = np.empty(len(y))
    method = []
    for k in range(len(y)):
        d_raw = _octave_drift(r, vals[k])
        e = _extrapolate(r, vals[k])
        d_ext = _octave_drift(r[1:], e)
        if d_raw <= d_ext or not np.isfinite(d_ext):
            limits[k], drift[k] = vals[k, -1], d_raw
            method.append("raw")
        else:
            limits[k], drift[k] = e[-1], d_ext
            method.append("linear-extrapolated")
    return LimitTable(y, r, vals, limits, drift, drift < LIMIT_DRIFT, method)


# hemisphere bound ----------------------------------------------------------------


def _unit_sphere(dim: int, count: int = 16) -> np.ndarray:
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        a = 2 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(a), np.sin(a)])
    rng = np.random.default_rng(DEFAULT_SEED)
    u = rng.standard_normal((4 * count, dim))
    eye = np.eye(dim)
    u = np.vstack([eye, -eye, u])
    return u / np.linalg.norm(u, axis=1, keepdims=True)


def _theta_grid(theta_min: float, per_decade: int = 10) -> np.ndarray:
    j0 = math.ceil(math.log10(theta_min) * per_decade - 1e-9)
    j1 = math.floor(math.log10(math.pi / 2) * per_decade)
    th = 10.0 ** (np.arange(j0, j1 + 1) / per_decade)
    return np.append(th, math.pi / 2)


def _hemisphere_values(f, rho, om, W_A, R, r, theta, dirs):
    n = f.dim
    cos, sin = np.cos(theta), np.sin(theta)
    w = cos[:, None, None] * dirs[None, :, :] + 1j * sin[:, None, None] * om[None, None, :]
    w = w.reshape(-1, n)
    weight = np.repeat(scaled_star_associated(W_A, R, 1.0 / sin), len(dirs))
    out = np.empty(len(r))
    for k, rk in enumerate(r):
        with np.errstate(divide="ignore"):
            la = np.log(np.abs(np.asarray(laplace(f, rk * w))))
        out[k] = float(np.max(n * math.log(rk) - weight + la - rho.log(1.0 / rk)))
    return out


def hemisphere_bound_check(
    f, rho, omega=None, W_A=None, R=None, theta_min: float = 1e-3, directions=None, r_grid=None
) -> BoundReport:
    """limsup as r -> 0+ of the sup over |x|² + sin²θ = 1 of
    r^n e^{-A*_l(1/sinθ)} |L{f}(r(x + i sinθ ω))| / ρ(1/r).

    The limsup is the max over the last octave of r. It passes when finite
    and not growing (by more than 5%) when r_min or θ_min is divided by 4.
    """
    f = CatalogElement.from_dict(f)
    rho = RegularlyVarying.from_spec(rho)
    cone = f.cone
    om = cone.dual_witness() if omega is None else np.asarray(omega, dtype=float).reshape(cone.dim)
    if not cone.dual_distance(om) > 0:
        raise DomainError("ω must lie in the open dual cone C")
    W_A = WeightSequence.gevrey(2).times(WeightSequence.gevrey(2)) if W_A is None else WeightSequence.from_spec(W_A)
    R = RSequence.beurling(1.0) if R is None else RSequence.from_spec(R)
    dirs = _unit_sphere(cone.dim) if directions is None else np.asarray(directions, dtype=float).reshape(-1, cone.dim)
    r = default_r_grid() if r_grid is None else np.sort(np.asarray(r_grid, dtype=float))[::-1]

    def limsup(r_arr, th_min):
        q = _hemisphere_values(f, rho, om, W_A, R, r_arr, _theta_grid(th_min), dirs)
        return float(np.max(q[r_arr <= 2 * r_arr[-1]])), q

    base, q = limsup(r, theta_min)
    r_ext = np.concatenate([r, r[r <= 4 * r[-1]][1:] / 4])
    refined = {"r-min": limsup(r_ext, theta_min)[0], "theta-min": limsup(r, theta_min / 4)[0]}
    ok = math.isfinite(base) and all(v <= base + math.log1p(0.05) for v in refined.values())
    return BoundReport(
        "hemisphere",
        base,
        passed=bool(ok),
        refinement_stable=all(stable(base, v) for v in refined.values()),
        worst_point=float(r[int(np.argmax(q))]),
        grid={
            "r": [float(r.min()), float(r.max()), int(r.size)],
            "theta_min": theta_min,
            "directions": int(len(dirs)),
            "refined_log_constants": refined,
        },
        parameters={"rho": rho.to_dict(), "omega": om.tolist(), "A": W_A.to_dict(), "R": R.to_dict(), "per_r": q.tolist()},
    )


# direct oracle -------------------------------------------------------------------------


def default_battery(dim: int = 1) -> list[TestFunction]:
    if dim == 1:
        return [Gaussian(1.0, 1.0), Gaussian(0.5, 0.5), Bump(1.0, 1.5)]
    return [Gaussian(1.0, 1.0, dim=dim), Gaussian(np.linspace(0.5, 1.0, dim), 0.7), Bump(1.0, 1.6, dim=dim)]


def describe(phi: TestFunction) -> str:
    center, scale, compact = phi.support_hint()
    kind = type(phi).__name__
    return f"{kind}(center={np.round(np.asarray(center), 6).tolist()}, scale={scale:g})"


@dataclass
class DirectTable:
    labels: list
    lam: np.ndarray
    values: np.ndarray
    limits: np.ndarray
    increments: np.ndarray

    def to_dict(self) -> dict:
        return {
            "test_functions": self.labels,
            "lambda": self.lam.tolist(),
            "values": [[complex(v) for v in row] for row in self.values],
            "limits": [complex(v) for v in self.limits],
            "last_increment": self.increments.tolist(),
        }


def quasiasymptotic_direct(f, rho, battery=None, lam_grid=None) -> DirectTable:
    """λ^{-n} ⟨f, φ(·/λ)⟩ / ρ(λ) tabulated on λ up to 1e6."""
    f = CatalogElement.from_dict(f)
    rho = RegularlyVarying.from_spec(rho)
    battery = default_battery(f.dim) if battery is None else list(battery)
    lam = np.logspace(0, 6, 13) if lam_grid is None else np.asarray(lam_grid, dtype=float)
    n = f.dim
    vals = np.empty((len(battery), len(lam)), dtype=complex)
    for i, phi in enumerate(battery):
        for k, lk in enumerate(lam):
            vals[i, k] = pair(f, phi.dilated(lk)) * math.exp(-n * math.log(lk) - float(rho.log(lk)))
    last = vals[:, -1]
    inc = np.abs(vals[:, -1] - vals[:, -2]) / np.maximum(np.abs(last), 1e-300) if len(lam) > 1 else np.zeros(len(battery))
    return DirectTable([describe(p) for p in battery], lam, vals, last, inc)


# identification of g --------------------------------------------------------------------


def _power_candidates(alpha: float, cone: Cone):
    n = cone.dim
    try:
        basis = cone_basis(cone)
    except Exception:  # noqa: BLE001 - non-simplicial cones carry no power atoms
        return []
    if n == 1:
        splits = [(alpha,)] if alpha > -1 else []
    else:
        splits = []
        if alpha / n > -1:
            splits.append((alpha / n,) * n)
        if n == 2:
            for k in range(-1, 13):
                a1 = k / 2
                a = (a1, alpha - a1)
                if min(a) > -1 and a not in splits:
                    splits.append(a)
    return [PowerExpDensity(a, (0.0,) * n, 1.0, basis) for a in splits]


def homogeneous_candidates(alpha: float, cone: Cone) -> list:
    """Homogeneous atoms of degree alpha supported in the cone."""
    n = cone.dim
    out = []
    k = -n - alpha
    if k >= -1e-9 and abs(k - round(k)) < 1e-9:
        out += [PointDerivative((0.0,) * n, beta, 1.0) for beta in multi_indices(n, int(round(k))) if sum(beta) == round(k)]
    out += _power_candidates(alpha, cone)
    return out


def _clean(c: complex) -> complex | float:
    """Round a fitted coefficient to 8 significant digits; ray limits are
    only trusted to about 1e-6 relative."""
    c = complex(c)
    mag = abs(c)
    if mag == 0:
        return 0.0
    digits = 7 - math.floor(math.log10(mag))
    re, im = round(c.real, digits), round(c.imag, digits)
    return re if im == 0 else complex(re, im)


def identify_g(limits: np.ndarray, rays: np.ndarray, alpha: float, cone: Cone, rtol: float = IDENTIFY_RTOL):
    """Match ray limits to a combination of degree-alpha atoms.

    Single atoms are tried first, then a least-squares combination; returns
    (g or None, relative residual).
    """
    cands = homogeneous_candidates(alpha, cone)
    if not cands:
        return None, math.inf
    target = np.asarray(limits, dtype=complex)
    norm = float(np.linalg.norm(target))
    if norm == 0:
        return None, math.inf
    cols = np.column_stack([np.asarray(laplace(CatalogElement((c,), cone), 1j * rays)).reshape(-1) for c in cands])
    best = (None, math.inf)
    for j, c in enumerate(cands):
        col = cols[:, j]
        coef = np.vdot(col, target) / np.vdot(col, col)
        res = float(np.linalg.norm(coef * col - target)) / norm
        if res < best[1]:
            best = ((j,), [coef]), res
    if best[1] > rtol and len(cands) > 1 and len(cands) <= len(target):
        coefs, *_ = np.linalg.lstsq(cols, target, rcond=None)
        res = float(np.linalg.norm(cols @ coefs - target)) / norm
        if res < best[1]:
            best = (tuple(range(len(cands))), list(coefs)), res
    if best[1] > rtol:
        return None, best[1]
    idx, coefs = best[0]
    atoms = tuple(cands[j].scaled(_clean(c)) for j, c in zip(idx, coefs) if abs(c) > 1e-12)
    return CatalogElement(atoms, cone), best[1]


def abelian_check(f, rho, g, patch=None, r: float = 1e-4) -> dict:
    """Uniform error of r^n L{f}(rz)/ρ(1/r) against L{g}(z) on a compact patch.

    The default patch is 5 x 5: Re z in [-1, 1] times Im z = s ω, s in [0.5, 2].
    """
    f, g = CatalogElement.from_dict(f), CatalogElement.from_dict(g)
    rho = RegularlyVarying.from_spec(rho)
    n = f.dim
    if patch is None:
        om = f.cone.dual_witness()
        xs = np.linspace(-1, 1, 5)
        ss = np.linspace(0.5, 2, 5)
        e = np.ones(n) / math.sqrt(n)
        patch = (xs[:, None, None] * e[None, None, :] + 1j * ss[None, :, None] * om[None, None, :]).reshape(-1, n)
    z = np.asarray(patch, dtype=complex).reshape(-1, n)
    lhs = np.asarray(laplace(f, r * z)).reshape(-1) * math.exp(n * math.log(r) - float(rho.log(1.0 / r)))
    rhs = np.asarray(laplace(g, z)).reshape(-1)
    err = float(np.max(np.abs(lhs - rhs)))
    scale = float(np.max(np.abs(rhs)))
    return {"r": r, "points": int(len(z)), "max_error": err, "relative_error": err / scale if scale else math.inf}


# pipeline --------------------------------------------------------------------------------


@dataclass
class PipelineConfig:
    """Grids and hypotheses for the Tauberian pipeline; None picks defaults."""

    W_M: object = "gevrey:2"
    W_N: object = "gevrey:2"
    R: object = field(default_factory=lambda: RSequence.beurling(1.0))
    omega: object = None
    rays: object = None
    r_grid: object = None
    theta_min: float = 1e-3
    lam_grid: object = None
    battery: object = None
    oracle_rtol: float = ORACLE_RTOL
    normalize_below: float = 1.0

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        d = dict(d or {})
        grids = d.get("grids", {})
        sub = d.get("subcone")
        rays = sub.get("rays") if isinstance(sub, dict) else sub
        known = {"M", "N", "R", "omega", "subcone", "grids", "f", "rho", "seed", "cone", "oracle_rtol", "theta_min", "name", "command", "options"}
        extra = set(d) - known
        if extra:
            raise UsageError(f"unknown pipeline config keys: {sorted(extra)}")
        return cls(
            W_M=d.get("M", "gevrey:2"),
            W_N=d.get("N", "gevrey:2"),
            R=RSequence.from_spec(d.get("R", {"kind": "beurling", "ell": 1.0})),
            omega=d.get("omega"),
            rays=rays,
            r_grid=grids.get("r"),
            theta_min=float(grids.get("theta_min", d.get("theta_min", 1e-3))),
            lam_grid=grids.get("lambda"),
            oracle_rtol=float(d.get("oracle_rtol", ORACLE_RTOL)),
        )

    def to_dict(self) -> dict:
        return {
            "M": WeightSequence.from_spec(self.W_M).to_dict(),
            "N": WeightSequence.from_spec(self.W_N).to_dict(),
            "R": RSequence.from_spec(self.R).to_dict(),
            "omega": None if self.omega is None else np.asarray(self.omega, dtype=float).tolist(),
            "rays": None if self.rays is None else np.asarray(self.rays, dtype=float).tolist(),
            "r_grid": None if self.r_grid is None else np.asarray(self.r_grid, dtype=float).tolist(),
            "theta_min": self.theta_min,
            "lam_grid": None if self.lam_grid is None else np.asarray(self.lam_grid, dtype=float).tolist(),
            "oracle_rtol": self.oracle_rtol,
            "normalize_below": self.normalize_below,
        }


@dataclass
class QuasiVerdict:
    passed: bool
    alpha: float
    g: CatalogElement | None
    legs: dict
    limits: LimitTable
    hemisphere: BoundReport
    direct: DirectTable | None = None
    oracle: list = field(default_factory=list)
    abelian: dict | None = None
    notes: list = field(default_factory=list)

    @property
    def g_label(self) -> str:
        if self.g is None:
            return "ray-limit table only"
        return _describe_element(self.g)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "alpha": self.alpha,
            "g": None if self.g is None else self.g.to_dict(),
            "g_label": self.g_label,
            "legs": self.legs,
            "ray_limits": self.limits.to_dict(),
            "hemisphere": self.hemisphere.to_dict(include_residuals=False),
            "direct": None if self.direct is None else self.direct.to_dict(),
            "oracle": self.oracle,
            "abelian": self.abelian,
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def summary(self) -> str:
        lines = [f"verdict: {'pass' if self.passed else 'fail'}", f"degree: {self.alpha:g}", f"g: {self.g_label}"]
        lines += [f"leg {k}: {'ok' if v else 'failed'}" for k, v in self.legs.items()]
        for row in self.oracle:
            lines.append(f"  {row['test_function']}: direct {row['direct']:.10g} vs g {row['expected']:.10g} (rel {row['relative_error']:.2e})")
        return "\n".join(lines)


_NAMES = {
    ("point", (0,)): "delta",
    ("point", (1,)): "delta_prime",
    ("density", (0.0,)): "heaviside",
    ("density", (1.0,)): "xplus",
    ("density", (0.0, 0.0)): "heaviside2",
}


def _describe_element(g: CatalogElement) -> str:
    if len(g.atoms) == 1:
        a = g.atoms[0]
        key = ("point", a.alpha) if isinstance(a, PointDerivative) else ("density", a.a if not any(a.c) else None)
        name = _NAMES.get(key)
        if isinstance(a, PowerExpDensity) and a.basis is not None:
            name = None
        if name and a.coef == 1:
            return name
        if name:
            return f"{_clean(a.coef)} * {name}"
    return g.to_json()


def check_hypotheses(W_M, W_N) -> dict:
    """M: (M.1), (M.2), (M.3)'; N: (M.1), (M.2), (M.1)*. Raises listing failures."""
    cm = check_conditions(WeightSequence.from_spec(W_M))
    cn = check_conditions(WeightSequence.from_spec(W_N))
    need = [("M", cm, "M.1"), ("M", cm, "M.2"), ("M", cm, "M.3'"), ("N", cn, "M.1"), ("N", cn, "M.2"), ("N", cn, "M.1*")]
    failed = [f"{w} {c}" for w, rep, c in need if not rep[c]]
    if failed:
        raise PreconditionError("weight hypotheses fail: " + ", ".join(failed))
    return {"M": cm.flags, "N": cn.flags}


def tauberian_pipeline(f, rho, config: PipelineConfig | dict | None = None) -> QuasiVerdict:
    f = CatalogElement.from_dict(f)
    rho = RegularlyVarying.from_spec(rho)
    cfg = config if isinstance(config, PipelineConfig) else PipelineConfig.from_dict(config or {})
    check_hypotheses(cfg.W_M, cfg.W_N)
    W_A = WeightSequence.from_spec(cfg.W_M).times(WeightSequence.from_spec(cfg.W_N))
    rho_p = rho.normalized(cfg.normalize_below)
    notes = []

    limits = scaled_laplace_limit(f, rho_p, cfg.rays, cfg.r_grid)
    hemi = hemisphere_bound_check(f, rho_p, cfg.omega, W_A, cfg.R, cfg.theta_min, r_grid=cfg.r_grid)
    legs = {"limits": limits.all_converged, "bound": hemi.passed}
    if not limits.all_converged:
        notes.append("ray limits do not settle (or vanish) on at least one ray")
    if not hemi.passed:
        notes.append("hemisphere quantity grows under refinement")
    g = None
    direct = None
    oracle = []
    abel = None
    if legs["limits"] and legs["bound"]:
        g, res = identify_g(limits.limits, limits.rays, rho.alpha, f.cone)
        if g is None:
            notes.append(f"no degree-{rho.alpha:g} catalog element matches the ray limits (residual {res:.2e})")
            legs["oracle"] = True
        else:
            battery = default_battery(f.dim) if cfg.battery is None else cfg.battery
            direct = quasiasymptotic_direct(f, rho, battery, cfg.lam_grid)
            ok = True
            for label, phi, val in zip(direct.labels, battery, direct.limits):
                exp = pair(g, phi)
                rel = abs(val - exp) / max(abs(exp), 1e-300)
                oracle.append({"test_function": label, "direct": complex(val), "expected": complex(exp), "relative_error": rel})
                ok = ok and rel < cfg.oracle_rtol
            legs["oracle"] = bool(ok)
            abel = abelian_check(f, rho, g)
    else:
        legs["oracle"] = False
    return QuasiVerdict(
        passed=all(legs.values()),
        alpha=rho.alpha,
        g=g,
        legs=legs,
        limits=limits,
        hemisphere=hemi,
        direct=direct,
        oracle=oracle,
        abelian=abel,
        notes=notes,
    )


def run_pipeline_json(text: str) -> QuasiVerdict:
    """Pipeline from a config JSON carrying "f" and "rho"."""
    d = json.loads(text)
    if "f" not in d or "rho" not in d:
        raise UsageError('pipeline config needs "f" and "rho"')
    return tauberian_pipeline(d["f"], d["rho"], PipelineConfig.from_dict(d))
