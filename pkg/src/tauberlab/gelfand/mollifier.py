"""Smooth cutoffs η_ε = φ_ε ∗ χ of the 3ε/2-neighbourhood of a cone.

φ is the bump exp(-1/(1 - |2w|^2)) normalized to unit mass on B(0, 1/2),
φ_ε(w) = ε^{-n} φ(w/ε), and χ is the indicator of Γ + B(0, 3ε/2). Then
η_ε = 1 on Γ + B(0, ε) and η_ε = 0 off Γ + B(0, 2ε); those regions are
short-circuited exactly and only the transition layer is integrated.

In one dimension η_ε and its derivatives are closed forms in the bump and its
antiderivative. In two dimensions derivatives are moved onto the indicator
and become integrals over the boundary of Γ + B(0, 3ε/2), and η_ε itself is
recovered by integrating its gradient along the outward normal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize, minimize_scalar

from ..cones import Cone
from ..errors import CapabilityError, DomainError, ResolutionError
from ..report import BoundReport, stable
from ..weights import RSequence, WeightSequence
from .testfunctions import BUMP_MAX_ORDER, TestFunction, bump_profile_deriv, multi_indices

PATH_NODES = 40
# boundary nodes by derivative order of the bump (spectral convergence, ~1e-10)
BOUNDARY_NODES = {0: 56, 1: 72, 2: 96, 3: 128}
BOUNDARY_NODES_MAX = 160
CDF_NODES = 64


@lru_cache(maxsize=None)
def _bump_mass(dim: int) -> float:
    """∫ exp(-1/(1 - |2w|^2)) over B(0, 1/2)."""
    prof = lambda r: math.exp(-1.0 / (1.0 - r * r)) if r < 1 else 0.0
    if dim == 1:
        return quad(prof, -1, 1, epsabs=0, epsrel=1e-13)[0] / 2
    return 2 * math.pi * quad(lambda r: r * prof(r), 0, 1, epsabs=0, epsrel=1e-13)[0] / 4


def base_bump_deriv(alpha, w):
    """Derivatives of the unit-mass base bump φ on B(0, 1/2)."""
    w = np.asarray(w, dtype=float)
    k = sum(alpha)
    return 2.0**k * bump_profile_deriv(alpha, 2.0 * w) / _bump_mass(w.shape[-1])


def _bump_cdf(s):
    """∫_{-1/2}^{s} φ for the 1-D base bump, s in [-1/2, 1/2]."""
    x, wts = np.polynomial.legendre.leggauss(CDF_NODES)
    s = np.asarray(s, dtype=float)
    half = (s + 0.5) / 2
    nodes = -0.5 + half[..., None] * (x + 1)
    vals = base_bump_deriv((0,), nodes[..., None])
    return np.clip(np.sum(vals * wts, axis=-1) * half, 0.0, 1.0)


@dataclass(eq=False)
class Mollifier(TestFunction):
    """η_ε for a cone, with values sampled on a regular grid."""

    cone: Cone
    eps: float
    lo: np.ndarray
    hi: np.ndarray
    spacing: float
    grid_points: np.ndarray = field(repr=False, default=None)
    grid_values: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        self.dim = self.cone.dim
        self.max_order = BUMP_MAX_ORDER[self.dim]

    # regions -----------------------------------------------------------

    def regions(self, xi):
        """(plateau, outside) masks from the exact distance to Γ."""
        d = self.cone.distance(xi)
        return d <= self.eps, d >= 2 * self.eps

    def support_hint(self):
        return np.zeros(self.dim), max(1.0, 4 * self.eps), False

    # evaluation ----------------------------------------------------------

    def _deriv(self, alpha, xi):
        shape = xi.shape[:-1]
        flat = xi.reshape(-1, self.dim)
        plateau, outside = self.regions(flat)
        out = np.zeros(flat.shape[0])
        if sum(alpha) == 0:
            out[plateau] = 1.0
        mid = ~(plateau | outside)
        if np.any(mid):
            if self.dim == 1:
                out[mid] = self._layer_1d(alpha[0], flat[mid, 0])
            else:
                out[mid] = self.layer_derivs([alpha], flat[mid])[0]
        return out.reshape(shape)

    def _layer_1d(self, k, x):
        # orient so that Γ = [0, ∞)
        g = self.cone.generators[0, 0] if self.cone.kind == "polyhedral" else 1.0
        sgn = 1.0 if g > 0 else -1.0
        s = np.clip((sgn * x + 1.5 * self.eps) / self.eps, -0.5, 0.5)
        if k == 0:
            return _bump_cdf(s)
        return sgn**k * self.eps ** (-k) * base_bump_deriv((k - 1,), s[:, None])

    def layer_derivs(self, alphas, xi):
        """2-D layer values; α = 0 by area quadrature, |α| >= 1 on the boundary.

        For K = Γ + B(0, 3ε/2) with outward normal ν, ∂_j 1_K = -ν_j dS, so
        ∂^α η = -∫_{∂K} ∂^{α - e_j} φ_ε(ξ - x) ν_j(x) dS(x). The boundary
        consists of two offset rays and an arc, each parametrized exactly.
        """
        out = []
        pieces = {}
        for alpha in alphas:
            if sum(alpha) == 0:
                out.append(self._path_value(xi))
                continue
            j = 0 if alpha[0] > 0 else 1
            lower = (alpha[0] - (j == 0), alpha[1] - (j == 1))
            count = _boundary_count(sum(lower))
            if count not in pieces:
                pieces[count] = self._boundary_nodes(xi, count)
            total = np.zeros(xi.shape[0])
            for x, nu, wts in pieces[count]:
                vals = base_bump_deriv(lower, (xi[:, None, :] - x) / self.eps)
                total -= np.sum(vals * nu[..., j] * wts, axis=-1)
            out.append(total * self.eps ** (-2 - sum(lower)))
        return out

    def _path_value(self, xi):
        """η(ξ) = -∫_0^L ∇η(ξ + s n) . n ds along the outward normal n.

        The distance to Γ grows at unit rate along n, so the path ends on the
        set {d = 2ε} where η vanishes to infinite order.
        """
        proj = self.cone.project(xi)
        d = np.linalg.norm(xi - proj, axis=1)
        n = (xi - proj) / d[:, None]
        length = 2 * self.eps - d
        t, w = np.polynomial.legendre.leggauss(PATH_NODES)
        s = (t + 1)[None, :] * (length / 2)[:, None]
        pts = (xi[:, None, :] + s[..., None] * n[:, None, :]).reshape(-1, 2)
        gx, gy = self.layer_derivs([(1, 0), (0, 1)], pts)
        slope = (gx * np.repeat(n[:, 0], PATH_NODES) + gy * np.repeat(n[:, 1], PATH_NODES)).reshape(xi.shape[0], -1)
        return np.clip(-np.sum(slope * w, axis=1) * length / 2, 0.0, 1.0)

    def _boundary_nodes(self, xi, count):
        """Quadrature nodes on ∂K ∩ B(ξ, ε/2): list of (points, normals, weights)."""
        r, rho = 1.5 * self.eps, 0.5 * self.eps
        t, w = np.polynomial.legendre.leggauss(count)
        gens = _planar_generators(self.cone)
        g1, g2 = _extreme_pair(gens)
        pieces = []
        outward = []
        for g, other in ((g1, g2), (g2, g1)):
            o = np.array([-g[1], g[0]])
            if o @ other > 0:
                o = -o
            outward.append(o)
            base = xi - r * o
            tc, q = base @ g, base @ o
            half = np.sqrt(np.maximum(rho * rho - q * q, 0.0))
            lo, hi = np.maximum(tc - half, 0.0), np.maximum(tc + half, 0.0)
            mid, hw = (lo + hi) / 2, (hi - lo) / 2
            s = mid[:, None] + hw[:, None] * t
            x = s[..., None] * g + r * o
            pieces.append((x, np.broadcast_to(o, x.shape), hw[:, None] * w))
        # arc of radius r from outward[0] to outward[1] through the exterior
        th1, th2 = (math.atan2(o[1], o[0]) for o in outward)
        span = (th2 - th1) % (2 * math.pi)
        if span > math.pi:
            th1, span = th2, 2 * math.pi - span
        nrm = np.linalg.norm(xi, axis=1)
        kappa = (nrm**2 + r * r - rho * rho) / (2 * r * np.maximum(nrm, 1e-300))
        half = np.arccos(np.clip(kappa, -1.0, 1.0))
        phi = (np.arctan2(xi[:, 1], xi[:, 0]) - th1) % (2 * math.pi)
        for shift in (0.0, -2 * math.pi):
            lo = np.clip(phi + shift - half, 0.0, span)
            hi = np.clip(phi + shift + half, 0.0, span)
            mid, hw = (lo + hi) / 2, (hi - lo) / 2
            th = th1 + mid[:, None] + hw[:, None] * t
            u = np.stack([np.cos(th), np.sin(th)], axis=-1)
            pieces.append((r * u, u, r * hw[:, None] * w))
        return pieces

    def derivs(self, alphas, pts):
        """∂^α η at pts for every α in ``alphas`` (list of arrays)."""
        alphas = [tuple(a) for a in alphas]
        if self.dim == 1:
            return [self.deriv(a, pts) for a in alphas]
        pts = np.asarray(pts, dtype=float)
        plateau, outside = self.regions(pts)
        mid = ~(plateau | outside)
        res = [np.where(plateau, 1.0, 0.0) if sum(a) == 0 else np.zeros(pts.shape[0]) for a in alphas]
        if np.any(mid):
            for r, v in zip(res, self.layer_derivs(alphas, pts[mid])):
                r[mid] = v
        return res


def _planar_generators(cone: Cone) -> np.ndarray:
    if cone.kind == "orthant":
        return np.eye(2)
    if cone.kind == "lorentz":
        return np.array([[-1.0, 1.0], [1.0, 1.0]]) / math.sqrt(2)
    g = cone.generators
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _boundary_count(order: int) -> int:
    return BOUNDARY_NODES.get(order, BOUNDARY_NODES_MAX)


def _extreme_pair(gens: np.ndarray):
    """The two generators spanning the widest angle (the wedge's edges)."""
    best, pair = -2.0, (gens[0], gens[-1])
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            c = float(gens[i] @ gens[j])
            if -c > best:
                best, pair = -c, (gens[i], gens[j])
    return pair


def _planar_normals(cone: Cone) -> np.ndarray:
    if cone.kind == "lorentz":
        return np.array([[1.0, 1.0], [-1.0, 1.0]]) / math.sqrt(2)
    return cone.facet_normals


def _grid_axes(lo, hi, spacing):
    return [np.arange(l, h + spacing / 2, spacing) for l, h in zip(lo, hi)]


def _grid(lo, hi, spacing):
    axes = _grid_axes(lo, hi, spacing)
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def build_mollifier(cone: Cone, eps: float, grid: dict | None = None) -> Mollifier:
    """Sample η_ε on a box; ``grid`` has optional keys lo, hi, spacing.

    The default box is [-4ε, 4ε]^n with spacing ε/8.
    """
    if not eps > 0:
        raise DomainError("ε must be positive")
    if cone.dim > 2:
        raise CapabilityError("mollifiers are available in dimensions 1 and 2")
    grid = dict(grid or {})
    n = cone.dim
    lo = np.broadcast_to(np.asarray(grid.get("lo", -4 * eps), dtype=float), (n,)).copy()
    hi = np.broadcast_to(np.asarray(grid.get("hi", 4 * eps), dtype=float), (n,)).copy()
    spacing = float(grid.get("spacing", eps / 8))
    if not spacing > 0:
        raise DomainError("grid spacing must be positive")
    if spacing > eps / 8:
        raise ResolutionError(f"spacing {spacing} cannot resolve the transition layer (need <= ε/8 = {eps / 8})")
    eta = Mollifier(cone, float(eps), lo, hi, spacing)
    pts = _grid(lo, hi, spacing)
    eta.grid_points = pts
    eta.grid_values = eta(pts)
    return eta


def check_invariants(eta: Mollifier, points=None) -> dict:
    """Counts of violated range/plateau/support predicates (all zero when sound)."""
    pts = eta.grid_points if points is None else np.asarray(points, dtype=float)
    vals = eta.grid_values if points is None else eta(pts)
    plateau, outside = eta.regions(pts)
    return {
        "range": int(np.sum((vals < 0) | (vals > 1))),
        "plateau": int(np.sum(plateau & (vals != 1.0))),
        "support": int(np.sum(outside & (vals != 0.0))),
        "points": int(pts.shape[0]),
    }


def _polish(eta: Mollifier, alpha, x0, radius):
    """Local maximization of |∂^α η| within ``radius`` of a grid argmax."""
    lo, hi = x0 - radius, x0 + radius

    def neg(x):
        x = np.clip(np.atleast_1d(x), lo, hi)
        return -abs(float(eta.deriv(alpha, x)))

    if eta.dim == 1:
        res = minimize_scalar(neg, bounds=(lo[0], hi[0]), method="bounded", options={"xatol": 1e-10 * max(1.0, radius)})
        x = np.atleast_1d(res.x)
    else:
        res = minimize(neg, x0, method="Nelder-Mead", options={"xatol": 1e-9 * radius, "fatol": 1e-14, "maxiter": 400})
        x = np.clip(res.x, lo, hi)
    val = -neg(x)
    return (val, x) if val > abs(float(eta.deriv(alpha, x0))) else (abs(float(eta.deriv(alpha, x0))), x0)


def _order_maxima(eta: Mollifier, pts, k_max, log_den, spacing):
    """Per-order max of log|∂^α η| - log(L_|α| M_|α|) and the per-point max.

    Grid maxima are polished locally, so the per-order values do not depend on
    where the grid happens to fall relative to derivative peaks.
    """
    per_order, per_point, arg = {}, np.full(pts.shape[0], -np.inf), {}
    alphas = multi_indices(eta.dim, k_max)
    for alpha, d in zip(alphas, eta.derivs(alphas, pts)):
        with np.errstate(divide="ignore"):
            v = np.log(np.abs(d)) - log_den[sum(alpha)]
        per_point = np.maximum(per_point, v)
        i = int(np.argmax(v))
        if not np.isfinite(v[i]):
            continue
        val, x = _polish(eta, alpha, pts[i], spacing)
        best = math.log(val) - log_den[sum(alpha)]
        k = sum(alpha)
        if best > per_order.get(k, -np.inf):
            per_order[k] = best
            arg[k] = (alpha, np.asarray(x).tolist())
    return per_order, per_point, arg


def mollifier_check(
    eta: Mollifier, W_M: WeightSequence, R=None, k_max: int = 3, spacing: float | None = None
) -> BoundReport:
    """Fit H = max_{|α| <= k_max, grid} |∂^α η(ξ)| / (L_α M_α).

    Derivatives are evaluated exactly, so the check grid may differ from the
    sample grid (default: the sample grid in 2-D, ε/256 in 1-D) and each
    per-order maximum is polished by local optimization.
    The constant is refitted at half the spacing for the stability flag.
    """
    R = RSequence.beurling() if R is None else RSequence.from_spec(R)
    if k_max > eta.max_order:
        raise CapabilityError(f"k_max = {k_max} exceeds the available derivative order {eta.max_order}")
    log_den = R.log_cumulative(k_max) + W_M.extended(max(k_max, 1)).log_values[: k_max + 1]
    if spacing is None:
        spacing = eta.spacing if eta.dim == 2 else min(eta.spacing, eta.eps / 256)
    pts = _grid(eta.lo, eta.hi, spacing)
    per_order, per_point, arg = _order_maxima(eta, pts, k_max, log_den, spacing)
    log_h = max(per_order.values())
    fine = _grid(eta.lo, eta.hi, spacing / 2)
    fine_order, _, _ = _order_maxima(eta, fine, k_max, log_den, spacing / 2)
    log_h_fine = max(fine_order.values())
    worst = max(arg.items(), key=lambda kv: per_order[kv[0]])
    inv = check_invariants(eta)
    return BoundReport(
        "mollifier-derivatives",
        log_h,
        bool(np.isfinite(log_h)) and not any(v for k, v in inv.items() if k != "points"),
        stable(log_h, log_h_fine),
        0.0,
        {"alpha": list(worst[1][0]), "xi": worst[1][1]},
        {"lo": eta.lo.tolist(), "hi": eta.hi.tolist(), "spacing": spacing, "refined_log_constant": log_h_fine},
        {
            "cone": eta.cone.to_dict(),
            "eps": eta.eps,
            "weights": W_M.to_dict(),
            "r": R.to_dict(),
            "k_max": k_max,
            "per_order_log": {str(k): float(v) for k, v in sorted(per_order.items())},
            "invariants": inv,
        },
        per_point - log_h,
        pts,
        ["finite-order surrogate: only |α| <= k_max and a single (ℓ_p) are checked"],
    )
