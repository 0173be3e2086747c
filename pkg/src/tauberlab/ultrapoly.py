"""Ultrapolynomials ∏(1 + w/(l_p m_p)) and their cone-adapted products.

The infinite product is split at an index P chosen so that every remaining
root exceeds the evaluation radius by a wide margin. The head is multiplied
out in log space; the tail is summed as
log ∏_{p>P}(1 + w/q_p) = Σ_k (-1)^{k+1} S_k w^k / k with S_k = Σ_{p>P} q_p^{-k},
which is exact up to a certified remainder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import zeta

from .bounds import TubeGrid
from .cones import DEFAULT_SEED, Cone
from .errors import (
    DivergentProductError,
    DomainError,
    InvariantViolation,
    SolidityError,
    TruncationError,
)
from .laplace import tube_distance
from .report import BoundReport, stable
from .weights import MAX_DEPTH, RSequence, WeightSequence, check_conditions, scaled_associated

# every tail root is at least this many disc radii away
ROOT_MARGIN = 64.0
REMAINDER_TOL = 1e-13
CHUNK = 2048


def _log_roots(W: WeightSequence, R: RSequence, depth: int) -> np.ndarray:
    """log(l_p m_p) for p = 1..depth."""
    W = W.extended(depth)
    return W.log_ratios[:depth] + R.log_ell(depth)


def _tail_sums(W, R, P: int, K: int):
    """S_k = Σ_{p>P} (l_p m_p)^{-k}, k = 1..K, and how they were obtained."""
    ks = np.arange(1, K + 1, dtype=float)
    if W.spec.get("kind") == "gevrey" and R.is_beurling:
        s = W.spec["s"]
        return zeta(ks * s, P + 1.0) / R.ell**ks, "hurwitz-zeta"
    depth = min(MAX_DEPTH, max(64 * P, 4096))
    if W.generator is None and depth > W.depth:
        depth = W.depth
    if depth <= 2 * P:
        raise TruncationError(f"sequence too short to estimate the product tail beyond index {P}")
    lq = _log_roots(W, R, depth)[P:]
    sums = np.array([np.sum(np.exp(-k * lq)) for k in ks])
    # power-law continuation q_p ~ C p^s fitted on the last octave
    d2 = depth // 2
    lq_all = _log_roots(W, R, depth)
    s_fit = (lq_all[depth - 1] - lq_all[d2 - 1]) / math.log(depth / d2)
    if s_fit <= 1.0:
        raise DivergentProductError(f"roots grow like p^{s_fit:.3f}; the product tail diverges")
    log_c = lq_all[depth - 1] - s_fit * math.log(depth)
    rem = np.exp((1 - ks * s_fit) * math.log(depth) - ks * log_c) / (ks * s_fit - 1)
    return sums + rem, "power-law-continuation"


@dataclass(frozen=True, eq=False)
class Ultrapolynomial:
    """P̃(w) = ∏_p (1 + w/(l_p m_p)) on the disc |w| <= radius."""

    log_head: np.ndarray
    tail: np.ndarray
    radius: float
    tail_bound: float
    meta: dict = field(default_factory=dict)
    skip: tuple = ()

    @property
    def P(self) -> int:
        return int(self.log_head.size)

    def log_value(self, w) -> np.ndarray:
        """A branch of log P̃(w); its real part is log|P̃(w)|."""
        w = np.asarray(w, dtype=complex)
        if np.any(np.abs(w) > self.radius * (1 + 1e-12)):
            raise DomainError(f"|w| exceeds the certified radius {self.radius:g}")
        flat = w.reshape(-1)
        q = np.exp(self.log_head)
        keep = np.ones(q.size, dtype=bool)
        for p in self.skip:
            keep[p - 1] = False
        q = q[keep]
        out = np.empty(flat.shape, dtype=complex)
        for i in range(0, flat.size, CHUNK):
            blk = flat[i : i + CHUNK]
            out[i : i + CHUNK] = np.sum(np.log1p(blk[:, None] / q[None, :]), axis=1)
        # alternating power series of the tail, Horner form
        series = np.zeros_like(flat)
        for k in range(self.tail.size, 0, -1):
            series = series * flat + ((-1) ** (k + 1)) * self.tail[k - 1] / k
        out += series * flat
        return out.reshape(w.shape)

    def __call__(self, w):
        v = np.exp(self.log_value(w))
        return complex(v) if np.ndim(v) == 0 else v

    def log_abs(self, w) -> np.ndarray:
        return np.real(self.log_value(w))

    def without_factor(self, p: int) -> "Ultrapolynomial":
        """The same product with the p-th factor removed (a deliberately broken P)."""
        if not 1 <= p <= self.P:
            raise DomainError(f"factor index must lie in 1..{self.P}")
        return Ultrapolynomial(self.log_head, self.tail, self.radius, self.tail_bound, dict(self.meta), self.skip + (p,))

    def to_dict(self) -> dict:
        return {
            "kind": "tilde",
            "P": self.P,
            "radius": self.radius,
            "tail_terms": int(self.tail.size),
            "tail_bound": self.tail_bound,
            "first_roots": np.exp(self.log_head[:8]).tolist(),
            "skip": list(self.skip),
            **self.meta,
        }


def build_tilde(W_M, R, radius: float) -> Ultrapolynomial:
    """P̃ certified on |w| <= radius; needs Σ 1/m_p < ∞."""
    W = WeightSequence.from_spec(W_M)
    R = RSequence.from_spec(R)
    if not radius > 0:
        raise DomainError("radius must be positive")
    if not check_conditions(W)["M.3'"]:
        raise DivergentProductError("Σ 1/m_p diverges on the checked range: the product does not converge")
    target = math.log(ROOT_MARGIN * radius)
    depth = 64
    while True:
        lq = _log_roots(W, R, depth)
        if lq[-1] >= target:
            break
        if depth >= MAX_DEPTH or (W.generator is None and depth >= W.depth):
            raise TruncationError(f"roots stay below {ROOT_MARGIN * radius:g} up to index {depth}")
        depth = min(2 * depth, MAX_DEPTH if W.generator is not None else W.depth)
    P = int(np.searchsorted(lq, target))  # q_{P+1} >= margin * radius
    rho = radius / math.exp(lq[P])
    s1, method = _tail_sums(W, R, P, 1)
    K = 1
    while radius * s1[0] * rho**K / (1 - rho) >= REMAINDER_TOL and K < 64:
        K += 1
    sums, method = _tail_sums(W, R, P, K)
    bound = float(radius * sums[0] * rho**K / (1 - rho))
    meta = {"M": W.to_dict(), "R": R.to_dict(), "tail_method": method}
    return Ultrapolynomial(lq[:P].copy(), np.asarray(sums, dtype=float), float(radius), bound, meta)


def gevrey2_closed_form(w, ell: float = 1.0):
    """∏(1 + w/(l p²)) = sinh(π√(w/l)) / (π√(w/l)), reference values."""
    w = np.asarray(w, dtype=complex) / ell
    s = np.pi * np.sqrt(w)
    small = np.abs(s) < 1e-4
    safe = np.where(small, 1.0, s)
    return np.where(small, 1 + s**2 / 6, np.sinh(safe) / safe)


# cone products -------------------------------------------------------------------


def interior_basis(cone: Cone) -> np.ndarray:
    """Rows e_1..e_n spanning R^n, each strictly inside Γ.

    The coordinate axes of an orthant sit on its boundary, which would make
    min_j |e_j·z| vanish along the axes of C, so only n = 1 uses them.
    """
    n = cone.dim
    if not cone.is_solid:
        raise SolidityError("cone has empty interior: no interior basis exists")
    if cone.kind == "orthant" and n == 1:
        return np.eye(1)
    w = cone.interior_witness()
    if cone.kind == "orthant":
        E = np.array([w + 0.5 * np.eye(n)[j] for j in range(n)])
    elif cone.kind == "lorentz":
        rows = [w + 0.5 * np.eye(n)[j] for j in range(n - 1)] + [w]
        E = np.array(rows)
    else:
        g = cone.generators / np.linalg.norm(cone.generators, axis=1, keepdims=True)
        rows = []
        for gj in g:
            cand = w + 0.5 * (gj - w)
            if np.linalg.matrix_rank(np.array(rows + [cand]), tol=1e-10) == len(rows) + 1:
                rows.append(cand)
            if len(rows) == n:
                break
        if len(rows) < n:
            raise SolidityError("could not find n independent interior directions")
        E = np.array(rows)
    E = E / np.linalg.norm(E, axis=1, keepdims=True)
    if np.any(cone.boundary_distance(E) <= 0):
        raise SolidityError("basis vector fell on the cone boundary")
    return E


def _lambda(cone: Cone, E: np.ndarray, samples: int = 4096) -> dict:
    """λ with |z| <= √n λ max_j |e_j·z| on T^C, and the sampled value on C."""
    rng = np.random.default_rng(DEFAULT_SEED)
    y = cone.sample_dual_interior(rng, samples)
    y = y / np.linalg.norm(y, axis=1, keepdims=True)
    sampled = float(np.max(1.0 / np.min(np.abs(y @ E.T), axis=1))) * 1.1
    # |z| <= ||E^{-1}|| |E z| <= ||E^{-1}|| √n max_j |e_j·z| for complex z
    inverse = float(np.linalg.norm(np.linalg.inv(E), 2))
    return {"lambda": max(sampled, inverse), "sampled_on_C": sampled, "inverse_norm": inverse}


@dataclass(frozen=True, eq=False)
class ConeUltrapolynomial:
    """P(z) = ∏_j P̃(-λ √n i e_j·z) on |z| <= z_radius."""

    tilde: Ultrapolynomial
    cone: Cone
    basis: np.ndarray
    lam: float
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.cone.dim

    @property
    def z_radius(self) -> float:
        return self.tilde.radius / (self.lam * math.sqrt(self.dim))

    def _args(self, z):
        z = np.asarray(z, dtype=complex)
        if self.dim == 1 and (z.ndim == 0 or z.shape[-1] != 1):
            z = z[..., None]
        return -1j * self.lam * math.sqrt(self.dim) * (z @ self.basis.T)

    def log_value(self, z) -> np.ndarray:
        return np.sum(self.tilde.log_value(self._args(z)), axis=-1)

    def log_abs(self, z) -> np.ndarray:
        return np.real(self.log_value(z))

    def __call__(self, z):
        v = np.exp(self.log_value(z))
        return complex(v) if np.ndim(v) == 0 else v

    def without_factor(self, p: int) -> "ConeUltrapolynomial":
        return ConeUltrapolynomial(self.tilde.without_factor(p), self.cone, self.basis, self.lam, dict(self.meta))

    def to_dict(self) -> dict:
        return {
            "kind": "cone",
            "cone": self.cone.to_dict(),
            "basis": self.basis.tolist(),
            "lambda": self.lam,
            "z_radius": self.z_radius,
            "tilde": self.tilde.to_dict(),
            **self.meta,
        }


def build_cone_poly(W_M, R, cone: Cone, z_radius: float = 2.5e3, lam: float | None = None, basis=None) -> ConeUltrapolynomial:
    """Cone-adapted product certified for |z| <= z_radius."""
    E = interior_basis(cone) if basis is None else np.asarray(basis, dtype=float).reshape(cone.dim, cone.dim)
    if abs(np.linalg.det(E)) < 1e-12:
        raise SolidityError("basis is singular")
    lam_info = _lambda(cone, E)
    lam = lam_info["lambda"] if lam is None else float(lam)
    radius = lam * math.sqrt(cone.dim) * z_radius * float(np.max(np.linalg.norm(E, axis=1)))
    tilde = build_tilde(W_M, R, radius)
    return ConeUltrapolynomial(tilde, cone, E, lam, {"lambda_candidates": lam_info})


@dataclass(frozen=True, eq=False)
class ProductUltrapolynomial:
    factors: tuple

    def __post_init__(self):
        if len({f.cone.dim for f in self.factors}) != 1:
            raise DomainError("factors live in different dimensions")

    @property
    def cone(self) -> Cone:
        return self.factors[0].cone

    @property
    def dim(self) -> int:
        return self.cone.dim

    @property
    def z_radius(self) -> float:
        return min(f.z_radius for f in self.factors)

    def log_value(self, z):
        return sum(f.log_value(z) for f in self.factors)

    def log_abs(self, z):
        return np.real(self.log_value(z))

    def __call__(self, z):
        v = np.exp(self.log_value(z))
        return complex(v) if np.ndim(v) == 0 else v

    def to_dict(self) -> dict:
        return {"kind": "product", "factors": [f.to_dict() for f in self.factors]}


def product(*polys) -> ProductUltrapolynomial:
    flat = []
    for p in polys:
        flat.extend(p.factors if isinstance(p, ProductUltrapolynomial) else [p])
    return ProductUltrapolynomial(tuple(flat))


# sandwich ---------------------------------------------------------------------------


def sandwich_grid(cone: Cone, r_min: float = 0.1, r_max: float = 1e3, radii: int = 40, angles: int = 25) -> np.ndarray:
    """z = r(cos θ u + i sin θ y) for r log-spaced, θ in (0, π) open, u and y
    unit directions (u = ±1 and y = 1 in one dimension)."""
    r = np.logspace(math.log10(r_min), math.log10(r_max), radii)
    th = np.pi * (np.arange(angles) + 0.5) / angles
    if cone.dim == 1:
        w = np.cos(th) + 1j * np.sin(th)
        return (r[:, None] * w[None, :]).reshape(-1, 1)
    grid = TubeGrid(cone)
    yd = np.asarray(grid.y_dirs)
    xd = np.asarray(grid.x_dirs)
    half = th[th < np.pi / 2]
    pts = []
    for y in yd:
        for u in xd:
            for t in half:
                pts.append(np.cos(t) * u + 1j * np.sin(t) * y)
    w = np.array(pts)
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    return (r[:, None, None] * w[None, :, :]).reshape(-1, cone.dim)


UPPER_L_GRID = tuple(2.0 ** (k / 4) for k in range(0, 33))


def verify_sandwich(P, W_M, R, z_grid=None) -> BoundReport:
    """Exact lower bound e^{M_l(|z|)} <= |P(z)| and a fitted upper bound
    |P(z)| <= L' e^{M_l(L|z|)}.

    The upper pair is the smallest L on a 2^{1/4} ladder whose L' is stable
    when the grid is extended to twice the radius and doubled in density.
    """
    W = WeightSequence.from_spec(W_M)
    R = RSequence.from_spec(R)
    z = sandwich_grid(P.cone) if z_grid is None else np.asarray(z_grid, dtype=complex).reshape(-1, P.dim)
    tube_distance(P.cone, z)
    mod = np.linalg.norm(z, axis=1)
    if mod.max() * 2 > P.z_radius:
        raise DomainError(f"grid reaches |z| = {mod.max():g}; P is certified to {P.z_radius:g} and refinement needs twice that")
    log_p = P.log_abs(z)
    log_m = scaled_associated(W, R, mod)
    res = log_m - log_p
    tol = 1e-10 * np.maximum(1.0, np.abs(log_m))
    i = int(np.argmax(res - tol))
    if res[i] > tol[i]:
        raise InvariantViolation(
            f"lower bound fails by {res[i]:.3e} (log scale)", witness={"z": z[i].tolist(), "log|P|": float(log_p[i]), "M": float(log_m[i])}
        )
    z_ref = np.vstack([z, 2 * z, z * np.exp(0.5j * math.pi / 25)])
    z_ref = z_ref[P.cone.dual_distance(z_ref.imag) > 0]
    log_p_ref = P.log_abs(z_ref)
    mod_ref = np.linalg.norm(z_ref, axis=1)
    chosen = None
    for L in UPPER_L_GRID:
        a = float(np.max(log_p - scaled_associated(W, R, L * mod)))
        b = float(np.max(log_p_ref - scaled_associated(W, R, L * mod_ref)))
        if stable(a, b):
            chosen = (L, a, b)
            break
    passed = chosen is not None
    L, log_lp, log_lp_ref = chosen if passed else (math.inf, math.inf, math.inf)
    upper_res = log_p - scaled_associated(W, R, L * mod) - log_lp if passed else None
    lower = BoundReport(
        "ultrapolynomial-lower",
        0.0,
        passed=True,
        worst_residual=float(res[i]),
        worst_point=z[i].tolist(),
        residuals=res,
        points=z,
        notes=["between samples the bound rests on monotonicity of each factor along rays"],
    )
    upper = BoundReport(
        "ultrapolynomial-upper",
        log_lp,
        passed=passed,
        refinement_stable=passed,
        residuals=upper_res,
        points=z,
        parameters={"L": L, "refined_log_constant": log_lp_ref},
    )
    return BoundReport(
        "ultrapolynomial-sandwich",
        log_lp,
        passed=passed,
        refinement_stable=passed,
        worst_residual=float(res[i]),
        worst_point=z[i].tolist(),
        grid={"points": int(len(z)), "r_range": [float(mod.min()), float(mod.max())]},
        parameters={"M": W.to_dict(), "R": R.to_dict(), "L": L, "log_L_prime": log_lp, "P": P.to_dict()},
        parts={"lower": lower, "upper": upper},
    )
