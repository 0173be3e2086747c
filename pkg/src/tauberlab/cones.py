"""Closed convex acute cones: membership, conjugates, and boundary distances.

Three exactly representable families are supported: the nonnegative orthant,
the Lorentz (ice-cream) cone {x_n >= |x'|}, and polyhedral cones given by
generators in dimension <= 4. All distances are Euclidean.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .errors import AcutenessError, CapabilityError, DomainError, InvariantViolation, UsageError
from .report import BoundReport

DEFAULT_SEED = int.from_bytes(b"C0NE", "big")
TOL = 1e-12


def _normalize_rays(rays: np.ndarray) -> np.ndarray:
    rays = rays / np.max(np.abs(rays), axis=1, keepdims=True)
    rays = np.where(np.abs(rays) < 1e-14, 0.0, rays)
    order = np.lexsort(rays.T[::-1])
    return rays[order]


def _dedupe_rays(rays):
    out = []
    for r in rays:
        u = r / np.linalg.norm(r)
        if not any(np.allclose(u, v / np.linalg.norm(v), atol=1e-10) for v in out):
            out.append(r)
    return np.array(out)


def _extreme_rays(normals: np.ndarray) -> np.ndarray:
    """Extreme rays of {y : normals @ y >= 0} by (n-1)-subset enumeration."""
    m, n = normals.shape
    if n == 1:
        rays = [r for r in (np.array([1.0]), np.array([-1.0])) if np.all(normals @ r >= -TOL)]
        return np.array(rays)
    rays = []
    scale = np.linalg.norm(normals, axis=1)
    for idx in itertools.combinations(range(m), n - 1):
        sub = normals[list(idx)]
        _, s, vt = np.linalg.svd(sub)
        if np.sum(s > 1e-10) != n - 1:
            continue
        d = vt[-1]
        for cand in (d, -d):
            if np.all(normals @ cand >= -1e-10 * scale):
                rays.append(cand)
    if not rays:
        return np.zeros((0, n))
    return _dedupe_rays(rays)


@dataclass(frozen=True, eq=False)
class Cone:
    """A closed convex cone; ``kind`` is ``orthant``, ``lorentz`` or ``polyhedral``."""

    kind: str
    dim: int
    generators: np.ndarray | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.kind not in ("orthant", "lorentz", "polyhedral"):
            raise UsageError(f"unknown cone kind {self.kind!r}")
        if self.dim < 1:
            raise DomainError("cone dimension must be >= 1")
        if self.kind == "lorentz" and self.dim < 2:
            raise DomainError("Lorentz cone needs dim >= 2")
        if self.kind == "polyhedral":
            g = np.atleast_2d(np.asarray(self.generators, dtype=float))
            if g.shape[1] != self.dim:
                raise DomainError("generator length does not match dimension")
            if self.dim > 4:
                raise CapabilityError("polyhedral cones are supported up to dimension 4")
            if np.any(np.linalg.norm(g, axis=1) == 0):
                raise DomainError("zero generator")
            object.__setattr__(self, "generators", g)

    # constructors ----------------------------------------------------------

    @classmethod
    def orthant(cls, dim: int) -> "Cone":
        return cls("orthant", int(dim))

    @classmethod
    def lorentz(cls, dim: int) -> "Cone":
        return cls("lorentz", int(dim))

    @classmethod
    def polyhedral(cls, generators) -> "Cone":
        g = np.atleast_2d(np.asarray(generators, dtype=float))
        return cls("polyhedral", g.shape[1], g)

    @classmethod
    def from_spec(cls, spec) -> "Cone":
        if isinstance(spec, Cone):
            return spec
        if isinstance(spec, str):
            kind, _, arg = spec.partition(":")
            if kind in ("orthant", "lorentz") and arg.isdigit():
                return cls(kind, int(arg))
            raise UsageError(f"cannot parse cone shorthand {spec!r}")
        kind = spec.get("kind")
        if kind in ("orthant", "lorentz"):
            return cls(kind, int(spec["dim"]))
        if kind == "polyhedral":
            return cls.polyhedral(spec["generators"])
        raise UsageError(f"unknown cone kind {kind!r}")

    def to_dict(self) -> dict:
        if self.kind == "polyhedral":
            return {"kind": "polyhedral", "generators": self.generators.tolist()}
        return {"kind": self.kind, "dim": self.dim}

    def __repr__(self):
        return f"Cone({self.to_dict()})"

    # H-representation ------------------------------------------------------

    @property
    def facet_normals(self) -> np.ndarray:
        """Inward unit normals b_i with Γ = {x : b_i . x >= 0} (polyhedral and orthant)."""
        if "normals" not in self._cache:
            if self.kind == "orthant":
                nrm = np.eye(self.dim)
            elif self.kind == "polyhedral":
                nrm = _extreme_rays(self.generators)
                if nrm.shape[0] == 0 or np.linalg.matrix_rank(nrm) < self.dim:
                    raise AcutenessError("conjugate cone has empty interior (cone is not acute)")
                nrm = nrm / np.linalg.norm(nrm, axis=1, keepdims=True)
            else:
                raise CapabilityError("Lorentz cones have no finite facet list")
            self._cache["normals"] = nrm
        return self._cache["normals"]

    @property
    def is_solid(self) -> bool:
        if self.kind != "polyhedral":
            return True
        return np.linalg.matrix_rank(self.generators) == self.dim

    # operations ------------------------------------------------------------

    def conjugate(self) -> "Cone":
        """Γ* = {y : y . u >= 0 for all u in Γ}, same family, with an interior witness."""
        if self.kind in ("orthant", "lorentz"):
            return self
        if "conj" not in self._cache:
            rays = _extreme_rays(self.generators)
            if rays.shape[0] == 0 or np.linalg.matrix_rank(rays) < self.dim:
                raise AcutenessError("conjugate cone has empty interior (cone is not acute)")
            dual = Cone.polyhedral(_normalize_rays(rays))
            # Γ is recovered as the conjugate of the dual
            dual._cache["conj"] = self
            self._cache["conj"] = dual
        return self._cache["conj"]

    def interior_witness(self) -> np.ndarray:
        """A unit vector in the interior of this cone."""
        if self.kind == "orthant":
            w = np.ones(self.dim)
        elif self.kind == "lorentz":
            w = np.zeros(self.dim)
            w[-1] = 1.0
        else:
            if not self.is_solid:
                raise AcutenessError("cone has empty interior")
            g = self.generators / np.linalg.norm(self.generators, axis=1, keepdims=True)
            w = g.sum(axis=0)
        return w / np.linalg.norm(w)

    def dual_witness(self) -> np.ndarray:
        """A unit vector in C = int Γ*."""
        return self.conjugate().interior_witness()

    def project(self, x) -> np.ndarray:
        """Euclidean projection onto the cone; x has shape (..., n)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "orthant":
            return np.maximum(x, 0.0)
        if self.kind == "lorentz":
            xp, t = x[..., :-1], x[..., -1]
            r = np.linalg.norm(xp, axis=-1)
            out = np.zeros_like(x)
            inside = r <= t
            out[inside] = x[inside]
            mid = (~inside) & (r > -t)
            if np.any(mid):
                a = (r[mid] + t[mid]) / 2
                out[mid, :-1] = xp[mid] * (a / r[mid])[:, None]
                out[mid, -1] = a
            return out
        if self.dim <= 2:
            return self._project_planar(x)
        flat = x.reshape(-1, self.dim)
        G = self.generators.T
        res = np.empty_like(flat)
        for i, v in enumerate(flat):
            lam, _ = nnls(G, v)
            res[i] = G @ lam
        return res.reshape(x.shape)

    def _project_planar(self, x):
        # outside a planar pointed cone the nearest point lies on a generator ray
        g = self.generators / np.linalg.norm(self.generators, axis=1, keepdims=True)
        inside = np.all(x @ self.facet_normals.T >= 0, axis=-1)
        coef = np.maximum(x @ g.T, 0.0)
        cands = coef[..., :, None] * g
        d = np.linalg.norm(x[..., None, :] - cands, axis=-1)
        best = np.take_along_axis(cands, np.argmin(d, axis=-1)[..., None, None], axis=-2)[..., 0, :]
        return np.where(inside[..., None], x, best)

    def distance(self, x) -> np.ndarray:
        """Euclidean distance from x to Γ."""
        x = np.asarray(x, dtype=float)
        return np.linalg.norm(x - self.project(x), axis=-1)

    def contains(self, xi, eps: float = 0.0):
        """Membership in Γ + B(0, eps); eps = 0 means Γ itself (closed)."""
        if eps < 0:
            raise DomainError("eps must be nonnegative")
        xi = np.asarray(xi, dtype=float)
        d = self.distance(xi)
        scale = np.maximum(1.0, np.linalg.norm(xi, axis=-1))
        if eps == 0:
            return d <= 1e-12 * scale
        return d < eps

    def boundary_distance(self, y) -> np.ndarray:
        """d(y, ∂K) for y in int K, and 0 outside int K (this cone is K)."""
        y = np.asarray(y, dtype=float)
        if self.kind == "orthant":
            d = np.min(y, axis=-1)
        elif self.kind == "lorentz":
            d = (y[..., -1] - np.linalg.norm(y[..., :-1], axis=-1)) / math.sqrt(2.0)
        else:
            d = np.min(y @ self.facet_normals.T, axis=-1)
        return np.maximum(d, 0.0)

    def dual_distance(self, y) -> np.ndarray:
        """Δ_C(y) with C = int Γ*."""
        if self.kind == "polyhedral":
            g = self.generators / np.linalg.norm(self.generators, axis=1, keepdims=True)
            y = np.asarray(y, dtype=float)
            return np.maximum(np.min(y @ g.T, axis=-1), 0.0)
        return self.conjugate().boundary_distance(y)

    # sampling --------------------------------------------------------------

    def sample(self, rng: np.random.Generator, count: int, interior: bool = False) -> np.ndarray:
        """Random points of the cone; a tenth lie on extreme rays unless ``interior``."""
        n = self.dim
        if self.kind == "orthant":
            pts = np.abs(rng.standard_normal((count, n)))
            if not interior:
                k = count // 10
                mask = rng.random((k, n)) < 0.5
                pts[:k] = np.where(mask, 0.0, pts[:k])
        elif self.kind == "lorentz":
            xp = rng.standard_normal((count, n - 1))
            frac = rng.random(count)
            if not interior:
                frac[: count // 10] = 1.0
            else:
                frac = 0.999 * frac
            t = np.linalg.norm(xp, axis=1) / np.maximum(frac, 1e-3)
            pts = np.column_stack([xp, t])
        else:
            g = self.generators
            wts = rng.exponential(size=(count, g.shape[0]))
            if not interior:
                k = count // 10
                keep = rng.integers(0, g.shape[0], size=k)
                wts[:k] = 0.0
                wts[np.arange(k), keep] = 1.0
            pts = wts @ g
        scale = np.exp(rng.uniform(-3, 3, size=(count, 1)))
        return pts * scale

    def sample_dual_interior(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return self.conjugate().sample(rng, count, interior=True)


def conjugate(cone: Cone) -> Cone:
    return cone.conjugate()


def boundary_distance(cone: Cone, y) -> np.ndarray:
    """Δ_K(y) for the cone K passed in (pass Γ.conjugate() for Δ_C)."""
    return cone.boundary_distance(y)


def contains(cone: Cone, xi, eps: float = 0.0):
    return cone.contains(xi, eps)


def verify_dot_estimate(cone: Cone, samples: int = 10_000, seed: int = DEFAULT_SEED, tol: float = 1e-12) -> BoundReport:
    """Check y . u >= Δ_C(y) |u| on random pairs u in Γ, y in C."""
    rng = np.random.default_rng(seed)
    u = cone.sample(rng, samples)
    y = cone.sample_dual_interior(rng, samples)
    lhs = np.einsum("ij,ij->i", y, u)
    rhs = cone.dual_distance(y) * np.linalg.norm(u, axis=1)
    scale = np.maximum(1.0, np.abs(lhs))
    slack = (lhs - rhs) / scale
    i = int(np.argmin(slack))
    if slack[i] < -tol:
        raise InvariantViolation(
            f"dot estimate violated by {slack[i]:.3e}", witness={"u": u[i].tolist(), "y": y[i].tolist()}
        )
    return BoundReport(
        "dot-estimate",
        0.0,
        True,
        None,
        float(-slack[i]),
        {"u": u[i].tolist(), "y": y[i].tolist()},
        {"samples": samples, "seed": seed},
        {"cone": cone.to_dict(), "min_slack": float(slack[i])},
        -slack,
    )
