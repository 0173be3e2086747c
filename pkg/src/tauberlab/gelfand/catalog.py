"""Finite sums of point-derivative atoms and power-exponential densities.

Densities live on a simplicial cone Γ = G R^n_+ and are written in the
adapted coordinates u = G^{-1} ξ:

    f(ξ) = coef * prod_j u_j^{a_j} exp(-c_j u_j),   u >= 0,

so that ⟨f, φ⟩ = |det G| ∫_{u >= 0} f φ(G u) du. With G = I this is the
plain orthant density ξ^a e^{-c·ξ}.

JSON form::

    {"atoms": [{"kind": "point", "loc": [0], "alpha": [1], "coef": 1.0},
               {"kind": "powerexp", "a": [1.0], "c": [0.0], "coef": 1.0,
                "basis": [[1.0]]}],
     "cone": {"kind": "orthant", "dim": 1}}

``basis`` and ``cone`` are optional (identity and the orthant). Complex
coefficients are written as [re, im].
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..cones import Cone
from ..errors import CapabilityError, DomainError, UsageError


def _coef_from_json(c):
    if isinstance(c, (list, tuple)):
        return complex(c[0], c[1])
    return float(c)


def _coef_to_json(c):
    c = complex(c)
    return c.real if c.imag == 0 else [c.real, c.imag]


@dataclass(frozen=True)
class PointDerivative:
    """coef * ∂^alpha δ_loc, so that ⟨atom, φ⟩ = coef (-1)^{|alpha|} φ^{(alpha)}(loc)."""

    loc: tuple
    alpha: tuple
    coef: complex = 1.0
    closed_form: bool = True

    def __post_init__(self):
        object.__setattr__(self, "loc", tuple(float(v) for v in np.atleast_1d(self.loc)))
        object.__setattr__(self, "alpha", tuple(int(v) for v in np.atleast_1d(self.alpha)))
        if len(self.loc) != len(self.alpha):
            raise DomainError("location and multi-index lengths differ")
        if min(self.alpha) < 0:
            raise DomainError("multi-index must be nonnegative")

    @property
    def dim(self):
        return len(self.loc)

    @property
    def order(self):
        return sum(self.alpha)

    def homogeneity(self):
        """Degree d with atom(λξ) = λ^d atom(ξ), or None if not homogeneous."""
        if any(self.loc):
            return None
        return -self.dim - self.order

    def dilate(self, lam):
        scale = lam ** (-self.dim - self.order)
        return PointDerivative(tuple(np.asarray(self.loc) / lam), self.alpha, self.coef * scale)

    def scaled(self, s):
        return PointDerivative(self.loc, self.alpha, self.coef * s)

    def to_dict(self):
        return {"kind": "point", "loc": list(self.loc), "alpha": list(self.alpha), "coef": _coef_to_json(self.coef)}


@dataclass(frozen=True)
class PowerExpDensity:
    """coef * u^a exp(-c·u) on u = G^{-1} ξ >= 0."""

    a: tuple
    c: tuple
    coef: complex = 1.0
    basis: tuple | None = None
    closed_form: bool = True

    def __post_init__(self):
        a = tuple(float(v) for v in np.atleast_1d(self.a))
        c = tuple(float(v) for v in np.atleast_1d(self.c))
        if len(a) != len(c):
            raise DomainError("exponent and decay vectors differ in length")
        if min(a) <= -1:
            raise DomainError("density exponents must exceed -1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", c)
        if self.basis is not None:
            g = np.atleast_2d(np.asarray(self.basis, dtype=float))
            if g.shape != (len(a), len(a)):
                raise DomainError("basis must be square of the atom dimension")
            if abs(np.linalg.det(g)) < 1e-14:
                raise DomainError("basis is singular")
            object.__setattr__(self, "basis", tuple(map(tuple, g.tolist())))

    @property
    def dim(self):
        return len(self.a)

    @property
    def G(self) -> np.ndarray:
        return np.eye(self.dim) if self.basis is None else np.array(self.basis)

    @property
    def jacobian(self) -> float:
        return abs(float(np.linalg.det(self.G)))

    def homogeneity(self):
        if any(self.c):
            return None
        return sum(self.a)

    def density(self, xi):
        """Pointwise value at ξ (shape (..., n)); zero off the cone."""
        xi = np.asarray(xi, dtype=float)
        if self.dim == 1 and (xi.ndim == 0 or xi.shape[-1] != 1):
            xi = xi[..., None]
        u = np.linalg.solve(self.G, xi.reshape(-1, self.dim).T).T.reshape(xi.shape)
        inside = np.all(u >= 0, axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = self.coef * np.prod(np.where(u > 0, u, 1.0) ** np.asarray(self.a) * np.exp(-np.asarray(self.c) * u), axis=-1)
        zero_face = np.any((u == 0) & (np.asarray(self.a) != 0), axis=-1)
        return np.where(inside & ~zero_face, v, 0.0)

    def dilate(self, lam):
        return PowerExpDensity(
            self.a, tuple(lam * ci for ci in self.c), self.coef * lam ** sum(self.a), self.basis
        )

    def scaled(self, s):
        return PowerExpDensity(self.a, self.c, self.coef * s, self.basis)

    def to_dict(self):
        d = {"kind": "powerexp", "a": list(self.a), "c": list(self.c), "coef": _coef_to_json(self.coef)}
        if self.basis is not None:
            d["basis"] = [list(r) for r in self.basis]
        return d


def _atom_from_dict(d):
    kind = d.get("kind")
    if kind == "point":
        return PointDerivative(tuple(d["loc"]), tuple(d["alpha"]), _coef_from_json(d.get("coef", 1.0)))
    if kind == "powerexp":
        return PowerExpDensity(tuple(d["a"]), tuple(d["c"]), _coef_from_json(d.get("coef", 1.0)), d.get("basis"))
    raise UsageError(f"unknown atom kind {kind!r}")


@dataclass(frozen=True)
class CatalogElement:
    """A finite linear combination of atoms supported in ``cone``."""

    atoms: tuple
    cone: Cone = field(default=None)

    def __post_init__(self):
        atoms = tuple(self.atoms)
        if not atoms:
            raise DomainError("catalog element needs at least one atom")
        n = atoms[0].dim
        if any(a.dim != n for a in atoms):
            raise DomainError("atoms have different dimensions")
        cone = self.cone if self.cone is not None else Cone.orthant(n)
        if cone.dim != n:
            raise DomainError("cone dimension does not match atoms")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "cone", cone)
        for atom in atoms:
            if isinstance(atom, PointDerivative):
                if not cone.contains(np.array(atom.loc)):
                    raise DomainError(f"point atom at {atom.loc} lies outside the cone")
            elif not np.all(cone.contains(atom.G.T)):
                raise DomainError("density basis columns must lie in the cone")

    @property
    def dim(self) -> int:
        return self.atoms[0].dim

    @property
    def max_order(self) -> int:
        return max((a.order for a in self.atoms if isinstance(a, PointDerivative)), default=0)

    @property
    def densities_only(self) -> bool:
        return all(isinstance(a, PowerExpDensity) for a in self.atoms)

    def homogeneity(self):
        """Common degree of all atoms, or None."""
        degs = {a.homogeneity() for a in self.atoms}
        if len(degs) == 1 and None not in degs:
            return degs.pop()
        return None

    def density(self, xi):
        """Sum of the density atoms at ξ (point atoms ignored)."""
        out = 0.0
        for a in self.atoms:
            if isinstance(a, PowerExpDensity):
                out = out + a.density(xi)
        return out

    def __add__(self, other: "CatalogElement") -> "CatalogElement":
        if other.dim != self.dim:
            raise DomainError("dimension mismatch")
        return CatalogElement(self.atoms + other.atoms, self.cone)

    def __mul__(self, s) -> "CatalogElement":
        return CatalogElement(tuple(a.scaled(s) for a in self.atoms), self.cone)

    __rmul__ = __mul__

    def to_dict(self) -> dict:
        return {"atoms": [a.to_dict() for a in self.atoms], "cone": self.cone.to_dict()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d) -> "CatalogElement":
        if isinstance(d, CatalogElement):
            return d
        if isinstance(d, str):
            return named(d)
        atoms = tuple(_atom_from_dict(a) for a in d["atoms"])
        cone = Cone.from_spec(d["cone"]) if "cone" in d else None
        return cls(atoms, cone)

    @classmethod
    def from_json(cls, text: str) -> "CatalogElement":
        return cls.from_dict(json.loads(text))


def dilate(f: CatalogElement, lam: float) -> CatalogElement:
    """Catalog form of ξ -> f(λξ)."""
    if not lam > 0:
        raise DomainError("dilation factor must be positive")
    return CatalogElement(tuple(a.dilate(lam) for a in f.atoms), f.cone)


# named elements used across examples, tests and the CLI ---------------------


def delta(dim: int = 1, alpha=None) -> CatalogElement:
    alpha = (0,) * dim if alpha is None else tuple(np.atleast_1d(alpha))
    return CatalogElement((PointDerivative((0.0,) * dim, alpha, 1.0),))


def heaviside(dim: int = 1) -> CatalogElement:
    return CatalogElement((PowerExpDensity((0.0,) * dim, (0.0,) * dim),))


def power(a, c=None, coef=1.0, cone: Cone | None = None, basis=None) -> CatalogElement:
    a = tuple(np.atleast_1d(np.asarray(a, dtype=float)))
    c = (0.0,) * len(a) if c is None else tuple(np.atleast_1d(np.asarray(c, dtype=float)))
    return CatalogElement((PowerExpDensity(a, c, coef, basis),), cone)


def cone_indicator(cone: Cone) -> CatalogElement:
    """Indicator of a simplicial cone (orthant, Lorentz(2) or n generators)."""
    return CatalogElement((PowerExpDensity((0.0,) * cone.dim, (0.0,) * cone.dim, 1.0, cone_basis(cone)),), cone)


def cone_basis(cone: Cone):
    """Columns spanning a simplicial cone, or None for the orthant."""
    if cone.kind == "orthant":
        return None
    if cone.kind == "lorentz":
        if cone.dim != 2:
            raise CapabilityError("densities on Lorentz cones are available in dimension 2 only")
        s = 1 / math.sqrt(2)
        return ((-s, s), (s, s))
    g = cone.generators
    if g.shape[0] != cone.dim:
        raise CapabilityError("densities need a simplicial cone (exactly n generators)")
    g = g / np.linalg.norm(g, axis=1, keepdims=True)
    return tuple(map(tuple, g.T.tolist()))


NAMED = {
    "delta": lambda: delta(1),
    "delta_prime": lambda: delta(1, 1),
    "heaviside": lambda: heaviside(1),
    "xplus": lambda: power(1.0),
    "gamma3": lambda: power(2.0, 1.0, 0.5),
    "heaviside2": lambda: heaviside(2),
}


def named(name: str) -> CatalogElement:
    try:
        return NAMED[name]()
    except KeyError:
        raise UsageError(f"unknown catalog element {name!r}; known: {sorted(NAMED)}") from None
