"""The duality ⟨f, φ⟩ between catalog elements and test functions."""

from __future__ import annotations

import warnings

import numpy as np
from scipy.integrate import cubature

from ..errors import AccuracyError
from .catalog import CatalogElement, PointDerivative, PowerExpDensity
from .testfunctions import TestFunction

PAIR_RTOL = 1e-8
# Gaussian-type test functions are negligible beyond this many widths
REACH = 12.0


def _u_box(atom: PowerExpDensity, phi: TestFunction):
    """Bounding box in adapted coordinates of the region where φ(Gu) matters,
    cut where u^a e^{-c·u} has fallen below 1e-18 of its peak, plus the split
    points (φ's center and the density's peak) that guide the cubature."""
    center, scale, compact = phi.support_hint()
    G = atom.G
    Ginv = np.linalg.inv(G)
    uc = Ginv @ np.asarray(center, dtype=float)
    radius = scale if compact else REACH * scale
    half = radius * np.linalg.norm(Ginv, axis=1)
    lo = np.maximum(uc - half, 0.0)
    hi = uc + half
    a = np.maximum(np.asarray(atom.a), 0.0)
    c = np.asarray(atom.c)
    decays = c > 0
    peak = np.where(decays, a / np.where(decays, c, 1.0), 0.0)
    cap = np.where(decays, (peak + (42.0 + 2.0 * np.sqrt(a + 1.0) * 7.0) / np.where(decays, c, 1.0)), np.inf)
    hi = np.minimum(hi, cap)
    return lo, hi, [np.clip(uc, lo, hi), np.clip(np.maximum(peak, 1.0 / np.where(decays, c, 1.0)), lo, hi)]


def pair_density(atom: PowerExpDensity, phi: TestFunction, rtol: float = PAIR_RTOL) -> complex:
    """coef |det G| ∫_{u>=0} u^a e^{-c·u} φ(G u) du by adaptive cubature."""
    lo, hi, splits = _u_box(atom, phi)
    if np.any(hi <= lo):
        return 0j
    a = np.asarray(atom.a)
    c = np.asarray(atom.c)
    G = atom.G
    # u = v^(1/(a+1)) removes the endpoint singularity of u^a when a < 0
    sing = a < 0
    p = np.where(sing, 1.0 / (a + 1.0), 1.0)
    vlo = np.where(sing, lo ** (a + 1.0), lo)
    vhi = np.where(sing, hi ** (a + 1.0), hi)
    vsplits = [np.where(sing, sp ** (a + 1.0), sp) for sp in splits]
    const = np.prod(p)

    def integrand(v):
        u = np.where(sing, np.abs(v) ** p, v)
        w = np.where(sing, 1.0, np.abs(u) ** a) * np.exp(-c * u)
        val = np.prod(w, axis=1) * phi(u @ G.T)
        return np.column_stack([np.real(val), np.imag(val)])

    points = [v for v in vsplits if np.all((v > vlo) & (v < vhi))] or None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = cubature(integrand, vlo, vhi, rtol=rtol * 1e-2, atol=1e-15, points=points)
    est = complex(res.estimate[0], res.estimate[1])
    err = float(np.hypot(*res.error))
    scale = atom.coef * atom.jacobian * const
    if res.status != "converged" or err > rtol * abs(est) + 1e-13:
        raise AccuracyError(
            f"density pairing did not reach rtol {rtol}", estimate=scale * est, error=abs(scale) * err
        )
    return scale * est


def pair_point(atom: PointDerivative, phi: TestFunction) -> complex:
    val = phi.deriv(atom.alpha, np.array(atom.loc))
    return atom.coef * (-1) ** atom.order * complex(np.asarray(val).reshape(()))


def pair(f: CatalogElement, phi: TestFunction, rtol: float = PAIR_RTOL) -> complex:
    """⟨f, φ⟩ summed over atoms in their stored order."""
    f = CatalogElement.from_dict(f)
    total = 0j
    for atom in f.atoms:
        if isinstance(atom, PointDerivative):
            total += pair_point(atom, phi)
        else:
            total += pair_density(atom, phi, rtol)
    return total
