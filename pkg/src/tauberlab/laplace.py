"""Laplace transforms on tube domains, their inversion, STFT and convolution.

Kernel convention: L{f}(z) = ⟨f(ξ), e^{i z·ξ}⟩ for z = x + iy with y in
C = int Γ*. The inverse on the slice Im z = y is

    f(ξ) = (2π)^{-n} e^{ξ·y} ∫ F(x + iy) e^{-i x·ξ} dx.

The STFT instead uses the 2π-in-exponent kernel e^{-2πi ξ·t}; the two
conventions are never mixed inside one formula.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.interpolate import CubicSpline
from scipy.special import gammaln

from .cones import Cone
from .errors import (
    AccuracyError,
    CapabilityError,
    ConditioningWarning,
    DomainError,
    IntegrabilityError,
)
from .gelfand.catalog import CatalogElement, PointDerivative, PowerExpDensity
from .gelfand.pairing import pair
from .gelfand.testfunctions import TestFunction
from .report import BoundReport, stable
from .weights import RSequence, WeightSequence, scaled_associated

NEAR_BOUNDARY = 1e-12
QUAD_RTOL = 1e-8
# e^{-46} is below double precision relative to O(1) values
TRUNCATION_EXPONENT = 46.0
INVERSE_CUTOFF = 1e-14


def _as_z(z, n: int) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if n == 1 and (z.ndim == 0 or z.shape[-1] != 1):
        z = z[..., None]
    if z.shape[-1] != n:
        raise DomainError(f"expected z of dimension {n}, got shape {z.shape}")
    return z


def tube_distance(cone: Cone, z) -> np.ndarray:
    """Δ_C(Im z); raises unless Im z lies in C, warns near its boundary."""
    y = np.imag(_as_z(z, cone.dim))
    d = np.asarray(cone.dual_distance(y))
    if np.any(~(d > 0)):
        raise DomainError("Im z must lie in the open dual cone C")
    if np.any(d < NEAR_BOUNDARY):
        warnings.warn(f"Δ_C(Im z) = {float(np.min(d)):.2e} is below {NEAR_BOUNDARY}", ConditioningWarning, stacklevel=3)
    return d


def _unwrap(out, z_in, n):
    arr = np.asarray(z_in)
    scalar = arr.ndim == 0 or (n > 1 and arr.ndim == 1)
    return complex(out.reshape(())) if scalar else out


# closed forms ---------------------------------------------------------------


def _point_transform(atom: PointDerivative, z: np.ndarray) -> np.ndarray:
    """⟨coef ∂^α δ_a, e^{iz·ξ}⟩ = coef (-1)^{|α|} (iz)^α e^{iz·a}."""
    mono = np.prod((1j * z) ** np.array(atom.alpha), axis=-1)
    return atom.coef * (-1) ** atom.order * mono * np.exp(1j * (z @ np.array(atom.loc)))


def _density_transform(atom: PowerExpDensity, z: np.ndarray) -> np.ndarray:
    """coef |det G| prod_j Γ(a_j + 1) / (c_j - i w_j)^{a_j + 1} with w = Gᵀz."""
    a, c = np.array(atom.a), np.array(atom.c)
    if np.any(c < 0):
        raise DomainError("densities with exponential growth have no Laplace transform on the tube")
    w = z @ atom.G
    base = c - 1j * w
    if np.any(base.real <= 0):
        raise DomainError("z outside the convergence tube of this density")
    logv = np.sum(gammaln(a + 1) - (a + 1) * np.log(base), axis=-1)
    return atom.coef * atom.jacobian * np.exp(logv)


def laplace(f, z, *, check: bool = True):
    """Closed-form L{f}(z), vectorized over leading axes of z."""
    f = CatalogElement.from_dict(f)
    zz = _as_z(z, f.dim)
    if check:
        tube_distance(f.cone, zz)
    out = np.zeros(zz.shape[:-1], dtype=complex)
    for atom in f.atoms:
        if isinstance(atom, PointDerivative):
            out = out + _point_transform(atom, zz)
        else:
            out = out + _density_transform(atom, zz)
    return _unwrap(out, z, f.dim)


# quadrature oracle ----------------------------------------------------------


def _truncation_radius(kappa: float, a: float) -> float:
    """R with kappa R - max(a, 0) log R >= 46."""
    r = TRUNCATION_EXPONENT / kappa
    for _ in range(50):
        r_new = (TRUNCATION_EXPONENT + max(a, 0.0) * math.log(max(r, 1.0))) / kappa
        if abs(r_new - r) <= 1e-12 * r:
            break
        r = r_new
    return r_new


def _axis_integral(a: float, c: float, w: complex, rtol: float):
    """∫_0^R u^a e^{-c u} e^{i w u} du on the truncated half-line, with error."""
    kappa = c + w.imag
    omega = w.real
    if not kappa > 0:
        raise DomainError("integrand does not decay along this axis")
    R = _truncation_radius(kappa, a)
    l1 = math.exp(gammaln(a + 1) - (a + 1) * math.log(kappa))
    atol = 1e-15 * l1
    env = lambda u: math.exp(-kappa * u)
    s = min(R, 1.0 / (1.0 + abs(omega) + kappa))
    total, err = 0j, 0.0
    opts = dict(epsabs=atol, epsrel=rtol * 1e-3, limit=2000)
    # head [0, s]: algebraic endpoint weight
    for part, trig in ((1.0, math.cos), (1j, math.sin)):
        fn = lambda u, trig=trig: env(u) * trig(omega * u)
        if a != 0:
            v, e = quad(fn, 0.0, s, weight="alg", wvar=(a, 0.0), **opts)
        else:
            v, e = quad(fn, 0.0, s, **opts)
        total += part * v
        err += e
    # body [s, R]: oscillatory weight
    body = lambda u: u**a * env(u)
    if omega != 0:
        for part, kind in ((1.0, "cos"), (1j, "sin")):
            v, e = quad(body, s, R, weight=kind, wvar=omega, **opts)
            total += part * v
            err += e
    else:
        v, e = quad(body, s, R, **opts)
        total += v
        err += e
    tail = R**max(a, 0.0) * math.exp(-kappa * R) / kappa
    return total, err + tail, R


def laplace_quadrature(f, z, rtol: float = QUAD_RTOL):
    """Independent oracle: ∫_Γ f(ξ) e^{iz·ξ} dξ by adaptive quadrature.

    Each density factorizes in its adapted coordinates, so the integral is a
    product of 1-D integrals, truncated where the decay e^{-Δ_C(Im z)|ξ|}
    reaches e^{-46}.
    """
    f = CatalogElement.from_dict(f)
    if not f.densities_only:
        raise CapabilityError("quadrature path supports density atoms only")
    zz = _as_z(z, f.dim)
    tube_distance(f.cone, zz)
    flat = zz.reshape(-1, f.dim)
    out = np.zeros(flat.shape[0], dtype=complex)
    for k, zk in enumerate(flat):
        total, err = 0j, 0.0
        for atom in f.atoms:
            w = zk @ atom.G
            val, rel = 1.0 + 0j, 0.0
            for aj, cj, wj in zip(atom.a, atom.c, w):
                with warnings.catch_warnings():
                    # QUADPACK roundoff notices; the error estimate is checked below
                    warnings.simplefilter("ignore", IntegrationWarning)
                    v, e, _ = _axis_integral(aj, cj, complex(wj), rtol)
                val *= v
                rel += e / max(abs(v), 1e-300)
            val *= atom.coef * atom.jacobian
            total += val
            err += abs(val) * rel
        if err > rtol * abs(total) and err > 1e-300:
            raise AccuracyError(f"quadrature error {err:.2e} exceeds rtol at z = {zk}", estimate=total, error=err)
        out[k] = total
    return _unwrap(out.reshape(zz.shape[:-1]), z, f.dim)


# holomorphic functions on the tube ------------------------------------------


@dataclass(frozen=True, eq=False)
class LaplaceFunction:
    """A holomorphic function on T^C with a named evaluation path.

    ``path`` is ``closed`` or ``quadrature`` for catalog sources, ``callable``
    for user functions, and ``table`` for sampled slice data.
    """

    source: object
    cone: Cone
    path: str = "closed"
    label: str = ""
    meta: dict = field(default_factory=dict)

    @classmethod
    def of(cls, f, path: str = "closed") -> "LaplaceFunction":
        f = CatalogElement.from_dict(f)
        if path not in ("closed", "quadrature"):
            raise DomainError(f"unknown evaluation path {path!r}")
        return cls(f, f.cone, path, label=f.to_json())

    @classmethod
    def from_callable(cls, fn: Callable, cone: Cone, label: str = "callable", log: bool = False) -> "LaplaceFunction":
        """Wrap a vectorized callable; with ``log`` it returns log F instead of F."""
        return cls(fn, cone, "callable", label, {"log": bool(log)})

    @classmethod
    def from_table(cls, zs, values, cone: Cone | None = None) -> "LaplaceFunction":
        """1-D samples on one horizontal line, interpolated by cubic splines in x."""
        zs = np.asarray(zs, dtype=complex).ravel()
        values = np.asarray(values, dtype=complex).ravel()
        if not np.allclose(zs.imag, zs.imag[0]):
            raise DomainError("table data must lie on a single slice Im z = y")
        order = np.argsort(zs.real)
        x = zs.real[order]
        spl = (CubicSpline(x, values.real[order]), CubicSpline(x, values.imag[order]))
        meta = {"y": float(zs.imag[0]), "x_range": [float(x[0]), float(x[-1])]}
        return cls(spl, cone or Cone.orthant(1), "table", "table", meta)

    @property
    def dim(self) -> int:
        return self.cone.dim

    def __call__(self, z, check: bool = True):
        if self.path == "closed":
            return laplace(self.source, z, check=check)
        if self.path == "quadrature":
            return laplace_quadrature(self.source, z)
        zz = _as_z(z, self.dim)
        if check:
            tube_distance(self.cone, zz)
        if self.path == "callable":
            out = np.asarray(self.source(zz), dtype=complex)
            if self.meta.get("log"):
                out = np.exp(out)
        else:
            if not np.allclose(zz.imag, self.meta["y"]):
                raise DomainError("table functions are only known on their slice")
            x = zz.real[..., 0]
            lo, hi = self.meta["x_range"]
            inside = (x >= lo) & (x <= hi)
            out = np.where(inside, self.source[0](x) + 1j * self.source[1](x), 0.0)
        return _unwrap(out, z, self.dim)


    def log_abs(self, z, check: bool = True) -> np.ndarray:
        """log|F(z)|, computed without overflow for log-valued callables."""
        if self.path == "callable" and self.meta.get("log"):
            zz = _as_z(z, self.dim)
            if check:
                tube_distance(self.cone, zz)
            return np.real(np.asarray(self.source(zz), dtype=complex))
        with np.errstate(divide="ignore"):
            return np.log(np.abs(np.asarray(self(z, check=check))))


def as_laplace_function(F, cone: Cone | None = None) -> LaplaceFunction:
    if isinstance(F, LaplaceFunction):
        return F
    if isinstance(F, (CatalogElement, dict, str)):
        return LaplaceFunction.of(F)
    if callable(F):
        return LaplaceFunction.from_callable(F, cone or Cone.orthant(1))
    raise DomainError(f"cannot interpret {type(F).__name__} as a Laplace function")


# inversion ---------------------------------------------------------------------


@dataclass
class InverseResult:
    xi: np.ndarray
    values: np.ndarray
    y: np.ndarray
    step: float
    cutoff: float
    richardson: float
    tail: float

    def to_dict(self):
        return {
            "xi": self.xi,
            "values": np.column_stack([self.values.real, self.values.imag]),
            "y": self.y,
            "step": self.step,
            "cutoff": self.cutoff,
            "richardson": self.richardson,
            "tail": self.tail,
        }


def _dtft(values, x0, h, xi):
    """Σ_k v_k e^{-i (x0 + k h) ξ} for every ξ, by blocks of a shared table."""
    N = values.size
    B = max(1, int(math.isqrt(N)))
    nb = -(-N // B)
    padded = np.zeros(nb * B, dtype=complex)
    padded[:N] = values
    inner = np.exp(-1j * h * np.outer(np.arange(B), xi))
    blocks = padded.reshape(nb, B) @ inner
    starts = x0 + h * B * np.arange(nb)
    return np.sum(blocks * np.exp(-1j * np.outer(starts, xi)), axis=0)


def _check_decay(F: LaplaceFunction, y: np.ndarray):
    """(1 + |x|)^{n+2} |F(x + iy)| must stay bounded on a probe grid."""
    n = F.dim
    radii = np.logspace(-1, 7, 161)
    dirs = [np.eye(n)[j] * s for j in range(n) for s in (1.0, -1.0)]
    if n > 1:
        dirs.append(np.ones(n) / math.sqrt(n))
    probe_x = np.concatenate([radii[:, None] * d for d in dirs])
    vals = np.abs(F(probe_x + 1j * y, check=False))
    g = (1 + np.linalg.norm(probe_x, axis=1)) ** (n + 2) * vals
    r = np.linalg.norm(probe_x, axis=1)
    outer = np.max(g[r >= 1e6])
    inner = np.max(g[r < 1e6])
    if not np.isfinite(outer) or outer > 2.0 * max(inner, 1e-300):
        raise IntegrabilityError(
            f"(1+|x|)^{n + 2}|F(x+iy)| grows on the probe grid ({outer:.3e} vs {inner:.3e}); inversion needs decay"
        )
    return probe_x, vals


def inverse_laplace(F, y, xi_grid, *, max_points: int = 20_000_000) -> InverseResult:
    """Recover f on ``xi_grid`` from the slice Im z = y by the trapezoid rule."""
    F = as_laplace_function(F)
    n = F.dim
    y = np.atleast_1d(np.asarray(y, dtype=float))
    tube_distance(F.cone, 1j * y)
    xi = np.asarray(xi_grid, dtype=float)
    xi_pts = xi[:, None] if n == 1 and xi.ndim == 1 else xi.reshape(-1, n)
    probe_x, vals = _check_decay(F, y)
    peak = max(float(np.max(vals)), abs(complex(np.asarray(F(1j * y, check=False)).reshape(()))))
    if peak == 0:
        return InverseResult(xi, np.zeros(xi_pts.shape[0], dtype=complex), y, 0.0, 0.0, 0.0, 0.0)
    big = np.linalg.norm(probe_x, axis=1)[vals >= INVERSE_CUTOFF * peak]
    X = 1.25 * float(np.max(big)) if big.size else 1.0
    # a dyadic step keeps every node exactly representable, which the blocked
    # DTFT needs: phases are rebuilt as e^{-i x_b ξ} e^{-i j h ξ}
    h_target = min(0.1, math.pi / (2 * (float(np.max(np.abs(xi_pts))) + 1.0)))
    h = 2.0 ** math.floor(math.log2(h_target))
    m = int(math.ceil(X / h))
    count = (2 * m + 1) ** n
    if count > max_points:
        raise AccuracyError(f"inversion would need {count} nodes (limit {max_points})")
    x1 = h * np.arange(-m, m + 1)
    if n == 1:
        Fx = np.asarray(F((x1 + 1j * y[0])[:, None], check=False), dtype=complex)
        s_h = h * _dtft(Fx, x1[0], h, xi_pts[:, 0])
        s_2h = 2 * h * _dtft(Fx[::2], x1[0], 2 * h, xi_pts[:, 0])
        tail = float(abs(Fx[0]) + abs(Fx[-1])) * X
    else:
        mesh = np.stack(np.meshgrid(*([x1] * n), indexing="ij"), axis=-1).reshape(-1, n)
        Fx = np.asarray(F(mesh + 1j * y, check=False), dtype=complex)
        phase = np.exp(-1j * mesh @ xi_pts.T)
        s_h = h**n * (Fx @ phase)
        even = np.all((np.round(mesh / h).astype(int) + m) % 2 == 0, axis=1)
        s_2h = (2 * h) ** n * (Fx[even] @ phase[even])
        edge = np.any(np.abs(mesh) >= x1[-1] - h / 2, axis=1)
        tail = float(np.max(np.abs(Fx[edge]))) * X**n
    scale = np.exp(xi_pts @ y) / (2 * math.pi) ** n
    values = scale * s_h
    rich = float(np.max(scale * np.abs(s_h - s_2h)))
    return InverseResult(xi, values, y, h, X, rich, float(np.max(scale)) * tail / (2 * math.pi) ** n)


# STFT and convolution -------------------------------------------------------


def stft(f, psi: TestFunction, x, xi) -> complex:
    """V_ψ f(x, ξ) = ⟨f(t), conj(ψ(t - x)) e^{-2πi ξ·t}⟩."""
    f = CatalogElement.from_dict(f)
    x = np.broadcast_to(np.asarray(x, dtype=float), (f.dim,))
    xi = np.broadcast_to(np.asarray(xi, dtype=float), (f.dim,))
    window = psi.affine(1.0, -x).conj().modulated(-2 * math.pi * xi)
    return pair(f, window)


def convolve(f, psi: TestFunction, x) -> complex:
    """(f ∗ ψ)(x) = ⟨f(t), ψ(x - t)⟩."""
    f = CatalogElement.from_dict(f)
    x = np.broadcast_to(np.asarray(x, dtype=float), (f.dim,))
    return pair(f, psi.affine(-1.0, x))


def _log_conv_weighted(f, psi, W_N, R, xs):
    vals = np.array([abs(convolve(f, psi, xk)) for xk in xs])
    r = np.linalg.norm(np.asarray(xs, dtype=float).reshape(len(xs), -1), axis=1)
    with np.errstate(divide="ignore"):
        return np.log(vals) - scaled_associated(W_N, R, r)


def convolution_bounded_check(f, psi: TestFunction, W_N: WeightSequence, R, x_grid) -> BoundReport:
    """sup_x e^{-N_{ℓp}(|x|)} |(f ∗ ψ)(x)| on the grid, and again on the grid
    stretched by 2 (the refinement); unstable growth is flagged, not raised."""
    f = CatalogElement.from_dict(f)
    R = RSequence.from_spec(R if R is not None else 1.0)
    xs = np.asarray(x_grid, dtype=float)
    if f.dim > 1 and xs.ndim == 1:
        raise DomainError("multi-dimensional x_grid must have shape (k, n)")
    logw = _log_conv_weighted(f, psi, W_N, R, xs)
    i = int(np.argmax(logw))
    log_sup = float(logw[i])
    ext = np.concatenate([xs, 2 * xs])
    logw_ext = _log_conv_weighted(f, psi, W_N, R, 2 * xs)
    log_sup_ext = max(log_sup, float(np.max(logw_ext)))
    is_stable = stable(log_sup, log_sup_ext)
    return BoundReport(
        "convolution-bounded",
        log_sup,
        bool(is_stable),
        bool(is_stable),
        0.0,
        np.asarray(xs[i]).tolist(),
        {"x_grid": xs, "extension_factor": 2.0},
        {"weights": W_N.to_dict(), "r": R.to_dict(), "log_sup_extended": log_sup_ext, "f": f.to_dict()},
        logw - log_sup,
        ext[: xs.shape[0]],
    )


# streaming formats ------------------------------------------------------------


def to_jsonl(zs, values) -> str:
    """One JSON object per line: {"z": [[re, im], ...], "value": [re, im]}."""
    lines = []
    for z, v in zip(np.atleast_2d(np.asarray(zs, dtype=complex)).reshape(len(values), -1), values):
        v = complex(v)
        lines.append(json.dumps({"z": [[float(c.real), float(c.imag)] for c in z], "value": [v.real, v.imag]}))
    return "\n".join(lines) + ("\n" if lines else "")


def from_jsonl(text: str):
    zs, vals = [], []
    for line in text.splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        zs.append([complex(a, b) for a, b in rec["z"]])
        vals.append(complex(*rec["value"]))
    return np.array(zs), np.array(vals)


def slice_csv(xs, values) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "re", "im"])
    for x, v in zip(np.asarray(xs, dtype=float), np.asarray(values, dtype=complex)):
        w.writerow([repr(float(x)), repr(float(v.real)), repr(float(v.imag))])
    return buf.getvalue()
