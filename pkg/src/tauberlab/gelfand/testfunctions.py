"""Test functions with derivative access, plus the affine/modulation wrappers
used by dilation, convolution, and the STFT."""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import product

import numpy as np
import sympy as sp
from scipy.interpolate import CubicSpline
from scipy.special import binom, eval_hermite

from ..errors import CapabilityError, DomainError

# sympy derivatives of the bump profile are generated up to these orders
BUMP_MAX_ORDER = {1: 10, 2: 5}


def _as_points(t, dim):
    t = np.asarray(t, dtype=float)
    if dim == 1 and (t.ndim == 0 or t.shape[-1] != 1):
        t = t[..., None]
    if t.shape[-1] != dim:
        raise DomainError(f"expected points of dimension {dim}, got shape {t.shape}")
    return t


def _alpha(alpha, dim):
    if alpha is None:
        return (0,) * dim
    if isinstance(alpha, (int, np.integer)):
        alpha = (int(alpha),)
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != dim or min(alpha) < 0:
        raise DomainError(f"bad multi-index {alpha} for dimension {dim}")
    return alpha


def multi_indices(dim: int, order: int):
    """All alpha in N^dim with |alpha| <= order, graded."""
    out = []
    for k in range(order + 1):
        out.extend(a for a in product(range(k + 1), repeat=dim) if sum(a) == k)
    return out


class TestFunction:
    """Base class. Subclasses implement ``_deriv(alpha, t)`` with t of shape (..., n)."""

    __test__ = False  # keep pytest from collecting this class
    dim: int = 1
    max_order: float = math.inf

    def deriv(self, alpha, t):
        alpha = _alpha(alpha, self.dim)
        if sum(alpha) > self.max_order:
            raise CapabilityError(f"derivative order {sum(alpha)} exceeds {self.max_order}")
        return self._deriv(alpha, _as_points(t, self.dim))

    def __call__(self, t):
        return self.deriv(None, t)

    def support_hint(self):
        """(center, scale, compact) describing where the mass sits."""
        return np.zeros(self.dim), 1.0, False

    # wrappers -------------------------------------------------------------

    def dilated(self, lam: float) -> "TestFunction":
        """t -> phi(t / lam)."""
        return Affine(self, 1.0 / lam, np.zeros(self.dim))

    def affine(self, s: float, b) -> "TestFunction":
        """t -> phi(s t + b)."""
        return Affine(self, s, np.broadcast_to(np.asarray(b, dtype=float), (self.dim,)).copy())

    def conj(self) -> "TestFunction":
        return Conjugate(self)

    def modulated(self, k) -> "TestFunction":
        """t -> exp(i k . t) phi(t), k possibly complex."""
        return Modulated(self, k)

    def __mul__(self, c):
        return Scaled(self, c)

    __rmul__ = __mul__

    def __add__(self, other):
        return Sum(self, other)


class Gaussian(TestFunction):
    """amp * prod_j exp(-((t_j - c_j) / w)^2)."""

    def __init__(self, center=0.0, width=1.0, amp=1.0, dim=None):
        c = np.atleast_1d(np.asarray(center, dtype=float))
        if dim is not None and c.size == 1:
            c = np.full(dim, c[0])
        self.center, self.width, self.amp = c, float(width), amp
        self.dim = c.size
        if not self.width > 0:
            raise DomainError("Gaussian width must be positive")

    def _deriv(self, alpha, t):
        s = (t - self.center) / self.width
        out = np.full(t.shape[:-1], self.amp, dtype=float if np.isrealobj(self.amp) else complex)
        for j, a in enumerate(alpha):
            sj = s[..., j]
            out = out * ((-1) ** a * eval_hermite(a, sj) * np.exp(-sj * sj) / self.width**a)
        return out

    def support_hint(self):
        return self.center, self.width, False

    def __repr__(self):
        return f"Gaussian(center={self.center.tolist()}, width={self.width})"


@lru_cache(maxsize=None)
def _bump_lambda(alpha: tuple):
    n = len(alpha)
    if sum(alpha) > BUMP_MAX_ORDER.get(n, -1):
        raise CapabilityError(f"bump derivatives of order {sum(alpha)} unavailable in dimension {n}")
    xs = sp.symbols(f"s0:{n}", real=True)
    q = 1 - sum(x**2 for x in xs)
    expr = sp.exp(-1 / q)
    for j, a in enumerate(alpha):
        if a:
            expr = sp.diff(expr, xs[j], a)
    expr = sp.simplify(expr / sp.exp(-1 / q))
    return sp.lambdify(xs, expr, "numpy")


def bump_profile_deriv(alpha, s):
    """Derivatives of exp(-1 / (1 - |s|^2)) on the unit ball, zero outside."""
    alpha = tuple(alpha)
    s = np.asarray(s, dtype=float)
    q = 1.0 - np.sum(s * s, axis=-1)
    inside = q > 1.0 / 700
    out = np.zeros(q.shape)
    if np.any(inside):
        f = _bump_lambda(alpha)
        si = s[inside]
        rational = np.broadcast_to(f(*[si[:, j] for j in range(s.shape[-1])]), (si.shape[0],))
        out[inside] = rational * np.exp(-1.0 / q[inside])
    return out


class Bump(TestFunction):
    """amp * exp(-1 / (1 - |(t - c)/r|^2)) on the ball of radius r."""

    def __init__(self, center=0.0, radius=1.0, amp=1.0, dim=None):
        c = np.atleast_1d(np.asarray(center, dtype=float))
        if dim is not None and c.size == 1:
            c = np.full(dim, c[0])
        self.center, self.radius, self.amp = c, float(radius), amp
        self.dim = c.size
        self.max_order = BUMP_MAX_ORDER.get(self.dim, 0)
        if not self.radius > 0:
            raise DomainError("bump radius must be positive")

    def _deriv(self, alpha, t):
        s = (t - self.center) / self.radius
        return self.amp * bump_profile_deriv(alpha, s) / self.radius ** sum(alpha)

    def support_hint(self):
        return self.center, self.radius, True

    def __repr__(self):
        return f"Bump(center={self.center.tolist()}, radius={self.radius})"


class GridSampled(TestFunction):
    """1-D samples on a uniform grid; derivatives by spectral differentiation.

    Values outside the sampled interval are zero, so samples should decay to
    zero at both ends.
    """

    def __init__(self, values, spacing: float, origin: float = 0.0):
        v = np.asarray(values)
        if not spacing > 0:
            raise DomainError("grid spacing must be positive")
        self.values, self.spacing, self.origin = v, float(spacing), float(origin)
        self.dim = 1
        self._splines = {}

    def _spline(self, k):
        if k not in self._splines:
            n = self.values.size
            freq = 2j * np.pi * np.fft.fftfreq(n, d=self.spacing)
            dk = np.fft.ifft((freq**k) * np.fft.fft(self.values))
            if np.isrealobj(self.values):
                dk = dk.real
            x = self.origin + self.spacing * np.arange(n)
            self._splines[k] = CubicSpline(x, dk)
        return self._splines[k]

    def _deriv(self, alpha, t):
        x = t[..., 0]
        lo, hi = self.origin, self.origin + self.spacing * (self.values.size - 1)
        out = self._spline(alpha[0])(np.clip(x, lo, hi))
        return np.where((x >= lo) & (x <= hi), out, 0.0)

    def support_hint(self):
        n = self.values.size
        return np.array([self.origin + self.spacing * (n - 1) / 2]), self.spacing * (n - 1) / 2, True


class Affine(TestFunction):
    def __init__(self, base: TestFunction, s: float, b):
        self.base, self.s, self.b = base, float(s), np.asarray(b, dtype=float)
        self.dim, self.max_order = base.dim, base.max_order

    def _deriv(self, alpha, t):
        return self.s ** sum(alpha) * self.base.deriv(alpha, self.s * t + self.b)

    def support_hint(self):
        c, w, compact = self.base.support_hint()
        return (np.asarray(c) - self.b) / self.s, w / abs(self.s), compact


class Conjugate(TestFunction):
    def __init__(self, base):
        self.base, self.dim, self.max_order = base, base.dim, base.max_order

    def _deriv(self, alpha, t):
        return np.conj(self.base.deriv(alpha, t))

    def support_hint(self):
        return self.base.support_hint()


class Scaled(TestFunction):
    def __init__(self, base, c):
        self.base, self.c, self.dim, self.max_order = base, c, base.dim, base.max_order

    def _deriv(self, alpha, t):
        return self.c * self.base.deriv(alpha, t)

    def support_hint(self):
        return self.base.support_hint()


class Sum(TestFunction):
    def __init__(self, a, b):
        if a.dim != b.dim:
            raise DomainError("dimension mismatch")
        self.a, self.b, self.dim = a, b, a.dim
        self.max_order = min(a.max_order, b.max_order)

    def _deriv(self, alpha, t):
        return self.a.deriv(alpha, t) + self.b.deriv(alpha, t)

    def support_hint(self):
        ca, wa, ka = self.a.support_hint()
        cb, wb, kb = self.b.support_hint()
        c = (np.asarray(ca) + np.asarray(cb)) / 2
        w = max(wa, wb) + np.linalg.norm(np.asarray(ca) - np.asarray(cb)) / 2
        return c, w, ka and kb


class Modulated(TestFunction):
    """exp(i k . t) * base(t); derivatives by the Leibniz rule."""

    def __init__(self, base, k):
        self.base = base
        self.k = np.broadcast_to(np.asarray(k, dtype=complex), (base.dim,)).copy()
        self.dim, self.max_order = base.dim, base.max_order

    def _deriv(self, alpha, t):
        phase = np.exp(1j * (t @ self.k))
        out = np.zeros(t.shape[:-1], dtype=complex)
        for beta in product(*(range(a + 1) for a in alpha)):
            coef = 1.0 + 0j
            for a, b, kj in zip(alpha, beta, self.k):
                coef *= binom(a, b) * (1j * kj) ** b
            rest = tuple(a - b for a, b in zip(alpha, beta))
            out = out + coef * self.base.deriv(rest, t)
        return phase * out

    def support_hint(self):
        return self.base.support_hint()
