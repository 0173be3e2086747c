"""Truncated Gelfand–Shilov norm of a test function on a box."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..weights import RSequence, WeightSequence
from .testfunctions import TestFunction, multi_indices


@dataclass
class GSNorm:
    value: float
    alpha: tuple | None
    beta: tuple | None
    point: list | None
    truncation: dict

    def __float__(self):
        return self.value

    def to_dict(self):
        return {
            "value": self.value,
            "alpha": self.alpha,
            "beta": self.beta,
            "point": self.point,
            "truncation": self.truncation,
        }


def _box_grid(t_box, dim, points):
    lo, hi = (np.broadcast_to(np.asarray(v, dtype=float), (dim,)) for v in t_box)
    axes = [np.linspace(lo[j], hi[j], points) for j in range(dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1), lo, hi


def _log_weights(w: WeightSequence, k: int) -> np.ndarray:
    return w.extended(max(k, 1)).log_values[: k + 1]


def gs_norm(
    phi: TestFunction,
    W_M: WeightSequence,
    W_N: WeightSequence,
    a: RSequence,
    b: RSequence,
    alpha_max: int,
    beta_max: int,
    t_box=(-10.0, 10.0),
    points: int | None = None,
) -> GSNorm:
    """sup over |α| <= alpha_max, |β| <= beta_max and the box grid of
    |t^β φ^{(α)}(t)| / (A_|α| M_|α| B_|β| N_|β|)."""
    a, b = RSequence.from_spec(a), RSequence.from_spec(b)
    n = phi.dim
    if points is None:
        points = 2001 if n == 1 else 101
    t, lo, hi = _box_grid(t_box, n, points)
    logden_a = a.log_cumulative(alpha_max) + _log_weights(W_M, alpha_max)
    logden_b = b.log_cumulative(beta_max) + _log_weights(W_N, beta_max)
    with np.errstate(divide="ignore"):
        log_abs_t = np.log(np.abs(t))
    betas = multi_indices(n, beta_max)
    best, arg = -math.inf, (None, None, None)
    for alpha in multi_indices(n, alpha_max):
        with np.errstate(divide="ignore"):
            log_d = np.log(np.abs(phi.deriv(alpha, t)))
        for beta in betas:
            # 0^0 = 1 convention for the monomial
            with np.errstate(invalid="ignore"):
                log_mono = np.sum(np.where(np.array(beta) > 0, log_abs_t * np.array(beta), 0.0), axis=1)
            vals = log_d + log_mono - logden_a[sum(alpha)] - logden_b[sum(beta)]
            i = int(np.argmax(vals))
            if vals[i] > best:
                best, arg = float(vals[i]), (alpha, beta, t[i].tolist())
    value = math.exp(best) if best > -math.inf else 0.0
    meta = {
        "alpha_max": alpha_max,
        "beta_max": beta_max,
        "box": [lo.tolist(), hi.tolist()],
        "points_per_axis": points,
    }
    if value == 0.0:
        arg = (None, None, None)
    return GSNorm(value, *arg, meta)
