"""Weight sequences, their associated functions, and finite-range condition checks.

All sequences are stored on log scale (``log M_p``) so that Gevrey sequences of
high order stay representable; ``values`` exponentiates on demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import linprog
from scipy.special import gammaln

from .errors import (
    DomainError,
    InsufficientDataError,
    PreconditionError,
    TruncationError,
    UsageError,
)
from .report import BoundReport, stable

DEFAULT_DEPTH = 64
# N*(1/σ) at σ ~ 1e-5 with l = 1/4 puts the maximizer near 2e5
MAX_DEPTH = 1 << 20
# relative tolerance for log-convexity style identities
IDENTITY_RTOL = 1e-12
# (M.3)' block-ratio threshold: partial sums over (D/2, D] vs (D/4, D/2]
M3_RATIO_MAX = 0.9
NA_H_GRID = tuple(2.0 ** -k for k in range(0, 5))


def _exp(x: float) -> float:
    return math.exp(x) if x < 709 else math.inf


def _idx(depth: int) -> np.ndarray:
    return np.arange(depth + 1, dtype=float)


# --------------------------------------------------------------------------- R-sequences


@dataclass(frozen=True)
class RSequence:
    """A scaling family (l_p): constant (Beurling) or increasing (Roumieu).

    kinds: ``beurling`` (l_p = ell), ``roumieu-log`` (l_p = ell log(e + p)),
    ``roumieu-power`` (l_p = ell p^gamma), ``table`` (explicit l_1, l_2, ...).
    """

    kind: str = "beurling"
    ell: float = 1.0
    gamma: float = 0.1
    table: tuple = ()

    def __post_init__(self):
        if self.kind not in ("beurling", "roumieu-log", "roumieu-power", "table"):
            raise UsageError(f"unknown RSequence kind {self.kind!r}")
        if self.kind != "table" and not self.ell > 0:
            raise DomainError("ell must be positive")
        if self.kind == "roumieu-power" and not self.gamma > 0:
            raise DomainError("gamma must be positive for a Roumieu power family")
        if self.kind == "table":
            t = np.asarray(self.table, dtype=float)
            if t.size == 0 or np.any(t <= 0):
                raise DomainError("table entries must be positive")
            if np.any(np.diff(t) < 0):
                raise DomainError("Roumieu table must be nondecreasing")

    @classmethod
    def beurling(cls, ell: float = 1.0) -> "RSequence":
        return cls("beurling", ell=float(ell))

    @classmethod
    def from_spec(cls, spec) -> "RSequence":
        if isinstance(spec, RSequence):
            return spec
        if isinstance(spec, (int, float)):
            return cls.beurling(spec)
        spec = dict(spec)
        kind = spec.pop("kind", "beurling")
        if kind == "table":
            return cls("table", table=tuple(float(v) for v in spec["values"]))
        return cls(kind, **{k: float(v) for k, v in spec.items()})

    def to_dict(self) -> dict:
        if self.kind == "table":
            return {"kind": "table", "values": list(self.table)}
        d = {"kind": self.kind, "ell": self.ell}
        if self.kind == "roumieu-power":
            d["gamma"] = self.gamma
        return d

    @property
    def is_beurling(self) -> bool:
        return self.kind == "beurling"

    @property
    def extendable(self) -> bool:
        return self.kind != "table"

    def log_ell(self, depth: int) -> np.ndarray:
        """log l_p for p = 1..depth."""
        p = np.arange(1, depth + 1, dtype=float)
        if self.kind == "beurling":
            return np.full(depth, math.log(self.ell))
        if self.kind == "roumieu-log":
            return math.log(self.ell) + np.log(np.log(math.e + p))
        if self.kind == "roumieu-power":
            return math.log(self.ell) + self.gamma * np.log(p)
        t = np.asarray(self.table, dtype=float)
        if depth > t.size:
            raise TruncationError(f"RSequence table has {t.size} entries, {depth} needed")
        return np.log(t[:depth])

    def log_cumulative(self, depth: int) -> np.ndarray:
        """log L_p, p = 0..depth, with L_0 = 1."""
        if self.kind == "beurling":
            return np.arange(depth + 1, dtype=float) * math.log(self.ell)
        out = np.zeros(depth + 1)
        out[1:] = np.cumsum(self.log_ell(depth))
        return out

    def divided(self, c: float) -> "RSequence":
        """The family (l_p / c)."""
        if self.kind == "table":
            return RSequence("table", table=tuple(v / c for v in self.table))
        return RSequence(self.kind, ell=self.ell / c, gamma=self.gamma)


# --------------------------------------------------------------------------- weight sequences


@dataclass(frozen=True, eq=False)
class WeightSequence:
    """A positive sequence M_0..M_P held as log values.

    ``generator`` maps an integer index array to log M_p so the sequence can be
    extended on demand; table sequences have no generator.
    """

    log_values: np.ndarray
    spec: dict
    generator: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self):
        lv = np.asarray(self.log_values, dtype=float)
        if lv.ndim != 1 or lv.size < 2:
            raise InsufficientDataError("a weight sequence needs at least M_0 and M_1")
        if not np.all(np.isfinite(lv)):
            raise DomainError("weight sequence values must be finite and positive")
        object.__setattr__(self, "log_values", lv)

    # construction ---------------------------------------------------------

    @classmethod
    def gevrey(cls, s: float, depth: int = DEFAULT_DEPTH) -> "WeightSequence":
        """M_p = (p!)^s."""
        if not s > 0:
            raise DomainError(f"Gevrey index must be positive, got {s}")
        s = float(s)

        def gen(p):
            return s * gammaln(np.asarray(p, dtype=float) + 1.0)

        return cls(gen(np.arange(depth + 1)), {"kind": "gevrey", "s": s}, gen)

    @classmethod
    def table(cls, values=None, *, log_values=None) -> "WeightSequence":
        """Explicit finite sequence, given directly or as log values."""
        if log_values is not None:
            lv = np.asarray(log_values, dtype=float)
            return cls(lv, {"kind": "table", "log_values": lv.tolist()})
        v = np.asarray(values, dtype=float)
        if np.any(v <= 0):
            raise DomainError("weight sequence values must be positive")
        return cls(np.log(v), {"kind": "table", "values": v.tolist()})

    @classmethod
    def from_spec(cls, spec) -> "WeightSequence":
        """Build from a JSON-style dict or a ``kind:param`` shorthand string."""
        if isinstance(spec, WeightSequence):
            return spec
        if isinstance(spec, str):
            kind, _, arg = spec.partition(":")
            if kind != "gevrey" or not arg:
                raise UsageError(f"cannot parse weight shorthand {spec!r}")
            try:
                return cls.gevrey(float(arg))
            except ValueError as exc:
                raise UsageError(str(exc)) from None
        spec = dict(spec)
        kind = spec.get("kind")
        if kind == "gevrey":
            return cls.gevrey(float(spec["s"]), int(spec.get("depth", DEFAULT_DEPTH)))
        if kind == "table":
            if "log_values" in spec:
                return cls.table(log_values=spec["log_values"])
            return cls.table(spec["values"])
        if kind == "product":
            a, b = (cls.from_spec(f) for f in spec["factors"])
            return a.times(b)
        raise UsageError(f"unknown weight kind {kind!r}")

    def to_dict(self) -> dict:
        d = dict(self.spec)
        if d.get("kind") == "gevrey":
            d["depth"] = self.depth
        return d

    # derived sequences ----------------------------------------------------

    def _derived(self, fn, spec, other_gen=None, need_other=False) -> "WeightSequence":
        gen = None
        if self.generator is not None and (not need_other or other_gen is not None):
            base = self.generator

            def gen(p, base=base):
                return fn(np.asarray(p), base(p))

        return WeightSequence(fn(np.arange(self.depth + 1), self.log_values), spec, gen)

    def times(self, other: "WeightSequence") -> "WeightSequence":
        """Pointwise product M_p N_p."""
        d = min(self.depth, other.depth)
        lv = self.log_values[: d + 1] + other.log_values[: d + 1]
        gen = None
        if self.generator is not None and other.generator is not None:
            g1, g2 = self.generator, other.generator

            def gen(p):
                return g1(p) + g2(p)

        return WeightSequence(lv, {"kind": "product", "factors": [self.to_dict(), other.to_dict()]}, gen)

    def scaled(self, r: RSequence) -> "WeightSequence":
        """The sequence M_p L_p with L_p = l_1 ... l_p."""
        if r.is_beurling and r.ell == 1.0:
            return self
        lv = self.log_values + r.log_cumulative(self.depth)
        gen = None
        if self.generator is not None and r.extendable:
            g = self.generator

            def gen(p):
                p = np.asarray(p)
                return g(p) + r.log_cumulative(int(p.max()))[p.astype(int)]

        return WeightSequence(lv, {"kind": "scaled", "base": self.to_dict(), "r": r.to_dict()}, gen)

    def star(self) -> "WeightSequence":
        """M*_p = M_p / p!."""
        fn = lambda p, lv: lv - gammaln(np.asarray(p, dtype=float) + 1.0)  # noqa: E731
        return self._derived(fn, {"kind": "star", "base": self.to_dict()})

    def extended(self, depth: int) -> "WeightSequence":
        if depth <= self.depth:
            return self
        if self.generator is None:
            raise TruncationError(f"sequence {self.spec.get('kind')} cannot be extended past index {self.depth}")
        return WeightSequence(self.generator(np.arange(depth + 1)), self.spec, self.generator)

    # views ------------------------------------------------------------------

    @property
    def depth(self) -> int:
        return self.log_values.size - 1

    @property
    def values(self) -> np.ndarray:
        return np.exp(self.log_values)

    @property
    def log_ratios(self) -> np.ndarray:
        """log m_p for p = 1..P (entry p-1)."""
        return np.diff(self.log_values)

    @property
    def ratios(self) -> np.ndarray:
        """m_p = M_p / M_{p-1} for p = 1..P (entry p-1)."""
        return np.exp(self.log_ratios)

    @property
    def star_values(self) -> np.ndarray:
        return np.exp(self.log_values - gammaln(_idx(self.depth) + 1.0))

    @property
    def log_convex(self) -> bool:
        lr = self.log_ratios
        scale = np.maximum(1.0, np.abs(lr[1:]))
        return bool(np.all(np.diff(lr) >= -IDENTITY_RTOL * scale))


def brute_force_associated(log_values: np.ndarray, t, upto: int | None = None) -> np.ndarray:
    """sup over p <= upto of log(t^p M_0 / M_p) by direct enumeration.

    Shares the per-term float expression with :func:`associated` so the two
    agree bit-for-bit whenever both scan the maximizer.
    """
    lv = np.asarray(log_values, dtype=float)
    if upto is not None:
        lv = lv[: upto + 1]
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    pos = t > 0
    log_t = np.log(t[pos])[:, None]
    p = np.arange(lv.size)[None, :]
    out[pos] = np.max(_term(lv, log_t, p), axis=1)
    return out


def _term(lv, log_t, p):
    return p * log_t + (lv[0] - lv[p])


def associated(w: WeightSequence, t, *, return_maximizer: bool = False):
    """Associated function M(t) = sup_p log(t^p M_0 / M_p), with M(0) = 0.

    Uses the maximizer count p*(t) = #{p >= 1 : m_p <= t} valid under (M.1) and
    certifies that p*(t) lies strictly inside the cached index range, extending
    the sequence from its generator when it does not.
    """
    if not w.log_convex:
        raise PreconditionError("associated function needs a log-convex sequence (M.1)")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(np.isnan(t_arr)):
        raise DomainError("associated function is defined for t >= 0")
    scalar = t_arr.ndim == 0
    t_arr = np.atleast_1d(t_arr)
    out = np.zeros(t_arr.shape)
    pstar = np.zeros(t_arr.shape, dtype=int)
    pos = t_arr > 0
    if np.any(np.isinf(t_arr)):
        raise TruncationError("associated function at t = inf")
    if np.any(pos):
        log_t = np.log(t_arr[pos])
        ws = w
        while True:
            ps = np.searchsorted(ws.log_ratios, log_t, side="right")
            if np.all(ps < ws.depth):
                break
            if ws.generator is None or ws.depth >= MAX_DEPTH:
                raise TruncationError(
                    f"maximizer reaches index {int(ps.max())} >= cached depth {ws.depth}"
                )
            ws = ws.extended(min(2 * ws.depth, MAX_DEPTH))
        lv = ws.log_values
        # p* itself first so ties resolve to the counting formula
        cand = np.stack([ps, np.maximum(ps - 1, 0), ps + 1])
        terms = _term(lv, log_t[None, :], cand)
        k = np.argmax(terms, axis=0)
        out[pos] = terms[k, np.arange(ps.size)]
        pstar[pos] = cand[k, np.arange(ps.size)]
    if scalar:
        return (float(out[0]), int(pstar[0])) if return_maximizer else float(out[0])
    return (out, pstar) if return_maximizer else out


def star_associated(w: WeightSequence, t, **kw):
    """M*(t): the associated function of M_p / p!."""
    return associated(w.star(), t, **kw)


def scaled_associated(w: WeightSequence, r: RSequence, t, **kw):
    """M_{l_p}(t): the associated function of M_p L_p."""
    return associated(w.scaled(r), t, **kw)


def scaled_star_associated(w: WeightSequence, r: RSequence, t, **kw):
    """N*_{l_p}(t): the associated function of N_p L_p / p!."""
    return associated(w.scaled(r).star(), t, **kw)


# --------------------------------------------------------------------------- condition checks


@dataclass
class ConditionReport:
    """Finite-range condition flags.

    A flag means the defining inequality holds for every index up to
    ``depth`` with the reported constants; constants are fitted on that range
    and are implementation artifacts.
    """

    depth: int
    flags: dict
    constants: dict
    notes: list = field(default_factory=list)

    def __getitem__(self, key):
        return self.flags[key]

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "conditions": {
                k: {"flag": bool(v), "constants": self.constants.get(k, {})} for k, v in self.flags.items()
            },
            "notes": list(self.notes),
        }


def _log_convex_flag(lv: np.ndarray) -> bool:
    second = lv[:-2] + lv[2:] - 2 * lv[1:-1]
    scale = np.maximum(1.0, np.abs(lv[1:-1]))
    return bool(np.all(second >= -IDENTITY_RTOL * scale))


def _fit_linear_envelope(y: np.ndarray, x: np.ndarray, x_target: float):
    """Minimal (a, h) >= 0 with y_k <= a + x_k h, minimizing a + x_target h."""
    res = linprog(
        c=[1.0, x_target],
        A_ub=np.column_stack([-np.ones_like(x), -x]),
        b_ub=-y,
        bounds=[(0, None), (0, None)],
        method="highs",
    )
    if not res.success:
        return math.inf, math.inf
    a, h = res.x
    # linprog returns a vertex up to ~1e-9; push up to a certified envelope
    a += max(0.0, float(np.max(y - a - x * h)))
    return float(a), float(h)


def _envelope_condition(y: np.ndarray, x: np.ndarray):
    """Linear-envelope fit plus a growth test.

    The flag requires the secant slope over the last half of the range not to
    exceed the slope over the preceding quarter by more than 10%; constants
    are the minimal envelope on the whole range.
    """
    D = x.size - 1
    q1, q2 = D // 4, D // 2
    s1 = (y[q2] - y[q1]) / (x[q2] - x[q1])
    s2 = (y[D] - y[q2]) / (x[D] - x[q2])
    ok = bool(s2 <= max(s1, 0.0) * 1.1 + IDENTITY_RTOL * max(1.0, abs(s1)))
    a, h = _fit_linear_envelope(y, x, x[-1])
    return ok, a, h


def _m2_excess(lv: np.ndarray) -> np.ndarray:
    """g(k) = max_{p+q=k} log M_k - log M_p - log M_q, k = 0..P."""
    P = lv.size - 1
    g = np.empty(P + 1)
    for k in range(P + 1):
        p = np.arange(k + 1)
        g[k] = np.max(lv[k] - lv[p] - lv[k - p])
    return g


def _m3_sums(log_m: np.ndarray):
    """Convergence test and tail estimate for sum 1/m_p over p = 1..D.

    Convergence: the block sum over (D/2, D] is below 0.9 times the block sum
    over (D/4, D/2]. Tail beyond D: power-law model with the log-log slope of
    m_p over [D/2, D].
    """
    inv_m = np.exp(-log_m)
    D = inv_m.size
    q1, q2 = D // 4, D // 2
    b1 = inv_m[q1:q2].sum()
    b2 = inv_m[q2:].sum()
    ratio = b2 / b1 if b1 > 0 else math.inf
    converges = bool(ratio < M3_RATIO_MAX)
    slope = (log_m[-1] - log_m[q2 - 1]) / (math.log(D) - math.log(q2))
    tail = inv_m[-1] * D / (slope - 1.0) if converges and slope > 1 else math.inf
    return converges, ratio, tail


def check_conditions(w: WeightSequence, depth: int | None = None) -> ConditionReport:
    """Check (M.1), (M.1)*, (M.2)', (M.2), (M.3)', (M.3) and (NA) on p <= depth."""
    if depth is None:
        depth = min(w.depth, DEFAULT_DEPTH) if w.generator is None else DEFAULT_DEPTH
    if depth < 3:
        raise InsufficientDataError("condition checks need depth >= 3")
    if depth > w.depth:
        w = w.extended(depth)
    lv = w.log_values[: depth + 1]
    p = _idx(depth)
    flags, consts, notes = {}, {}, []

    flags["M.1"] = _log_convex_flag(lv)
    flags["M.1*"] = _log_convex_flag(lv - gammaln(p + 1.0))

    lr = np.diff(lv)  # log m_{p+1}, p = 0..depth-1
    ok, a, h = _envelope_condition(lr, p[:-1])
    flags["M.2'"] = ok
    consts["M.2'"] = {"A": _exp(a), "H": _exp(h)}

    g = _m2_excess(lv)
    ok, a2, h2 = _envelope_condition(g, p)
    flags["M.2"] = ok
    consts["M.2"] = {"A": _exp(a2), "H": _exp(h2)}
    if flags["M.2"] and not flags["M.2'"]:
        # (M.2) with q = 1 gives (M.2)' with A' = A H M_1 / M_0
        flags["M.2'"] = True
        consts["M.2'"] = {"A": _exp(a2 + h2 + lv[1] - lv[0]), "H": _exp(h2)}
        notes.append("M.2' constants derived from M.2")

    inv_m = np.exp(-lr)
    conv, ratio, tail = _m3_sums(lr)
    flags["M.3'"] = bool(conv)
    consts["M.3'"] = {"partial_sum": float(inv_m.sum()), "block_ratio": float(ratio), "sum_bound": float(inv_m.sum() + tail)}

    if conv:
        tails = np.cumsum(inv_m[::-1])[::-1] + tail  # sum_{p >= q}, q = 1..depth
        q = np.arange(1, depth + 1)
        c = np.exp(np.log(tails) + lr) / q
        half = depth // 2
        c_full, c_half = float(c.max()), float(c[:half].max())
        flags["M.3"] = c_full <= c_half * (1 + 0.05)
        consts["M.3"] = {"c0": c_full}
    else:
        flags["M.3"] = False
        consts["M.3"] = {"c0": math.inf}

    flags["NA"], consts["NA"] = _check_na(w, depth)
    return ConditionReport(depth, flags, consts, notes)


def _check_na(w: WeightSequence, depth: int):
    """p! < N_p: for each h on a finite grid, p! / (h^p N_p) attains its sup inside the range."""
    ws = w
    logL = {}
    for hval in NA_H_GRID:
        while True:
            lv = ws.log_values
            p = _idx(ws.depth)
            v = gammaln(p + 1.0) - lv - p * math.log(hval)
            k = int(np.argmax(v))
            if k < ws.depth // 2 or ws.generator is None or ws.depth >= MAX_DEPTH // 4:
                break
            ws = ws.extended(2 * ws.depth)
        if k >= ws.depth // 2:
            return False, {"h_grid": list(NA_H_GRID)}
        logL[hval] = float(v[k])
    return True, {"h_grid": list(NA_H_GRID), "log_L": {str(h): v for h, v in logL.items()}}


# --------------------------------------------------------------------------- inequality suite


def _default_t_grid():
    return np.logspace(-2, 3, 400)


def verify_condition_bounds(
    w: WeightSequence,
    r: RSequence | None = None,
    t_grid=None,
    k_list=(2.0, 4.0, 10.0),
    conditions: ConditionReport | None = None,
) -> BoundReport:
    """Check the shift, doubling, and star-composition inequalities on a grid.

    Shift (needs (M.2)'):  M(t) - M(kt) <= -log(t/A) log k / log H, k >= 1.
    Doubling (needs (M.2)): 2 M(t) <= M(Ht) + log(A M_0).
    Star composition (needs (M.1)*): M*(t / (4 (m_1 + 1) M(t))) <= M(t) + A',
    t >= m_1 + 1, with A' fitted as the largest residual.
    """
    ws = w.scaled(r) if r is not None else w
    cond = conditions or check_conditions(ws)
    t = np.asarray(_default_t_grid() if t_grid is None else t_grid, dtype=float)
    if np.any(t <= 0):
        raise DomainError("t grid must be positive")
    parts = {}

    if not cond["M.2'"]:
        raise PreconditionError("shift inequality needs (M.2)'")
    A, H = cond.constants["M.2'"]["A"], cond.constants["M.2'"]["H"]
    Mt = associated(ws, t)
    worst, where = -math.inf, None
    residuals = []
    for k in k_list:
        if k < 1:
            raise DomainError("shift inequality is checked for k >= 1")
        lhs = Mt - associated(ws, k * t)
        rhs = -np.log(t / A) * math.log(k) / math.log(H) if H > 1 else np.where(t > A, -np.inf, np.inf)
        res = lhs - rhs
        residuals.append(res)
        i = int(np.argmax(res))
        if res[i] > worst:
            worst, where = float(res[i]), {"t": float(t[i]), "k": float(k)}
    res = np.concatenate(residuals)
    parts["shift"] = BoundReport(
        "m2prime-shift", 0.0, bool(worst <= 0), None, worst, where,
        {"t": [float(t.min()), float(t.max()), int(t.size)], "k": list(k_list)},
        {"A": A, "H": H}, res,
    )

    if not cond["M.2"]:
        raise PreconditionError("doubling inequality needs (M.2)")
    A2, H2 = cond.constants["M.2"]["A"], cond.constants["M.2"]["H"]
    res = 2 * Mt - associated(ws, H2 * t) - (math.log(A2) + ws.log_values[0])
    i = int(np.argmax(res))
    parts["doubling"] = BoundReport(
        "m2-doubling", 0.0, bool(res[i] <= 0), None, float(res[i]), {"t": float(t[i])},
        {"t": [float(t.min()), float(t.max()), int(t.size)]}, {"A": A2, "H": H2}, res,
    )

    if not cond["M.1*"]:
        raise PreconditionError("star-composition inequality needs (M.1)*")
    m1 = float(ws.ratios[0])
    ts = t[t >= m1 + 1]
    if ts.size == 0:
        ts = np.logspace(math.log10(m1 + 1), 3, 200)
    parts["star"] = _star_composition(ws, ts, m1)
    # refine once and compare A'
    tr = np.exp(np.linspace(np.log(ts[0]), np.log(ts[-1]), 2 * ts.size - 1))
    refined = _star_composition(ws, tr, m1)
    parts["star"].refinement_stable = abs(refined.log_constant - parts["star"].log_constant) <= 0.05 * max(
        1.0, abs(parts["star"].log_constant)
    )

    worst_all = max(p.worst_residual for p in parts.values())
    return BoundReport(
        "weight-inequalities",
        0.0,
        all(p.passed for p in parts.values()) and bool(parts["star"].refinement_stable),
        parts["star"].refinement_stable,
        worst_all,
        None,
        {"t": [float(t.min()), float(t.max()), int(t.size)]},
        {"sequence": ws.to_dict()},
        parts=parts,
    )


def _star_composition(ws: WeightSequence, ts: np.ndarray, m1: float) -> BoundReport:
    Mt = associated(ws, ts)
    arg = np.where(Mt > 0, ts / (4 * (m1 + 1) * np.where(Mt > 0, Mt, 1.0)), 0.0)
    raw = star_associated(ws, arg) - Mt
    a_prime = float(max(0.0, raw.max()))
    res = raw - a_prime
    i = int(np.argmax(raw))
    return BoundReport(
        "star-composition", a_prime, True, None, float(res[i]), {"t": float(ts[i])},
        {"t": [float(ts.min()), float(ts.max()), int(ts.size)]}, {"A_prime": a_prime}, res,
        notes=["A' is the additive constant fitted as the maximal residual"],
    )
