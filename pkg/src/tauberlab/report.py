"""Bound-verification reports and their JSON/CSV serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

SCHEMA = "bound-report/1"

# "refinement stable" means the fitted constant moves by less than 5%
STABILITY_TOL = 0.05


def stable(log_a: float, log_b: float, tol: float = STABILITY_TOL) -> bool:
    """True when exp(log_a) and exp(log_b) differ by less than ``tol`` relative."""
    if math.isinf(log_a) and math.isinf(log_b) and log_a < 0 and log_b < 0:
        return True
    if not (math.isfinite(log_a) and math.isfinite(log_b)):
        return False
    return abs(log_b - log_a) < math.log1p(tol)


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    return obj


def dumps(obj: Any) -> str:
    """Canonical JSON: sorted keys, repr floats, no whitespace drift."""
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2)


@dataclass
class BoundReport:
    """Outcome of a numerical bound verification.

    ``log_constant`` is the fitted constant on log scale; residuals are
    ``log|LHS| - log RHS - log_constant`` and are all <= 0 when the
    constant was fitted on the same grid.
    """

    bound_id: str
    log_constant: float
    passed: bool
    refinement_stable: bool | None = None
    worst_residual: float = 0.0
    worst_point: Any = None
    grid: dict = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)
    residuals: np.ndarray | None = None
    points: np.ndarray | None = None
    notes: list = field(default_factory=list)
    parts: dict = field(default_factory=dict)

    @property
    def constant(self) -> float:
        return math.exp(self.log_constant) if self.log_constant < 700 else math.inf

    def to_dict(self, include_residuals: bool = True) -> dict:
        d = {
            "schema": SCHEMA,
            "bound_id": self.bound_id,
            "log_constant": self.log_constant,
            "constant": self.constant,
            "passed": self.passed,
            "refinement_stable": self.refinement_stable,
            "worst_residual": self.worst_residual,
            "worst_point": self.worst_point,
            "grid": self.grid,
            "parameters": self.parameters,
            "notes": list(self.notes),
        }
        if include_residuals and self.residuals is not None:
            d["residuals"] = np.asarray(self.residuals, dtype=float)
        if self.parts:
            d["parts"] = {k: v.to_dict(include_residuals) for k, v in self.parts.items()}
        return _jsonable(d)

    def to_json(self, include_residuals: bool = True) -> str:
        return dumps(self.to_dict(include_residuals))

    def to_csv(self) -> str:
        """One row per grid point: point coordinates then residual."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if self.residuals is None:
            return ""
        pts = self.points
        res = np.asarray(self.residuals, dtype=float).ravel()
        w.writerow(["index", "point", "residual"])
        for i, r in enumerate(res):
            p = "" if pts is None else json.dumps(_jsonable(pts[i]))
            w.writerow([i, p, repr(float(r))])
        return buf.getvalue()


def recheck(report: dict, tol: float = 1e-12) -> bool:
    """Re-verify a serialized pass report: every stored residual is <= 0."""
    res = report.get("residuals")
    ok = True
    if res is not None:
        ok = all((r == "-inf") or (isinstance(r, (int, float)) and r <= tol) for r in res)
    for part in report.get("parts", {}).values():
        ok = ok and recheck(part, tol)
    return ok
