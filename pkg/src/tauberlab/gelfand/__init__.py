"""Catalog ultradistributions, test functions, norms and cone mollifiers."""

from .catalog import (
    CatalogElement,
    PointDerivative,
    PowerExpDensity,
    cone_basis,
    cone_indicator,
    delta,
    dilate,
    heaviside,
    named,
    power,
)
from .mollifier import Mollifier, build_mollifier, check_invariants, mollifier_check
from .norms import GSNorm, gs_norm
from .pairing import pair
from .testfunctions import Bump, Gaussian, GridSampled, TestFunction, multi_indices

__all__ = [
    "Bump",
    "CatalogElement",
    "GSNorm",
    "Gaussian",
    "GridSampled",
    "Mollifier",
    "PointDerivative",
    "PowerExpDensity",
    "TestFunction",
    "build_mollifier",
    "check_invariants",
    "cone_basis",
    "cone_indicator",
    "delta",
    "dilate",
    "gs_norm",
    "heaviside",
    "mollifier_check",
    "multi_indices",
    "named",
    "pair",
    "power",
]
