import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from tauberlab.cones import Cone
from tauberlab.errors import CapabilityError, DomainError, ResolutionError, UsageError
from tauberlab.gelfand import (
    Bump,
    CatalogElement,
    Gaussian,
    GridSampled,
    build_mollifier,
    check_invariants,
    delta,
    dilate,
    gs_norm,
    heaviside,
    mollifier_check,
    named,
    pair,
    power,
)
from tauberlab.weights import RSequence, WeightSequence

G2 = WeightSequence.gevrey(2)
ONE = RSequence.beurling(1.0)


# pairing ---------------------------------------------------------------------------


def test_pair_delta_and_derivative_with_gaussian():
    phi = Gaussian(0.0, 1.0)
    assert pair(delta(1), phi) == pytest.approx(1.0, abs=1e-15)
    assert pair(delta(1, 1), phi) == pytest.approx(0.0, abs=1e-15)


def test_pair_delta_prime_sign():
    phi = Gaussian(0.5, 1.0)
    # <δ', φ> = -φ'(0) = -(2 * 0.5) e^{-0.25}
    assert pair(delta(1, 1), phi) == pytest.approx(-math.exp(-0.25), rel=1e-14)


def test_pair_heaviside_integrates_half_line():
    phi = Gaussian(1.0, 2.0)
    exact = quad(lambda t: math.exp(-(((t - 1.0) / 2.0) ** 2)), 0, math.inf, epsabs=0, epsrel=1e-12)[0]
    assert pair(heaviside(1), phi).real == pytest.approx(exact, rel=1e-9)


def test_pair_two_dim_orthant_density():
    phi = Gaussian([0.0, 0.0], 1.0)
    assert pair(heaviside(2), phi).real == pytest.approx(math.pi / 4, rel=1e-8)


def test_named_elements_and_unknown_name():
    assert named("gamma3").densities_only
    with pytest.raises(UsageError):
        named("cantor")


def test_catalog_json_round_trip():
    f = delta(1, 1) + 2.0 * power(1.0)
    g = CatalogElement.from_json(f.to_json())
    assert g.to_dict() == f.to_dict()


def test_point_atom_outside_cone_rejected():
    with pytest.raises(DomainError):
        CatalogElement.from_dict({"atoms": [{"kind": "point", "loc": [-1.0], "alpha": [0]}]})


# dilation --------------------------------------------------------------------------


def test_dilate_examples():
    assert dilate(delta(1), 10).atoms[0].coef == pytest.approx(0.1, rel=1e-15)
    assert dilate(delta(1, 1), 10).atoms[0].coef == pytest.approx(1e-2, rel=1e-15)
    phi = Gaussian(2.0, 1.5)
    for lam in (0.1, 3.0, 1e4):
        assert pair(dilate(heaviside(1), lam), phi) == pytest.approx(pair(heaviside(1), phi), rel=1e-9)


def test_dilate_rejects_nonpositive():
    with pytest.raises(DomainError):
        dilate(delta(1), 0.0)


# norms -------------------------------------------------------------------------------


def test_gs_norm_examples():
    g = Gaussian(0.0, 1.0)
    assert gs_norm(0.0 * g, G2, G2, ONE, ONE, 0, 0).value == 0.0
    assert gs_norm(g, G2, G2, ONE, ONE, 0, 0).value == pytest.approx(1.0, abs=1e-15)
    v = gs_norm(g, G2, G2, ONE, ONE, 2, 2, t_box=(-10, 10)).value
    big = gs_norm(g, G2, G2, ONE, ONE, 2, 2, t_box=(-20, 20), points=8001).value
    assert 1.0 <= v < math.inf
    assert big == pytest.approx(v, rel=1e-6)


def test_gs_norm_order_limit():
    with pytest.raises(CapabilityError):
        gs_norm(Bump(0.0, 1.0), G2, G2, ONE, ONE, 20, 0)


def test_grid_sampled_derivative_consistency():
    t = np.linspace(-6, 6, 1201)
    g = GridSampled(np.exp(-t * t), spacing=t[1] - t[0], origin=t[0])
    x = np.linspace(-2, 2, 9)
    exact = -2 * x * np.exp(-x * x)
    assert np.max(np.abs(g.deriv((1,), x[:, None]) - exact)) < 1e-6


# mollifier ---------------------------------------------------------------------------


def test_mollifier_examples_half_line():
    eta = build_mollifier(Cone.orthant(1), 1.0)
    assert float(eta(np.array([[0.0]]))[0]) == 1.0
    assert float(eta(np.array([[-2.5]]))[0]) == 0.0


def test_mollifier_examples_quadrant():
    eta = build_mollifier(Cone.orthant(2), 1.0)
    v = float(eta(np.array([[-1.2, -1.2]]))[0])
    assert 0.0 < v < 1.0
    # (-1.6, -1.6) lies 2.26 > 2ε from the quadrant, so η vanishes there
    assert float(eta(np.array([[-1.6, -1.6]]))[0]) == 0.0


def test_mollifier_grid_too_coarse():
    with pytest.raises(ResolutionError):
        build_mollifier(Cone.orthant(1), 1.0, {"spacing": 0.5})


@pytest.mark.parametrize("cone", [Cone.orthant(1), Cone.orthant(2), Cone.polyhedral([[1, 0], [1, 1]])])
def test_mollifier_invariants_on_grid(cone):
    counts = check_invariants(build_mollifier(cone, 0.5))
    assert counts["range"] == counts["plateau"] == counts["support"] == 0


def test_mollifier_check_examples():
    eta = build_mollifier(Cone.orthant(1), 1.0)
    assert mollifier_check(eta, G2, ONE, k_max=0).constant >= 1.0
    rep = mollifier_check(eta, G2, ONE, k_max=3)
    assert rep.passed and math.isfinite(rep.log_constant)
    sharper = mollifier_check(build_mollifier(Cone.orthant(1), 0.5), G2, ONE, k_max=3)
    assert sharper.log_constant > rep.log_constant


def test_mollifier_check_order_budget():
    with pytest.raises(CapabilityError):
        mollifier_check(build_mollifier(Cone.orthant(1), 1.0), G2, ONE, k_max=50)


# properties ----------------------------------------------------------------------------

ATOMS = {
    "delta": delta(1),
    "delta_prime": delta(1, 1),
    "heaviside": heaviside(1),
    "xplus": power(1.0),
    "gamma3": power(2.0, 1.0, 0.5),
}
atom_names = st.sampled_from(sorted(ATOMS))
centers = st.floats(min_value=-2.0, max_value=3.0)
widths = st.floats(min_value=0.3, max_value=3.0)


@given(atom_names, centers, widths, st.floats(min_value=0.05, max_value=50.0))
def test_pairing_dilation_identity(name, c, w, lam):
    f, phi = ATOMS[name], Gaussian(c, w)
    lhs = pair(dilate(f, lam), phi)
    rhs = lam ** (-f.dim) * pair(f, phi.dilated(lam))
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs)) or abs(lhs - rhs) <= 1e-8 * abs(rhs)


@given(atom_names, atom_names, centers, widths, st.floats(min_value=-3, max_value=3))
def test_pair_linear_in_f(a, b, c, w, s):
    phi = Gaussian(c, w)
    f, g = ATOMS[a], ATOMS[b]
    lhs = pair(f + s * g, phi)
    rhs = pair(f, phi) + s * pair(g, phi)
    assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(rhs))


@given(atom_names, centers, centers, widths, st.floats(min_value=-3, max_value=3))
def test_pair_bilinear_in_phi(name, c1, c2, w, s):
    f, p1, p2 = ATOMS[name], Gaussian(c1, w), Gaussian(c2, w)
    lhs = pair(f, p1 + s * p2)
    rhs = pair(f, p1) + s * pair(f, p2)
    assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(rhs))


@given(st.floats(min_value=-5, max_value=5), st.floats(min_value=-5, max_value=5), centers, widths)
def test_gs_norm_absolutely_homogeneous(re, im, c, w):
    phi = Gaussian(c, w)
    k = complex(re, im)
    base = gs_norm(phi, G2, G2, ONE, ONE, 2, 2).value
    scaled = gs_norm(k * phi, G2, G2, ONE, ONE, 2, 2).value
    assert scaled == pytest.approx(abs(k) * base, rel=1e-12, abs=1e-300)
