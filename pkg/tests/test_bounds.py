import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tauberlab.bounds import (
    TubeGrid,
    beurling_family,
    delta_approximants,
    o_ell_norm,
    sample_sup_diff,
    sequence_convergence_check,
    verify_bound_3_1_i,
    verify_bound_3_1_ii,
    verify_bound_strong,
    verify_family,
    verify_lemma_3_4,
    verify_sup_diff,
    violator,
)
from tauberlab.cones import Cone
from tauberlab.errors import DomainError
from tauberlab.gelfand import Gaussian, build_mollifier, delta, heaviside, named, power
from tauberlab.laplace import LaplaceFunction
from tauberlab.report import recheck
from tauberlab.weights import RSequence, WeightSequence

G2 = WeightSequence.gevrey(2)
ONE = RSequence.beurling(1.0)
CATALOG = ["delta", "heaviside", "xplus", "gamma3", "heaviside2"]


def zero_function(cone=None):
    cone = cone or Cone.orthant(1)
    return LaplaceFunction.from_callable(lambda z: np.zeros(z.shape[:-1], dtype=complex), cone, "zero")


# tube bounds -----------------------------------------------------------------------------


def test_delta_constant_is_one():
    rep = verify_bound_strong(delta(1), G2, G2, ONE)
    assert rep.passed and rep.constant == pytest.approx(1.0, rel=1e-12)
    # every exponent is >= 0, and the ε|Im z| term is smallest at Im z = 1 where both others vanish
    rep = verify_bound_3_1_i(delta(1), G2, G2, ONE, 0.5)
    assert rep.passed and rep.log_constant == pytest.approx(-0.5, rel=1e-12)
    rep = verify_bound_3_1_ii(delta(1), G2, G2, ONE, [1.0], 1.0)
    assert rep.passed and rep.constant == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("name", CATALOG)
def test_catalog_passes_all_three_bounds(name):
    f = named(name)
    om = Cone.orthant(f.dim).dual_witness()
    assert verify_bound_3_1_i(f, G2, G2, ONE, 0.5).passed
    assert verify_bound_strong(f, G2, G2, ONE).passed
    assert verify_bound_3_1_ii(f, G2, G2, ONE, om, 1.0).passed


def test_violator_fails_with_growing_constant():
    rep = verify_bound_3_1_i(violator(), G2, G2, ONE, 0.5)
    assert not rep.passed and not rep.refinement_stable
    assert rep.grid["refined_log_constants"]["sigma-min"] > 1.05 * rep.log_constant


def test_violator_family_verdicts():
    rep = verify_family(verify_bound_3_1_i, violator(), G2, G2, eps=0.5)
    v = rep.parameters["verdicts"]
    # e^{1/σ} <= e^{N*_l(1/σ)} whenever l < 1, so only l >= 1 can fail
    assert not v["ell=1"] and not v["ell=2"] and not v["ell=4"]
    assert v["ell=0.25"] and v["ell=0.5"]


def test_strong_constant_dominates_eps_constant():
    for name in CATALOG:
        f = named(name)
        strong = verify_bound_strong(f, G2, G2, ONE)
        for eps in (0.1, 0.5, 2.0):
            assert strong.log_constant >= verify_bound_3_1_i(f, G2, G2, ONE, eps).log_constant - 1e-12


def test_eps_must_be_positive():
    with pytest.raises(DomainError):
        verify_bound_3_1_i(delta(1), G2, G2, ONE, 0.0)


def test_omega_outside_dual_rejected():
    with pytest.raises(DomainError):
        verify_bound_3_1_ii(heaviside(1), G2, G2, ONE, [-1.0], 1.0)


def test_slice_with_explicit_grids():
    rep = verify_bound_3_1_ii(power(1.0), G2, G2, ONE, [1.0], 1.0, x_grid=np.linspace(-50, 50, 101), sigma_grid=np.logspace(-4, 0, 41))
    assert rep.passed and math.isfinite(rep.log_constant)


def test_family_reports_best_member():
    rep = verify_family(verify_bound_strong, heaviside(1), G2, G2)
    assert rep.passed and set(rep.parts) == {f"ell={r.ell:g}" for r in beurling_family()}
    assert rep.log_constant == min(p.log_constant for p in rep.parts.values())


def test_pass_report_rechecks_from_json():
    rep = verify_bound_3_1_i(power(1.0), G2, G2, ONE, 0.5)
    assert rep.passed and recheck(json.loads(rep.to_json()))


# O_l norms ------------------------------------------------------------------------------


def test_o_ell_norm_examples():
    assert o_ell_norm(zero_function(), G2, G2, 1.0) == 0.0
    for ell in (0.5, 1.0):
        assert o_ell_norm(delta(1), G2, G2, ell) == pytest.approx(1.0, rel=1e-12)
    a = o_ell_norm(heaviside(1), G2, G2, 1.0)
    b = o_ell_norm(heaviside(1), G2, G2, 1.0, TubeGrid(Cone.orthant(1), sigma_max=10.0, x_per_decade=20, sigma_per_decade=40))
    assert math.isfinite(a) and b == pytest.approx(a, rel=0.05)


def test_o_ell_norm_rejects_nonpositive_ell():
    with pytest.raises(DomainError):
        o_ell_norm(delta(1), G2, G2, 0.0)


# sup estimate -------------------------------------------------------------------------------------


def test_sup_diff_examples():
    for y in ([1.0], [50.0]):
        rep = verify_sup_diff(G2, ONE, Cone.orthant(1), y)
        assert rep.passed and rep.parameters["slack"] >= 0
    assert verify_sup_diff(G2, ONE, Cone.orthant(2), [1.0, 2.0]).passed


@pytest.mark.parametrize("cone", [Cone.orthant(1), Cone.orthant(2), Cone.lorentz(3), Cone.polyhedral([[1, 0], [1, 1]])])
def test_sup_diff_random_samples(cone):
    out = sample_sup_diff(G2, ONE, cone, samples=10_000)
    assert out["violations"] == 0 and out["samples"] > 9000


def test_sup_diff_requires_interior_y():
    with pytest.raises(DomainError):
        verify_sup_diff(G2, ONE, Cone.orthant(2), [1.0, 0.0])


# mollifier times exponential ------------------------------------------------------------------------


def test_lemma_3_4_examples():
    eta = build_mollifier(Cone.orthant(1), 0.5)
    z = [1j, 3 + 0.5j, 10j, 2 + 2j]
    rep = verify_lemma_3_4(eta, G2, G2, ONE, ONE, z)
    assert rep.passed
    # η lives on ξ >= -2ε, so e^{-yξ} there grows with y
    assert rep.parameters["log_norms"][2] > rep.parameters["log_norms"][0]
    sharper = verify_lemma_3_4(build_mollifier(Cone.orthant(1), 0.25), G2, G2, ONE, ONE, z)
    assert sharper.log_constant > rep.log_constant


def test_lemma_3_4_rejects_real_z():
    eta = build_mollifier(Cone.orthant(1), 0.5)
    with pytest.raises(DomainError):
        verify_lemma_3_4(eta, G2, G2, ONE, ONE, [1.0 + 0j])


# sequence convergence ---------------------------------------------------------------------------------


def test_delta_approximants_converge():
    fs = delta_approximants([10, 100, 1000, 10_000])
    rep = sequence_convergence_check(fs, delta(1), G2, G2, ONE, [Gaussian(0.5, 1.0), Gaussian(1.0, 2.0)])
    assert rep.passed
    assert rep.parameters["uniform"] and rep.parameters["pointwise"] and rep.parameters["pairings_converge"]


# properties ---------------------------------------------------------------------------------------------

names = st.sampled_from(CATALOG)


@settings(max_examples=10)
# ℓ < 1 with a much lower σ_min pushes the star maximizer past the index cap
@given(names, st.sampled_from([1.0, 2.0]), st.sampled_from([2, 4]), st.sampled_from([2, 4]))
def test_enlarging_grid_never_decreases_constant(name, ell, xs, ss):
    f = named(name)
    r = RSequence.beurling(ell)
    base = TubeGrid(f.cone)
    big = TubeGrid(f.cone, x_max=base.x_max * xs, sigma_min=base.sigma_min / ss)
    a = verify_bound_3_1_i(f, G2, G2, r, 0.5, base).log_constant
    b = verify_bound_3_1_i(f, G2, G2, r, 0.5, big).log_constant
    assert b >= a


@settings(max_examples=10)
@given(names, st.floats(min_value=0.25, max_value=4.0), st.floats(min_value=0.25, max_value=4.0))
def test_o_ell_norm_monotone_in_ell(name, a, b):
    f = named(name)
    lo, hi = sorted((a, b))
    assert o_ell_norm(f, G2, G2, lo) >= o_ell_norm(f, G2, G2, hi) * (1 - 1e-12)


@settings(max_examples=10)
@given(names, st.floats(min_value=0.05, max_value=5.0))
def test_pass_reports_have_nonpositive_residuals(name, eps):
    rep = verify_bound_3_1_i(named(name), G2, G2, ONE, eps)
    assert rep.passed
    assert np.all(rep.residuals <= 1e-12)


@settings(max_examples=10)
@given(names, st.floats(min_value=0.05, max_value=5.0))
def test_strong_dominates_eps_property(name, eps):
    f = named(name)
    assert verify_bound_strong(f, G2, G2, ONE).log_constant >= verify_bound_3_1_i(f, G2, G2, ONE, eps).log_constant - 1e-12
