import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from tauberlab.cones import Cone
from tauberlab.errors import DomainError, PreconditionError, UsageError
from tauberlab.gelfand import Gaussian, delta, dilate, heaviside, named, pair, power
from tauberlab.laplace import laplace
from tauberlab.tauberian import (
    PipelineConfig,
    RegularlyVarying,
    abelian_check,
    default_battery,
    hemisphere_bound_check,
    identify_g,
    potter_check,
    quasiasymptotic_direct,
    regular_variation_check,
    rho_eval,
    run_pipeline_json,
    scaled_laplace_limit,
    tauberian_pipeline,
)

# regularly varying functions -----------------------------------------------------------


def test_rho_eval_examples():
    assert rho_eval("lambda^1", 10.0) == pytest.approx(10.0, rel=1e-15)
    lam = math.exp(2) - math.e
    assert rho_eval({"alpha": 0, "slow": "log"}, lam) == pytest.approx(2.0, rel=1e-14)
    assert rho_eval(1.0, 2e6) / rho_eval(1.0, 1e6) == pytest.approx(2.0, rel=0.01)


def test_rho_shorthand_parsing():
    assert RegularlyVarying.from_spec("1").alpha == 0.0
    assert RegularlyVarying.from_spec("λ^-2").alpha == -2.0
    assert RegularlyVarying.from_spec("lambda").alpha == 1.0
    with pytest.raises(UsageError):
        RegularlyVarying.from_spec("lambda^x")
    with pytest.raises(UsageError):
        RegularlyVarying(0.0, "bessel")


def test_rho_rejects_nonpositive_lambda():
    with pytest.raises(DomainError):
        rho_eval("lambda", 0.0)


def test_cutoff_only_through_normalized():
    rho = RegularlyVarying(2.0)
    assert rho(0.5) == 0.25
    assert rho.normalized(1.0)(0.5) == 1.0
    assert rho.normalized(1.0)(3.0) == pytest.approx(9.0, rel=1e-15)


def test_regular_variation_flags():
    assert regular_variation_check({"alpha": 1, "slow": "log"})["regularly_varying"]
    assert regular_variation_check({"alpha": 0, "slow": "loglog"})["regularly_varying"]
    assert not regular_variation_check({"alpha": 0, "slow": "osc"})["regularly_varying"]


def test_potter_examples():
    exact = potter_check("lambda^1.5")
    assert exact.passed and exact.log_constant == pytest.approx(0.0, abs=1e-12)
    slow = potter_check({"alpha": 1, "slow": "log"})
    assert slow.passed and slow.refinement_stable and math.isfinite(slow.log_constant)
    osc = potter_check({"alpha": 0, "slow": "osc"})
    assert not osc.passed and osc.notes


def test_potter_rejects_bad_grid():
    with pytest.raises(DomainError):
        potter_check("1", lam_grid=[0.0, 1.0])


# ray limits ---------------------------------------------------------------------------------


def test_ray_limit_examples():
    t = scaled_laplace_limit(heaviside(1), "1", [2.0])
    assert t.all_converged and t.limits[0] == pytest.approx(0.5, rel=1e-12)
    assert np.allclose(t.values[0], 0.5, rtol=1e-12)
    t = scaled_laplace_limit(power(1.0), "lambda", [1.0])
    assert t.all_converged and t.limits[0] == pytest.approx(1.0, rel=1e-12)
    t = scaled_laplace_limit(delta(1, 1), "lambda^-2", [1.0])
    assert t.all_converged and t.limits[0] == pytest.approx(1.0, rel=1e-12)


def test_ray_limit_wrong_index_is_reported_not_raised():
    t = scaled_laplace_limit(power(1.0), "lambda^2", [1.0])
    assert not t.all_converged


def test_ray_limit_with_linear_correction():
    # L{γ₃}(riy) = 1/(1 + ry)³ -> 1 with an O(r) correction
    t = scaled_laplace_limit(power(2.0, 1.0, 0.5), "lambda^-1", [1.0, 2.0])
    assert t.all_converged and np.allclose(t.limits, 1.0, rtol=1e-6)


def test_rays_outside_dual_cone_rejected():
    with pytest.raises(DomainError):
        scaled_laplace_limit(heaviside(1), "1", [-1.0])


# hemisphere bound ---------------------------------------------------------------------------


def test_hemisphere_examples():
    rep = hemisphere_bound_check(heaviside(1), "1", [1.0])
    assert rep.passed and rep.log_constant <= 1e-12
    rep = hemisphere_bound_check(power(1.0), "lambda", [1.0])
    assert rep.passed and math.isfinite(rep.log_constant)
    # too small an index makes the quantity grow like 1/r
    rep = hemisphere_bound_check(power(1.0), "1", [1.0])
    assert not rep.passed
    # too large an index makes it vanish, which the bound leg accepts
    assert hemisphere_bound_check(power(1.0), "lambda^2", [1.0]).passed


def test_hemisphere_rejects_omega_outside_dual():
    with pytest.raises(DomainError):
        hemisphere_bound_check(heaviside(1), "1", [-1.0])


# direct oracle --------------------------------------------------------------------------------


def test_direct_oracle_examples():
    phi = Gaussian(1.0, 1.0)
    tab = quasiasymptotic_direct(heaviside(1), "1", [phi])
    exact = quad(lambda t: math.exp(-((t - 1.0) ** 2)), 0, math.inf, epsabs=0, epsrel=1e-12)[0]
    assert tab.limits[0].real == pytest.approx(exact, rel=1e-8)
    tab = quasiasymptotic_direct(delta(1), "lambda^-1", [phi])
    assert np.allclose(tab.values[0], math.exp(-1), rtol=1e-13)
    f = power(1.0) + delta(1)
    tab = quasiasymptotic_direct(f, "lambda", [phi])
    target = pair(power(1.0), phi)
    errs = np.abs(tab.values[0] - target)
    # the δ part contributes φ(0)/λ², which vanishes along the table
    assert errs[-1] < 1e-10 and np.all(np.diff(errs) <= 1e-14)


# identification and Abelian check ---------------------------------------------------------------


def test_identify_scaled_atom():
    rays = np.array([[0.5], [1.0], [2.0]])
    limits = 3.0 * laplace(heaviside(1), 1j * rays).reshape(-1)
    g, res = identify_g(limits, rays, 0.0, Cone.orthant(1))
    assert res < 1e-12 and g.atoms[0].coef == 3.0


def test_identify_no_match():
    rays = np.array([[0.5], [1.0], [2.0]])
    g, res = identify_g(np.array([1.0, 5.0, -2.0]), rays, 0.0, Cone.orthant(1))
    assert g is None and res > 1e-3


@pytest.mark.parametrize("f,rho,g", [(heaviside(1), "1", heaviside(1)), (power(1.0), "lambda", power(1.0)), (delta(1, 1), "lambda^-2", delta(1, 1))])
def test_abelian_uniform_on_patch_for_homogeneous_atoms(f, rho, g):
    assert abelian_check(f, rho, g)["relative_error"] < 1e-5


def test_abelian_error_is_first_order_for_integrable_density():
    # γ₃ -> δ carries an O(r) correction, which dominates 1e-5 at r = 1e-4
    g3 = power(2.0, 1.0, 0.5)
    a = abelian_check(g3, "lambda^-1", delta(1), r=1e-4)["max_error"]
    b = abelian_check(g3, "lambda^-1", delta(1), r=1e-5)["max_error"]
    assert b == pytest.approx(a / 10, rel=0.01)


# pipeline -----------------------------------------------------------------------------------------


def test_pipeline_examples():
    v = tauberian_pipeline(heaviside(1), "1")
    assert v.passed and v.g_label == "heaviside"
    v = tauberian_pipeline(delta(1, 1), "lambda^-2")
    assert v.passed and v.g_label == "delta_prime"
    v = tauberian_pipeline(power(1.0), "lambda^2")
    assert not v.passed and not v.legs["limits"]


def test_pipeline_two_dim_quadrant():
    v = tauberian_pipeline(heaviside(2), "1")
    assert v.passed and v.g_label == "heaviside2"


def test_pipeline_needs_weight_hypotheses():
    with pytest.raises(PreconditionError):
        tauberian_pipeline(heaviside(1), "1", PipelineConfig(W_M="gevrey:0.5"))


def test_pipeline_config_rejects_unknown_keys():
    with pytest.raises(UsageError):
        PipelineConfig.from_dict({"gird": {}})


def test_pipeline_json_round_trip():
    v = run_pipeline_json(json.dumps({"f": "xplus", "rho": {"alpha": 1}}))
    d = json.loads(v.to_json())
    assert d["passed"] and d["g_label"] == "xplus" and d["legs"] == {"limits": True, "bound": True, "oracle": True}
    assert "verdict: pass" in v.summary()


# properties ----------------------------------------------------------------------------------------

DEGREES = {"delta": -1, "delta_prime": -2, "heaviside": 0, "xplus": 1, "gamma3": -1}


@settings(max_examples=25)
@given(st.sampled_from(sorted(DEGREES)), st.sampled_from([-2, -1, 0, 1, 2]))
def test_pipeline_passes_exactly_when_degree_matches(name, alpha):
    assert tauberian_pipeline(named(name), alpha).passed == (DEGREES[name] == alpha)


@settings(max_examples=10)
@given(st.sampled_from(["delta", "delta_prime", "heaviside", "xplus"]), st.floats(min_value=0.1, max_value=100.0))
def test_identified_g_is_homogeneous(name, lam):
    v = tauberian_pipeline(named(name), DEGREES[name])
    g = v.g
    for phi in default_battery(1):
        # ⟨g(λ·), φ⟩ = λ^α ⟨g, φ⟩ with ⟨g(λ·), φ⟩ = λ^{-n} ⟨g, φ(·/λ)⟩
        lhs = pair(dilate(g, lam), phi)
        rhs = lam ** DEGREES[name] * pair(g, phi)
        assert abs(lhs - rhs) <= 1e-8 * max(abs(rhs), 1e-300)


@settings(max_examples=10)
@given(st.sampled_from(sorted(DEGREES)))
def test_pipeline_limits_match_transform_of_g(name):
    v = tauberian_pipeline(named(name), DEGREES[name])
    expected = np.asarray(laplace(v.g, 1j * v.limits.rays)).reshape(-1)
    assert np.max(np.abs(v.limits.limits - expected) / np.abs(expected)) < 1e-6


@given(st.floats(min_value=-3, max_value=3), st.sampled_from(["none", "log", "loglog"]), st.floats(min_value=-2, max_value=2))
def test_slowly_varying_ratios_settle(alpha, slow, beta):
    rho = RegularlyVarying(alpha, slow, beta)
    for a in (0.5, 2.0):
        assert rho(1e9 * a) / rho(1e9) == pytest.approx(a**alpha, rel=0.05)
