import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tauberlab.errors import DomainError, InsufficientDataError, PreconditionError, TruncationError, UsageError
from tauberlab.weights import (
    RSequence,
    WeightSequence,
    associated,
    brute_force_associated,
    check_conditions,
    scaled_associated,
    star_associated,
    verify_condition_bounds,
)

G1, G2 = WeightSequence.gevrey(1), WeightSequence.gevrey(2)


# construction --------------------------------------------------------------------


def test_gevrey1_ratios_are_indices():
    w = WeightSequence.gevrey(1, depth=8)
    assert np.allclose(w.ratios, np.arange(1, 9), rtol=1e-13)


def test_gevrey2_third_ratio():
    assert WeightSequence.gevrey(2, depth=8).ratios[2] == pytest.approx(9.0, rel=1e-13)


def test_gevrey_half_is_valid_but_not_m3():
    w = WeightSequence.gevrey(0.5, depth=8)
    assert np.all(w.values > 0)
    assert not check_conditions(WeightSequence.gevrey(0.5))["M.3'"]


def test_star_values_consistent():
    w = WeightSequence.gevrey(2, depth=20)
    p = np.arange(21)
    assert np.allclose(w.star_values, w.values / [math.factorial(int(k)) for k in p], rtol=1e-12)


@pytest.mark.parametrize("s", [0.0, -1.0])
def test_nonpositive_gevrey_index_rejected(s):
    with pytest.raises(DomainError):
        WeightSequence.gevrey(s)


def test_spec_parsing_round_trip():
    w = WeightSequence.from_spec({"kind": "gevrey", "s": 2.0, "depth": 64})
    assert WeightSequence.from_spec(w.to_dict()).to_dict() == w.to_dict()
    t = WeightSequence.from_spec({"kind": "table", "values": [1, 1, 2, 6, 24]})
    assert t.depth == 4
    with pytest.raises(UsageError):
        WeightSequence.from_spec("bessel:2")


def test_too_short_table_rejected():
    with pytest.raises(InsufficientDataError):
        WeightSequence.table([1.0])


# conditions ----------------------------------------------------------------------


def test_condition_flags_known_family():
    c1, c2, ch = (check_conditions(WeightSequence.gevrey(s)) for s in (1, 2, 0.5))
    assert c2["M.1"] and c2["M.2"] and c2["M.3'"]
    assert c1["M.1"] and not c1["M.3'"]
    assert not ch["M.3'"]


def test_m2_implies_m2_prime():
    for s in (0.5, 1, 1.5, 2, 3):
        c = check_conditions(WeightSequence.gevrey(s))
        assert not c["M.2"] or c["M.2'"]


def test_condition_depth_too_small():
    with pytest.raises(InsufficientDataError):
        check_conditions(G2, depth=2)


def test_gevrey2_inverse_ratio_sum_below_basel():
    inv = 1.0 / G2.ratios
    assert inv.sum() < math.pi**2 / 6


# associated functions --------------------------------------------------------------


def test_associated_examples():
    assert associated(G1, 1.0) == 0.0
    assert associated(G2, 0.0) == 0.0
    v, p = associated(G2, 4.0, return_maximizer=True)
    assert v == pytest.approx(math.log(4), rel=1e-13) and p == 2
    assert star_associated(G2, 1.0) == 0.0
    assert star_associated(G2, 0.0) == 0.0


def test_star_associated_at_e_matches_brute_force():
    # sup_p (p - log p!) over p <= 200
    brute = max(p - math.lgamma(p + 1) for p in range(201))
    assert star_associated(G2, math.e) == pytest.approx(brute, rel=1e-12)


def test_scaled_associated_examples():
    t = np.logspace(-2, 4, 50)
    assert np.array_equal(scaled_associated(G2, RSequence.beurling(1), t), associated(G2, t))
    lv = np.array([2 * math.lgamma(p + 1) + p * math.log(2) for p in range(101)])
    assert scaled_associated(G2, RSequence.beurling(2), 8.0) == pytest.approx(float(brute_force_associated(lv, 8.0)), rel=1e-13)
    r = RSequence("roumieu-log", 1.0)
    assert 0 < scaled_associated(G2, r, 10.0) <= associated(G2, 10.0)


def test_negative_t_rejected():
    with pytest.raises(DomainError):
        associated(G2, -1.0)


def test_table_without_generator_truncates():
    w = WeightSequence.table(log_values=[2 * math.lgamma(p + 1) for p in range(10)])
    with pytest.raises(TruncationError):
        associated(w, 1e6)


def test_non_log_convex_rejected():
    w = WeightSequence.table([1.0, 3.0, 4.0, 40.0])
    with pytest.raises(PreconditionError):
        associated(w, 2.0)


# growth inequalities ---------------------------------------------------------------


def test_condition_bounds_pass_for_gevrey2():
    rep = verify_condition_bounds(G2)
    assert rep.passed
    for part in rep.parts.values():
        assert part.worst_residual <= 1e-12


def test_doubling_at_one_reduces_to_nonnegative_side():
    rep = verify_condition_bounds(G2, t_grid=[1.0])
    assert rep.parts["doubling"].passed


def test_condition_bounds_need_hypotheses():
    with pytest.raises(PreconditionError):
        verify_condition_bounds(WeightSequence.gevrey(0.5), t_grid=[1.0, 10.0])


# properties ----------------------------------------------------------------------------

gevrey_s = st.sampled_from([1.0, 1.5, 2.0, 3.0])
positive_t = st.floats(min_value=1e-3, max_value=1e5, allow_nan=False)


@given(gevrey_s, st.lists(positive_t, min_size=1, max_size=20))
def test_associated_equals_brute_force(s, ts):
    w = WeightSequence.gevrey(s)
    t = np.array(ts)
    vals, p = associated(w, t, return_maximizer=True)
    ext = w.extended(max(w.depth, int(p.max()) + 2))
    assert np.array_equal(vals, brute_force_associated(ext.log_values, t))


@given(gevrey_s, positive_t, positive_t)
def test_associated_monotone(s, a, b):
    w = WeightSequence.gevrey(s)
    lo, hi = sorted((a, b))
    assert associated(w, lo) <= associated(w, hi)


@given(gevrey_s, positive_t)
def test_per_term_dominance(s, t):
    w = WeightSequence.gevrey(s)
    p = np.arange(w.depth + 1)
    terms = p * math.log(t) + w.log_values[0] - w.log_values
    assert associated(w, t) >= terms.max() - 1e-12 * max(1.0, abs(terms.max()))


@given(gevrey_s, st.floats(min_value=0.1, max_value=10.0), positive_t)
def test_beurling_scaling_matches_brute_force(s, ell, t):
    w = WeightSequence.gevrey(s)
    r = RSequence.beurling(ell)
    val, p = scaled_associated(w, r, t, return_maximizer=True)
    depth = max(w.depth, p + 2)
    assert val == float(brute_force_associated(w.scaled(r).extended(depth).log_values, t))
    independent = w.extended(depth).log_values + np.arange(depth + 1) * math.log(ell)
    assert val == pytest.approx(float(brute_force_associated(independent, t)), rel=1e-13, abs=1e-13)


@given(st.floats(min_value=0.5, max_value=4.0), st.floats(min_value=1e-2, max_value=1e3))
def test_growth_equivalence_sampled(h, t):
    """exp(M(ht)) <= C exp(M_l(t)) with l = 1/h and C = 1 (Beurling member of the catalog)."""
    r = RSequence.beurling(1.0 / h)
    assert associated(G2, h * t) <= scaled_associated(G2, r, t) + 1e-12 * max(1.0, associated(G2, h * t))
