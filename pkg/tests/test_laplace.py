import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tauberlab.cones import Cone
from tauberlab.errors import AccuracyError, ConditioningWarning, DomainError, IntegrabilityError
from tauberlab.gelfand import Gaussian, delta, dilate, heaviside, power
from tauberlab.laplace import (
    LaplaceFunction,
    convolution_bounded_check,
    convolve,
    from_jsonl,
    inverse_laplace,
    laplace,
    laplace_quadrature,
    slice_csv,
    stft,
    to_jsonl,
)
from tauberlab.weights import RSequence, WeightSequence

GAMMA3 = power(2.0, 1.0, 0.5)  # ξ² e^{-ξ} / 2, transform 1/(1 - iz)³
DENSITIES = {
    "heaviside": heaviside(1),
    "xplus": power(1.0),
    "gamma3": GAMMA3,
    "quadrant": heaviside(2),
}


# forward transform --------------------------------------------------------------------


def test_closed_form_examples():
    assert laplace(delta(1), 0.3 + 2j) == 1
    assert laplace(heaviside(1), 1j) == pytest.approx(1.0, abs=1e-15)
    assert laplace(power(1.0), 1j) == pytest.approx(1.0, abs=1e-15)


def test_delta_prime_transform():
    z = 0.5 + 1.5j
    assert laplace(delta(1, 1), z) == pytest.approx(-1j * z, rel=1e-15)


def test_quadrature_examples():
    assert laplace_quadrature(heaviside(1), 2j) == pytest.approx(0.5, rel=1e-8)
    z = 1 + 1j
    assert laplace_quadrature(power(1.0), z) == pytest.approx(1 / (-1j * z) ** 2, rel=1e-8)
    assert laplace_quadrature(heaviside(2), np.array([1j, 2j])) == pytest.approx(0.5, rel=1e-8)


def test_outside_tube_rejected():
    with pytest.raises(DomainError):
        laplace(heaviside(1), 1.0 - 0.5j)


def test_near_boundary_warns():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        laplace(heaviside(1), 1.0 + 1e-13j)
    assert any(issubclass(w.category, ConditioningWarning) for w in caught)


def test_quadrature_rejects_point_atoms():
    with pytest.raises(Exception):
        laplace_quadrature(delta(1), 1j)


def test_growing_density_has_no_transform():
    with pytest.raises(DomainError):
        laplace(power(0.0, -1.0), 0.5j)


# inversion ------------------------------------------------------------------------------


def test_inverse_examples():
    F = LaplaceFunction.of(GAMMA3)
    res = inverse_laplace(F, [1.0], np.array([1.0, -0.5]))
    assert res.values[0].real == pytest.approx(math.exp(-1) / 2, abs=1e-6)
    assert abs(res.values[1]) < 1e-6


def test_inverse_rejects_non_decaying():
    F = LaplaceFunction.from_callable(lambda z: np.ones(z.shape[:-1], dtype=complex), Cone.orthant(1), "one")
    with pytest.raises(IntegrabilityError):
        inverse_laplace(F, [1.0], np.array([0.0, 1.0]))


def test_inverse_y_independence():
    xi = np.linspace(-1, 10, 45)
    a = inverse_laplace(GAMMA3, [0.5], xi).values
    b = inverse_laplace(GAMMA3, [2.0], xi).values
    assert np.max(np.abs(a - b)) < 1e-6


def test_inverse_two_dim_respects_node_budget():
    # axis decay |x|^{-4} meets the (1 + |x|)^{n+2} precondition, but the slice
    # cutoff reaches |x| ~ 1e3, far beyond a small node budget
    f = power([3.0, 3.0], [1.0, 1.0], 1 / 36)
    with pytest.raises(AccuracyError):
        inverse_laplace(f, [1.0, 1.0], np.array([[0.5, 1.0]]), max_points=10_000)


# STFT and convolution ------------------------------------------------------------------------


def test_stft_of_delta_is_window_conjugate():
    psi = Gaussian(0.3, 1.0, amp=1 + 2j)
    x = 0.7
    assert stft(delta(1), psi, x, 0.4) == pytest.approx(np.conj(psi(np.array([[-x]]))[0]), rel=1e-14)


def test_stft_of_delta_prime():
    psi = Gaussian(0.0, 1.0)
    x, xi = 0.5, 0.25
    # -d/dt [ψ(t - x) e^{-2πiξt}] at t = 0
    d = psi.deriv((1,), np.array([[-x]]))[0] - 2j * math.pi * xi * psi(np.array([[-x]]))[0]
    assert stft(delta(1, 1), psi, x, xi) == pytest.approx(-d, rel=1e-13)


def test_convolution_examples():
    psi = Gaussian(0.0, 1.0)
    assert convolve(delta(1), psi, 0.4) == pytest.approx(psi(np.array([[0.4]]))[0], rel=1e-14)
    assert convolve(delta(1, 1), psi, 0.4) == pytest.approx(psi.deriv((1,), np.array([[0.4]]))[0], rel=1e-14)
    assert convolve(heaviside(1), psi, 10.0).real == pytest.approx(math.sqrt(math.pi), rel=1e-8)


def test_convolution_bounded_check_examples():
    psi = Gaussian(0.0, 1.0)
    W = WeightSequence.gevrey(2)
    xs = np.linspace(-20, 20, 81)
    rep = convolution_bounded_check(delta(1), psi, W, 1.0, xs)
    assert rep.passed and rep.constant <= 1.0
    assert convolution_bounded_check(heaviside(1), psi, W, 1.0, xs).passed
    grow = convolution_bounded_check(power(0.0, -1.0), psi, W, 1.0, np.linspace(0, 40, 41))
    assert not grow.passed


def test_streaming_formats():
    zs = np.array([[1 + 1j], [2 + 0.5j]])
    vals = np.array([1 + 2j, 3 - 1j])
    back_z, back_v = from_jsonl(to_jsonl(zs, vals))
    assert np.array_equal(back_z, zs) and np.array_equal(back_v, vals)
    assert slice_csv([0.0, 1.0], vals).count("\n") == 3


# properties ------------------------------------------------------------------------------------

names = st.sampled_from(sorted(DENSITIES))
xs = st.floats(min_value=-5, max_value=5)
ys = st.floats(min_value=0.2, max_value=5)


@given(names, xs, ys, xs, ys)
def test_closed_form_matches_quadrature(name, x1, y1, x2, y2):
    f = DENSITIES[name]
    z = np.array([complex(x1, y1), complex(x2, y2)][: f.dim])
    a, b = laplace(f, z), laplace_quadrature(f, z)
    assert abs(a - b) <= 1e-8 * abs(a)


@given(names, xs, ys)
def test_cauchy_riemann_second_order(name, x, y):
    f = DENSITIES[name]
    n = f.dim
    z0 = np.full(n, complex(x, y))

    def residual(h):
        e = np.zeros(n)
        e[0] = h
        dx = (laplace(f, z0 + e) - laplace(f, z0 - e)) / (2 * h)
        dy = (laplace(f, z0 + 1j * e) - laplace(f, z0 - 1j * e)) / (2 * h)
        return abs(dx + 1j * dy)

    h = 0.05 * y
    r1, r2 = residual(h), residual(h / 2)
    scale = abs(laplace(f, z0)) / y
    # exact holomorphy leaves only rounding; otherwise the residual must shrink like h²
    assert r2 <= 1e-9 * scale or r2 <= r1 / 3


@given(st.sampled_from(["heaviside", "xplus", "gamma3", "delta", "delta_prime"]), st.floats(min_value=1e-3, max_value=1e3), xs, ys)
def test_dilation_scaling(name, r, x, y):
    f = {"delta": delta(1), "delta_prime": delta(1, 1), **DENSITIES}[name]
    z = complex(x, y)
    lhs = laplace(dilate(f, 1.0 / r), z)
    rhs = r ** f.dim * laplace(f, r * z)
    assert abs(lhs - rhs) <= 1e-12 * max(abs(rhs), 1e-300)


@given(xs, st.floats(min_value=-3, max_value=3), st.floats(min_value=-1, max_value=1))
def test_stft_convolution_identity(x, xi, c):
    psi = Gaussian(c, 1.2)
    window = psi.affine(-1.0, 0.0).conj().modulated(2 * math.pi * xi)
    for f in (delta(1), delta(1, 1), heaviside(1), GAMMA3):
        a = abs(stft(f, psi, x, xi))
        b = abs(convolve(f, window, x))
        assert abs(a - b) <= 1e-10 * max(1.0, b)


@settings(max_examples=8)
@given(st.floats(min_value=0.3, max_value=3.0))
def test_inversion_round_trip_on_slices(y):
    xi = np.linspace(0.2, 8, 12)
    res = inverse_laplace(GAMMA3, [y], xi)
    assert np.max(np.abs(res.values - GAMMA3.density(xi[:, None]))) < 1e-6
