import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from motiondeblur.kernels import (DomainError, MotionParams, default_cutoff, folded_gauss, gauss1d,
                                  gauss2d, kernel_ft_rotational, kernel_ft_se2,
                                  kernel_ft_translational, sample_rotation, sample_translation,
                                  se2_kernel_density, wrapped_gauss)
from motiondeblur.se2 import se2_transform_numeric


def test_gauss1d_values():
    assert gauss1d(0.0, 0.25) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-15)
    assert gauss1d(1.0, 0.25) == pytest.approx(math.exp(-1) / math.sqrt(math.pi), rel=1e-14)
    assert gauss1d(0.0, 0.25) == pytest.approx(0.564190, abs=1e-6)
    assert gauss1d(1.0, 0.25) == pytest.approx(0.207554, abs=1e-6)


@pytest.mark.parametrize("t", [0.05, 0.25, 2.0])
def test_gauss1d_mass_and_variance(t):
    x = np.linspace(-40 * math.sqrt(t), 40 * math.sqrt(t), 20001)
    f = gauss1d(x, t)
    assert np.trapezoid(f, x) == pytest.approx(1.0, abs=1e-8)
    assert np.trapezoid(x * x * f, x) == pytest.approx(2 * t, rel=1e-8)


@given(st.floats(-50, 50), st.floats(1e-3, 100))
def test_gauss1d_even(x, t):
    assert gauss1d(x, t) == gauss1d(-x, t)


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_densities_reject_nonpositive_t(bad):
    for fn in (lambda: gauss1d(0.0, bad), lambda: gauss2d(0.0, 0.0, bad),
               lambda: wrapped_gauss(0.0, bad)):
        with pytest.raises(DomainError):
            fn()


def test_gauss2d_values_and_mass():
    t = 0.7
    assert gauss2d(0.0, 0.0, t) == pytest.approx(1 / (4 * math.pi * t), rel=1e-15)
    assert gauss2d(1.0, 0.0, 0.25) == pytest.approx(gauss1d(1.0, 0.25) * gauss1d(0.0, 0.25), rel=1e-15)
    L = 10 * math.sqrt(t)
    x = np.linspace(-L, L, 801)
    X1, X2 = np.meshgrid(x, x)
    mass = np.trapezoid(np.trapezoid(gauss2d(X1, X2, t), x), x)
    assert mass == pytest.approx(1.0, abs=1e-10)


def test_wrapped_gauss_large_t_is_uniform():
    t = 8.0
    th = np.linspace(-math.pi, math.pi, 17)
    # leading term exp(-t) / pi; the rest of the tail adds at most a factor (1 + 2 exp(-3t))
    dev = np.abs(wrapped_gauss(th, t) - 1 / (2 * math.pi)).max()
    assert dev <= math.exp(-t) / math.pi * (1 + 2 * math.exp(-3 * t))


def test_wrapped_gauss_matches_folded_sum():
    # folded normal, summed independently from the series form
    v = wrapped_gauss(0.0, 0.01, 100)
    ref = math.fsum(gauss1d(-2 * math.pi * n, 0.01) for n in range(-5, 6))
    assert v == pytest.approx(ref, abs=1e-10)
    th = np.linspace(-math.pi, math.pi, 101)
    for t in (0.005, 0.1, 1.0):
        assert np.abs(wrapped_gauss(th, t, 100) - folded_gauss(th, t)).max() < 1e-10


@pytest.mark.parametrize("t", [0.01, 0.3, 2.0])
def test_wrapped_gauss_unit_mass_and_positive(t):
    th = np.arange(4096) * (2 * math.pi / 4096)
    f = wrapped_gauss(th, t)
    assert f.min() >= -1e-13  # nonnegative up to series round-off
    assert f.sum() * (2 * math.pi / 4096) == pytest.approx(1.0, abs=1e-12)
    assert np.isrealobj(f)


def test_wrapped_gauss_semigroup_in_coefficients():
    # circular convolution on a fine grid equals the density at t1 + t2
    n = 2048
    th = np.arange(n) * (2 * math.pi / n)
    a, b = wrapped_gauss(th, 0.05), wrapped_gauss(th, 0.12)
    conv = np.real(np.fft.ifft(np.fft.fft(a) * np.fft.fft(b))) * (2 * math.pi / n)
    assert np.abs(conv - wrapped_gauss(th, 0.17)).max() < 1e-9


def test_gauss1d_semigroup():
    x = np.linspace(-30, 30, 6001)
    dx = x[1] - x[0]
    conv = np.convolve(gauss1d(x, 0.4), gauss1d(x, 0.9), mode="same") * dx
    assert np.abs(conv - gauss1d(x, 1.3)).max() < 1e-8


def test_default_cutoff_tail():
    for t2 in (0.001, 0.02, 0.5, 3.0):
        K = default_cutoff(t2)
        assert K >= 1
        assert math.exp(-K * K * t2) <= 1e-14 or K == 1
    p = MotionParams(0.0, 0.02)
    assert p.series_cutoff == default_cutoff(0.02)
    assert p.check_tail()


def test_motion_params_validation():
    with pytest.raises(DomainError):
        MotionParams(-1.0, 0.0)
    with pytest.raises(DomainError):
        MotionParams(0.0, 0.1, series_cutoff=0)
    with pytest.raises(DomainError):
        MotionParams(0.0, 0.0).require_blur()
    p = MotionParams(1.5, 0.02, 40)
    assert MotionParams.from_dict(p.to_dict()) == p


def test_se2_density_phi_independent_and_value():
    P = MotionParams(0.25, 0.1, 50)
    assert se2_kernel_density(0.7, 0.1, 0.3, P) == se2_kernel_density(0.7, 2.9, 0.3, P)
    assert se2_kernel_density(0.0, 0.0, 0.0, P) == pytest.approx(
        wrapped_gauss(0.0, 0.1, 50) / math.pi, rel=1e-14)


def test_se2_density_unit_mass():
    P = MotionParams(0.5, 0.1)
    R = math.sqrt(4 * P.t1 * 40)

    def f(th, phi, r):
        return se2_kernel_density(r, phi, th, P) * r

    mass, _ = integrate.tplquad(f, 0, R, 0, 2 * math.pi, -math.pi, math.pi, epsabs=1e-10)
    assert mass == pytest.approx(1.0, abs=1e-6)


def test_kernel_ft_values():
    assert kernel_ft_translational(0.0, 0.0, 3.0) == 1.0
    assert kernel_ft_translational(1.0, 1.0, 0.5) == pytest.approx(math.exp(-1), rel=1e-15)
    assert kernel_ft_rotational(0, 0.3) == 1.0
    assert kernel_ft_rotational(2, 0.1) == pytest.approx(0.670320, abs=1e-6)
    assert kernel_ft_rotational(-3, 0.1) == kernel_ft_rotational(3, 0.1)
    assert kernel_ft_se2(0.0, 0, MotionParams(0.3, 0.2)) == 1.0
    assert kernel_ft_se2(1.0, 1, MotionParams(0.5, 0.1)) == pytest.approx(0.548812, abs=1e-6)


def test_kernel_ft_translational_matches_dft_of_sampled_density():
    t = 0.8
    h = 0.05
    x = (np.arange(-400, 400)) * h
    X1, X2 = np.meshgrid(x, x)
    f = gauss2d(X1, X2, t)
    for w1, w2 in ((0.0, 0.0), (1.0, -0.5), (2.0, 1.5), (0.3, 3.0)):
        num = np.sum(f * np.exp(-1j * (w1 * X1 + w2 * X2))) * h * h
        assert abs(num - kernel_ft_translational(w1, w2, t)) < 1e-6


def test_kernel_ft_rotational_matches_quadrature():
    n_th = 2048
    th = np.arange(n_th) * (2 * math.pi / n_th)
    for t in (0.02, 0.3):
        f = wrapped_gauss(th, t)
        for n in range(-6, 7):
            num = np.sum(f * np.exp(-1j * n * th)) * (2 * math.pi / n_th)
            assert abs(num - kernel_ft_rotational(n, t)) < 1e-9


def test_kernel_ft_se2_matches_group_quadrature():
    P = MotionParams(0.5, 0.1)
    R = math.sqrt(4 * P.t1 * 40)

    def f(r, phi, th):
        return se2_kernel_density(r, phi, th, P)

    for m, n, p in ((0, 0, 0.5), (1, 1, 1.0), (-2, -2, 1.7), (3, 3, 0.4), (0, 2, 1.0), (1, -1, 1.2)):
        num = se2_transform_numeric(f, m, n, p, R)
        ref = kernel_ft_se2(p, m, P) if m == n else 0.0
        assert abs(num - ref) < 1e-4


def test_sample_translation_statistics():
    P = MotionParams(2.0, 0.0)
    rng = np.random.default_rng(7)
    d = np.array([sample_translation(P, rng) for _ in range(100_000)])
    bound = 4 * math.sqrt(2 * P.t1 / 1e5)
    assert np.all(np.abs(d.mean(axis=0)) < bound)
    assert np.all(np.abs(d.var(axis=0) / (2 * P.t1) - 1) < 0.05)
    a = [sample_translation(P, np.random.default_rng(3)) for _ in range(2)]
    assert a[0] == a[1]


def test_sample_rotation_statistics():
    P = MotionParams(0.0, 0.01)
    rng = np.random.default_rng(11)
    th = np.array([sample_rotation(P, rng) for _ in range(100_000)])
    assert np.all((th >= -math.pi) & (th < math.pi))
    assert abs(math.atan2(np.sin(th).mean(), np.cos(th).mean())) < 0.02
    assert sample_rotation(P, np.random.default_rng(5)) == sample_rotation(P, np.random.default_rng(5))


def test_sample_rotation_histogram_matches_wrapped_gauss():
    from scipy.stats import chisquare
    P = MotionParams(0.0, 0.8)
    rng = np.random.default_rng(2)
    th = np.array([sample_rotation(P, rng) for _ in range(50_000)])
    edges = np.linspace(-math.pi, math.pi, 33)
    obs, _ = np.histogram(th, edges)
    fine = np.linspace(-math.pi, math.pi, 32 * 64 + 1)
    dens = wrapped_gauss(fine, P.t2)
    cell = [np.trapezoid(dens[k * 64:(k + 1) * 64 + 1], fine[k * 64:(k + 1) * 64 + 1]) for k in range(32)]
    exp = np.array(cell) * th.size
    assert chisquare(obs, exp * obs.sum() / exp.sum()).pvalue > 1e-3


def test_samplers_reject_zero_t():
    with pytest.raises(DomainError):
        sample_translation(MotionParams(0.0, 0.1), np.random.default_rng(0))
    with pytest.raises(DomainError):
        sample_rotation(MotionParams(1.0, 0.0), np.random.default_rng(0))


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 20), st.integers(-30, 30), st.floats(0, 2), st.floats(0, 2))
def test_kernel_ft_se2_in_unit_interval(p, m, t1, t2):
    v = kernel_ft_se2(p, m, MotionParams(t1, t2))
    assert 0 <= v <= 1
