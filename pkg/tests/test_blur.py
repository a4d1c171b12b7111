import math

import numpy as np
import pytest

from motiondeblur import phantoms
from motiondeblur.blur import (Order, add_noise, exact_blur_rotational, exact_blur_se2,
                               exact_blur_translational, monte_carlo_blur, rotational_kernel,
                               translational_kernel)
from motiondeblur.imaging import CartesianImage, PolarImage, cartesian_to_polar, rmse, total
from motiondeblur.kernels import DomainError, MotionParams, gauss2d, kernel_ft_rotational, wrapped_gauss


def smooth(size=64, sigma=7.0, center=(3.0, -2.0)):
    return phantoms.gaussian(size, 1.0, sigma, center)


def test_monte_carlo_deterministic_and_validated():
    img = phantoms.blobs()
    P = MotionParams(2.0, 0.02)
    a = monte_carlo_blur(img, P, 20, seed=5)
    b = monte_carlo_blur(img, P, 20, seed=5)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, monte_carlo_blur(img, P, 20, seed=6).values)
    with pytest.raises(DomainError):
        monte_carlo_blur(img, P, 0)
    with pytest.raises(DomainError):
        monte_carlo_blur(img, MotionParams(0.0, 0.0), 10)


def test_monte_carlo_single_tiny_motion_is_near_identity():
    img = smooth()
    out = monte_carlo_blur(img, MotionParams(1e-8, 1e-8), 1)
    assert rmse(out, img) < 1e-3 * img.value_range()


def test_monte_carlo_converges_to_exact_translational():
    img = smooth()
    P = MotionParams(2.0, 0.0)
    mc = monte_carlo_blur(img, P, 100, seed=0)
    ex = exact_blur_translational(img, P.t1)
    assert rmse(mc, ex) <= 3 / math.sqrt(100) * float(np.std(img.values))


def test_monte_carlo_matches_exact_se2_at_many_samples():
    img = smooth(sigma=8.0)
    P = MotionParams(2.0, 0.02)
    mc = monte_carlo_blur(img, P, 10_000, seed=1)
    ex = exact_blur_se2(img, P)
    # Monte-Carlo spread (3 / sqrt(N) of the image std) plus the bilinear bias of the sampler
    assert rmse(mc, ex) <= 3 / math.sqrt(10_000) * float(np.std(img.values)) + 2e-3 * img.value_range()


def test_translational_kernel_normalized_and_delta_response():
    k = translational_kernel(2.0)
    assert k.sum() == pytest.approx(1.0, abs=1e-15)
    n = k.shape[0] // 2
    x = np.arange(-n, n + 1)
    X1, X2 = np.meshgrid(x, x)
    ref = gauss2d(X1, X2, 2.0)
    ref[X1 ** 2 + X2 ** 2 > 4 * 2.0 * math.log(1e12)] = 0
    assert np.allclose(k, ref / ref.sum(), atol=1e-16)
    delta = np.zeros((61, 61))
    delta[30, 30] = 1.0
    out = exact_blur_translational(CartesianImage(delta), 2.0)
    assert np.allclose(out.values[30 - n:31 + n, 30 - n:31 + n], k, atol=1e-15)


def test_translational_blur_preserves_mass():
    # support well inside the frame so nothing leaks past the zero boundary
    img = smooth(sigma=3.0, center=(0.0, 0.0))
    assert total(exact_blur_translational(img, 2.0)) == pytest.approx(total(img), rel=1e-12)


def test_translational_blur_matches_frequency_product():
    img = phantoms.blobs(48)
    pad = 40
    big = np.pad(img.values, pad)
    out = exact_blur_translational(CartesianImage(big), 1.5).values
    k = translational_kernel(1.5)
    kp = np.zeros_like(big)
    n = k.shape[0] // 2
    kp[:k.shape[0], :k.shape[1]] = k
    kp = np.roll(kp, (-n, -n), axis=(0, 1))
    ref = np.real(np.fft.ifft2(np.fft.fft2(big) * np.fft.fft2(kp)))
    assert np.abs(out - ref).max() < 1e-8


def test_rotational_blur_radial_unchanged_and_ring_impulse():
    pol = PolarImage(np.outer(np.linspace(1, 2, 5), np.ones(64)), 5.0)
    out = exact_blur_rotational(pol, 0.05)
    assert np.abs(out.values - pol.values).max() < 1e-12
    vals = np.zeros((3, 128))
    vals[1, 20] = 1.0
    out = exact_blur_rotational(PolarImage(vals, 3.0), 0.05)
    phi = np.arange(128) * (2 * math.pi / 128)
    w = wrapped_gauss(phi - phi[20], 0.05)
    assert np.allclose(out.values[1], w / w.sum(), atol=1e-12)
    assert np.all(out.values[[0, 2]] == 0)


def test_rotational_blur_is_fourier_series_product():
    rng = np.random.default_rng(3)
    pol = PolarImage(rng.random((4, 256)), 2.0)
    out = exact_blur_rotational(pol, 0.03)
    n = np.rint(np.fft.fftfreq(256) * 256)
    ref = np.real(np.fft.ifft(np.fft.fft(pol.values, axis=1) * kernel_ft_rotational(n, 0.03), axis=1))
    assert np.abs(out.values - ref).max() < 1e-9
    assert rotational_kernel(256, 0.03).sum() == pytest.approx(1.0, abs=1e-14)


def test_se2_orders_commute_on_three_phantoms():
    P = MotionParams(2.0, 0.02)
    for name in ("blobs", "spokes", "ring"):
        img = phantoms.make(name, 64)
        a = exact_blur_se2(img, P, Order.TRANSLATE_THEN_ROTATE)
        b = exact_blur_se2(img, P, Order.ROTATE_THEN_TRANSLATE)
        assert rmse(a, b) < 0.02 * img.value_range()


def test_se2_blur_zero_rotation_reduces_to_translational():
    img = phantoms.blobs()
    a = exact_blur_se2(img, MotionParams(2.0, 0.0))
    assert np.array_equal(a.values, exact_blur_translational(img, 2.0).values)


def test_blur_is_linear():
    a, b = phantoms.blobs(), phantoms.ring()
    P = MotionParams(1.0, 0.03)
    for op in (lambda x: exact_blur_se2(x, P), lambda x: monte_carlo_blur(x, P, 5, seed=2)):
        lhs = op(a.like(2 * a.values - 0.5 * b.values)).values
        assert np.allclose(lhs, 2 * op(a).values - 0.5 * op(b).values, atol=1e-12)


def test_noise_statistics():
    img = CartesianImage(np.zeros((256, 256)))
    assert add_noise(img, 0.0) is img
    out = add_noise(img, 0.1, seed=3)
    assert float(np.std(out.values)) == pytest.approx(0.1, rel=0.03)
    assert np.array_equal(out.values, add_noise(img, 0.1, seed=3).values)
    avg = np.mean([add_noise(img, 0.1, seed=s).values for s in range(16)], axis=0)
    assert float(np.std(avg)) == pytest.approx(0.1 / 4, rel=0.1)
    with pytest.raises(DomainError):
        add_noise(img, -1.0)


def test_polar_round_trip_default_grid():
    img = phantoms.blobs()
    pol = cartesian_to_polar(img)
    assert pol.n_r == 64 and pol.n_phi == 256
