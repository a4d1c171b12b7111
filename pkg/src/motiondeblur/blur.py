"""Forward blur: Monte-Carlo averaging of moved copies and exact kernel convolution."""

from __future__ import annotations

import enum
import math

import numpy as np
from scipy.signal import fftconvolve

from .imaging import (CartesianImage, PolarImage, RigidMotion, back_to_cartesian,
                      cartesian_to_polar, transform_image)
from .kernels import (DomainError, MotionParams, default_cutoff, gauss2d, sample_rotation,
                      sample_translation, wrapped_gauss)


class Order(enum.Enum):
    TRANSLATE_THEN_ROTATE = "translate-then-rotate"
    ROTATE_THEN_TRANSLATE = "rotate-then-translate"


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for Monte-Carlo sample ``index``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def sample_motion(params: MotionParams, rng) -> RigidMotion:
    dx = dy = theta = 0.0
    if params.t1 > 0:
        dx, dy = sample_translation(params, rng)
    if params.t2 > 0:
        theta = sample_rotation(params, rng)
    return RigidMotion(dx, dy, theta)


def monte_carlo_blur(img: CartesianImage, params: MotionParams, n_samples: int, seed: int = 0):
    """Average of ``n_samples`` copies of ``img`` moved by random rigid motions.

    Sample ``i`` draws from its own stream derived from ``(seed, i)`` and the
    sum runs in index order, so results are reproducible bit for bit.
    """
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    params.require_blur()
    acc = np.zeros(img.shape)
    for i in range(n_samples):
        g = sample_motion(params, sample_rng(seed, i))
        acc += transform_image(img, g).values
    return img.like(acc / n_samples)


def translational_kernel(t1: float, pitch: float = 1.0, cutoff: float = 1e-12):
    """Sampled planar heat kernel, truncated where it drops below ``cutoff * peak``.

    Normalized to unit sum.
    """
    if not t1 > 0:
        raise DomainError("t1 must be > 0")
    radius = math.sqrt(4.0 * t1 * math.log(1.0 / cutoff))
    n = int(math.floor(radius / pitch))
    x = np.arange(-n, n + 1) * pitch
    x1, x2 = np.meshgrid(x, x)
    k = gauss2d(x1, x2, t1)
    k[x1 * x1 + x2 * x2 > radius * radius] = 0.0
    return k / k.sum()


def exact_blur_translational(img: CartesianImage, t1: float, cutoff: float = 1e-12):
    k = translational_kernel(t1, img.pitch, cutoff)
    return img.like(fftconvolve(img.values, k, mode="same"))


def rotational_kernel(n_phi: int, t2: float, K=None):
    """Wrapped normal sampled on the angular grid, as weights summing to one."""
    phi = np.arange(n_phi) * (2 * math.pi / n_phi)
    w = wrapped_gauss(phi, t2, K)
    return w / w.sum()


def exact_blur_rotational(pol: PolarImage, t2: float, K=None) -> PolarImage:
    """Circular convolution of every ring with the wrapped normal."""
    if not t2 > 0:
        raise DomainError("t2 must be > 0")
    w = rotational_kernel(pol.n_phi, t2, K if K is not None else default_cutoff(t2))
    spec = np.fft.rfft(pol.values, axis=1) * np.fft.rfft(w)
    return pol.like(np.fft.irfft(spec, n=pol.n_phi, axis=1))


def rotational_blur_image(img: CartesianImage, t2: float, K=None, n_r=None, n_phi=None):
    """Rotational blur of a Cartesian image through the polar round trip."""
    pol = cartesian_to_polar(img, n_r, n_phi)
    return back_to_cartesian(exact_blur_rotational(pol, t2, K), img)


def exact_blur_se2(img: CartesianImage, params: MotionParams,
                   order: Order = Order.TRANSLATE_THEN_ROTATE, n_r=None, n_phi=None):
    """Combined blur as a composition of the translational and rotational blurs.

    A zero diffusion time skips that factor.
    """
    params.require_blur()
    order = Order(order)

    def trans(x):
        return exact_blur_translational(x, params.t1) if params.t1 > 0 else x

    def rot(x):
        return rotational_blur_image(x, params.t2, params.K, n_r, n_phi) if params.t2 > 0 else x

    if order is Order.TRANSLATE_THEN_ROTATE:
        return rot(trans(img))
    return trans(rot(img))


def add_noise(img: CartesianImage, sigma: float, seed: int = 0) -> CartesianImage:
    """Add i.i.d. N(0, sigma^2) noise per pixel."""
    if sigma < 0:
        raise DomainError("sigma must be >= 0")
    if sigma == 0:
        return img
    rng = np.random.default_rng(seed)
    return img.like(img.values + rng.normal(0.0, sigma, size=img.shape))
