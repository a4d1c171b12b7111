"""Translational (2-D Wiener) and rotational (per-ring circular) deconvolution."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .imaging import CartesianImage, PolarImage, back_to_cartesian, cartesian_to_polar
from .kernels import DomainError, kernel_ft_rotational, kernel_ft_translational


class SymmetryError(ArithmeticError):
    """An inverse transform left an imaginary part too large to be round-off."""


def realify(z, scale=None, rtol=1e-8):
    """Drop the imaginary part after checking it is round-off."""
    z = np.asarray(z)
    if not np.iscomplexobj(z):
        return z
    re = z.real
    if scale is None:
        scale = float(re.max() - re.min()) if re.size else 0.0
    scale = max(scale, np.abs(re).max(initial=0.0), 1e-300)
    bad = np.abs(z.imag).max(initial=0.0)
    if bad > rtol * scale:
        raise SymmetryError(f"imaginary residue {bad:.3g} exceeds {rtol:g} x {scale:.3g}")
    return re


def wiener_gain(f, epsilon):
    """``conj(f) / (eps + |f|^2)``; bounded by ``1 / (2 sqrt(eps))`` for real ``f``."""
    return np.conj(f) / (epsilon + np.abs(f) ** 2)


@dataclass(frozen=True, eq=False)
class SpectralImage:
    """Continuous-convention transform of a :class:`CartesianImage`.

    ``values[k2, k1]`` approximates ``int f(x) exp(-i w.x) dx`` at
    ``w1 = 2 pi k1 / (width pitch)`` (column frequency) and
    ``w2 = -2 pi k2 / (height pitch)`` (rows run downwards while ``x2`` runs up);
    ``k`` follow :func:`numpy.fft.fftfreq` ordering.
    """

    values: np.ndarray
    pitch: float = 1.0

    @property
    def height(self):
        return self.values.shape[0]

    @property
    def width(self):
        return self.values.shape[1]

    @property
    def domega(self):
        return 2 * math.pi / (self.width * self.pitch), 2 * math.pi / (self.height * self.pitch)

    def omega(self):
        w1 = 2 * math.pi * np.fft.fftfreq(self.width, self.pitch)
        w2 = -2 * math.pi * np.fft.fftfreq(self.height, self.pitch)
        return np.meshgrid(w1, w2)

    def is_hermitian(self, tol=1e-10) -> bool:
        """``F(-w) == conj F(w)`` wherever ``-w`` is on the grid (Nyquist excluded)."""
        v = self.values
        h, w = v.shape
        rows = np.arange(h) if h % 2 else np.arange(h)[np.arange(h) != h // 2]
        cols = np.arange(w) if w % 2 else np.arange(w)[np.arange(w) != w // 2]
        a = v[np.ix_(rows, cols)]
        b = v[np.ix_((-rows) % h, (-cols) % w)]
        scale = max(np.abs(v).max(), 1e-300)
        return bool(np.abs(a - np.conj(b)).max() <= tol * scale)


def _phase(n, pitch):
    # index j sits at (j - (n-1)/2) * pitch
    k = np.fft.fftfreq(n) * n
    return np.exp(2j * math.pi * k * ((n - 1) / 2.0) / n)


def fft2_forward(img: CartesianImage) -> SpectralImage:
    h, w = img.shape
    F = np.fft.fft2(img.values)
    # columns: exp(-i w1 x1) with x1 = (j - cj) p; rows: x2 = -(i - ci) p, w2 = -w_row
    F = F * _phase(w, img.pitch)[None, :] * _phase(h, img.pitch)[:, None]
    return SpectralImage(F * img.pitch ** 2, img.pitch)


def fft2_inverse(spec: SpectralImage, check=True) -> CartesianImage:
    h, w = spec.values.shape
    F = spec.values / spec.pitch ** 2
    F = F / _phase(w, spec.pitch)[None, :] / _phase(h, spec.pitch)[:, None]
    z = np.fft.ifft2(F)
    return CartesianImage(realify(z) if check else z.real, spec.pitch)


def _pad(img: CartesianImage, pad: int):
    if pad <= 0:
        return img
    return img.like(np.pad(img.values, pad))


def _unpad(img: CartesianImage, pad: int, like: CartesianImage):
    if pad <= 0:
        return img
    return like.like(img.values[pad:-pad, pad:-pad])


def deconv_translational(blurred: CartesianImage, t1: float, epsilon: float, pad: int = 0):
    """Wiener inversion of isotropic Gaussian translational blur.

    ``pad`` zero-pads each side before the transform to keep the periodic
    wrap of the DFT away from the object.
    """
    if t1 < 0:
        raise DomainError("t1 must be >= 0")
    if not epsilon > 0:
        raise DomainError("epsilon must be > 0")
    work = _pad(blurred, pad)
    spec = fft2_forward(work)
    w1, w2 = spec.omega()
    gain = wiener_gain(kernel_ft_translational(w1, w2, t1), epsilon)
    out = fft2_inverse(SpectralImage(spec.values * gain, spec.pitch))
    return _unpad(out, pad, blurred)


@dataclass(frozen=True, eq=False)
class CircularSpectra:
    """Per-ring coefficients ``c_n = int f(phi) exp(-i n phi) dphi``.

    ``values[k, l]`` holds harmonic ``harmonics[l]`` of ring ``k``
    (:func:`numpy.fft.fftfreq` order, so ``n`` runs over ``[-n_phi/2, n_phi/2)``).
    """

    values: np.ndarray
    r_max: float

    @property
    def n_phi(self):
        return self.values.shape[1]

    @property
    def harmonics(self):
        return np.rint(np.fft.fftfreq(self.n_phi) * self.n_phi).astype(int)

    def is_conjugate_symmetric(self, tol=1e-10) -> bool:
        n = self.n_phi
        idx = np.arange(n)
        idx = idx[idx != n // 2]
        v = self.values
        scale = max(np.abs(v).max(), 1e-300)
        return bool(np.abs(v[:, idx] - np.conj(v[:, (-idx) % n])).max() <= tol * scale)


def circular_forward(pol: PolarImage) -> CircularSpectra:
    return CircularSpectra(np.fft.fft(pol.values, axis=1) * pol.dphi, pol.r_max)


def circular_inverse(spec: CircularSpectra, check=True) -> PolarImage:
    z = np.fft.ifft(spec.values, axis=1) / (2 * math.pi / spec.n_phi)
    return PolarImage(realify(z) if check else z.real, spec.r_max)


def deconv_rotational(blurred: PolarImage, t2: float, epsilon: float) -> PolarImage:
    """Per-ring Wiener inversion of wrapped-normal rotational blur."""
    if t2 < 0:
        raise DomainError("t2 must be >= 0")
    if not epsilon > 0:
        raise DomainError("epsilon must be > 0")
    spec = circular_forward(blurred)
    gain = wiener_gain(kernel_ft_rotational(spec.harmonics, t2), epsilon)
    return circular_inverse(CircularSpectra(spec.values * gain[None, :], spec.r_max))


def deconv_rotational_image(blurred: CartesianImage, t2: float, epsilon: float,
                            n_r=None, n_phi=None):
    """Rotational deconvolution of a Cartesian image via the polar round trip."""
    pol = cartesian_to_polar(blurred, n_r, n_phi)
    return back_to_cartesian(deconv_rotational(pol, t2, epsilon), blurred)
