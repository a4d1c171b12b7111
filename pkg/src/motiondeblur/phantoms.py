"""Synthetic test objects on a dark background, contained in the inscribed disk."""

from __future__ import annotations

import numpy as np

from .imaging import CartesianImage

# (x1, x2, sigma_major, sigma_minor, angle, amplitude) in units of size/64
_BLOBS = [
    (-9.0, 8.0, 3.2, 2.2, 0.5, 1.0),
    (10.0, 9.0, 2.4, 2.4, 0.0, 0.8),
    (3.0, -11.0, 4.5, 2.0, -0.9, 0.9),
    (-12.0, -7.0, 2.2, 2.2, 0.0, 0.7),
    (0.0, 0.0, 2.6, 2.6, 0.0, 0.6),
    (15.0, -3.0, 3.0, 1.8, 1.3, 0.75),
]


def _anisotropic(x1, x2, cx, cy, s1, s2, ang):
    c, s = np.cos(ang), np.sin(ang)
    u = c * (x1 - cx) + s * (x2 - cy)
    v = -s * (x1 - cx) + c * (x2 - cy)
    return np.exp(-0.5 * ((u / s1) ** 2 + (v / s2) ** 2))


def blobs(size=64, pitch=1.0) -> CartesianImage:
    """Elliptical Gaussian blobs of mixed size and orientation, peak about 1."""
    img = CartesianImage(np.zeros((size, size)), pitch)
    x1, x2 = img.coords()
    k = size / 64.0 * pitch
    v = np.zeros((size, size))
    for cx, cy, s1, s2, ang, amp in _BLOBS:
        v += amp * _anisotropic(x1, x2, k * cx, k * cy, k * s1, k * s2, ang)
    return img.like(v / v.max())


def spokes(size=64, pitch=1.0, arms=5) -> CartesianImage:
    """Smooth pinwheel: strong angular structure on a ring."""
    img = CartesianImage(np.zeros((size, size)), pitch)
    x1, x2 = img.coords()
    k = size / 64.0 * pitch
    r = np.hypot(x1, x2)
    phi = np.arctan2(x2, x1)
    radial = np.exp(-0.5 * ((r - 14.0 * k) / (5.0 * k)) ** 2)
    angular = np.exp(3.0 * (np.cos(arms * phi) - 1.0))
    return img.like(radial * angular)


def ring(size=64, pitch=1.0) -> CartesianImage:
    """Off-center smooth annulus plus a small bump."""
    img = CartesianImage(np.zeros((size, size)), pitch)
    x1, x2 = img.coords()
    k = size / 64.0 * pitch
    r = np.hypot(x1 - 4.0 * k, x2 + 2.0 * k)
    v = np.exp(-0.5 * ((r - 11.0 * k) / (2.5 * k)) ** 2)
    v += 0.8 * _anisotropic(x1, x2, -12 * k, 12 * k, 2.5 * k, 2.5 * k, 0.0)
    return img.like(v / v.max())


def gaussian(size=64, pitch=1.0, sigma=1.0, center=(0.0, 0.0)) -> CartesianImage:
    """``exp(-|x - c|^2 / 2 sigma^2)`` sampled in physical units."""
    img = CartesianImage(np.zeros((size, size)), pitch)
    x1, x2 = img.coords()
    return img.like(np.exp(-((x1 - center[0]) ** 2 + (x2 - center[1]) ** 2) / (2 * sigma ** 2)))


PHANTOMS = {"blobs": blobs, "spokes": spokes, "ring": ring}


def make(name: str, size=64, pitch=1.0) -> CartesianImage:
    try:
        return PHANTOMS[name](size, pitch)
    except KeyError:
        raise ValueError(f"unknown phantom {name!r}; choose from {sorted(PHANTOMS)}") from None
