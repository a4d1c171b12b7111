"""Cartesian and polar image containers, bilinear resampling and metrics.

Physical coordinates put the origin at the image center with ``x2`` pointing
up: pixel ``(i, j)`` sits at ``x1 = (j - (w-1)/2) * pitch``,
``x2 = ((h-1)/2 - i) * pitch``.  Everything outside the sampled support is
zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class CartesianImage:
    values: np.ndarray
    pitch: float = 1.0

    def __post_init__(self):
        v = _frozen(self.values)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError(f"image values must be a non-empty 2-D array, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("image values must be finite")
        if not self.pitch > 0:
            raise ValueError("pitch must be > 0")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "pitch", float(self.pitch))

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self):
        return self.values.shape

    def center(self):
        """Center as fractional (row, column) index."""
        return (self.height - 1) / 2.0, (self.width - 1) / 2.0

    def coords(self):
        """Physical ``(x1, x2)`` grids, each of shape ``(height, width)``."""
        ci, cj = self.center()
        j = (np.arange(self.width) - cj) * self.pitch
        i = (ci - np.arange(self.height)) * self.pitch
        return np.meshgrid(j, i)

    def half_diagonal(self) -> float:
        return 0.5 * self.pitch * math.hypot(self.width, self.height)

    def inscribed_radius(self) -> float:
        return 0.5 * self.pitch * (min(self.width, self.height) - 1)

    def like(self, values) -> "CartesianImage":
        return CartesianImage(values, self.pitch)

    def value_range(self) -> float:
        return float(self.values.max() - self.values.min())

    def __add__(self, other):
        return self.like(self.values + other.values)

    def __sub__(self, other):
        return self.like(self.values - other.values)

    def __mul__(self, c):
        return self.like(self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class PolarImage:
    """Samples on ``r_k = (k + 1/2) r_max / n_r`` by ``phi_l = 2 pi l / n_phi``."""

    values: np.ndarray
    r_max: float

    def __post_init__(self):
        v = _frozen(self.values)
        if v.ndim != 2:
            raise ValueError("polar values must be 2-D (n_r, n_phi)")
        n_r, n_phi = v.shape
        if n_r < 1:
            raise ValueError("n_r must be >= 1")
        if n_phi < 4 or n_phi % 2:
            raise ValueError(f"n_phi must be even and >= 4, got {n_phi}")
        if not self.r_max > 0:
            raise ValueError("r_max must be > 0")
        if not np.all(np.isfinite(v)):
            raise ValueError("polar values must be finite")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "r_max", float(self.r_max))

    @property
    def n_r(self) -> int:
        return self.values.shape[0]

    @property
    def n_phi(self) -> int:
        return self.values.shape[1]

    @property
    def dr(self) -> float:
        return self.r_max / self.n_r

    @property
    def dphi(self) -> float:
        return 2 * math.pi / self.n_phi

    @property
    def radii(self):
        return (np.arange(self.n_r) + 0.5) * self.dr

    @property
    def angles(self):
        return np.arange(self.n_phi) * self.dphi

    def like(self, values) -> "PolarImage":
        return PolarImage(values, self.r_max)


@dataclass(frozen=True)
class RigidMotion:
    """Planar rigid motion ``x -> R(theta) x + (dx, dy)``."""

    dx: float = 0.0
    dy: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        th = math.fmod(float(self.theta) + math.pi, 2 * math.pi)
        if th < 0:
            th += 2 * math.pi
        object.__setattr__(self, "theta", th - math.pi)

    @classmethod
    def from_polar(cls, a, phi, theta):
        return cls(a * math.cos(phi), a * math.sin(phi), theta)

    def polar(self):
        """``(a, phi, theta)`` with ``a = |(dx, dy)|``."""
        return math.hypot(self.dx, self.dy), math.atan2(self.dy, self.dx), self.theta

    def inverse(self) -> "RigidMotion":
        c, s = math.cos(self.theta), math.sin(self.theta)
        return RigidMotion(-(c * self.dx + s * self.dy), -(-s * self.dx + c * self.dy), -self.theta)

    def compose(self, other: "RigidMotion") -> "RigidMotion":
        """``self o other``: apply ``other`` first."""
        c, s = math.cos(self.theta), math.sin(self.theta)
        return RigidMotion(
            c * other.dx - s * other.dy + self.dx,
            s * other.dx + c * other.dy + self.dy,
            self.theta + other.theta,
        )

    def apply(self, x1, x2):
        c, s = math.cos(self.theta), math.sin(self.theta)
        return c * x1 - s * x2 + self.dx, s * x1 + c * x2 + self.dy


IDENTITY = RigidMotion()


def bilinear(values, rows, cols):
    """Bilinear samples of ``values`` at fractional indices, zero outside."""
    h, w = values.shape
    rows = np.asarray(rows, dtype=float)
    cols = np.asarray(cols, dtype=float)
    # one ring of zeros; indices beyond it are clamped onto the ring
    padded = np.zeros((h + 2, w + 2))
    padded[1:-1, 1:-1] = values
    r0 = np.floor(rows)
    c0 = np.floor(cols)
    fr = rows - r0
    fc = cols - c0
    r1 = np.clip(r0 + 1, -1, h).astype(np.intp) + 1
    c1 = np.clip(c0 + 1, -1, w).astype(np.intp) + 1
    r0 = np.clip(r0, -1, h).astype(np.intp) + 1
    c0 = np.clip(c0, -1, w).astype(np.intp) + 1
    return ((1.0 - fr) * (1.0 - fc) * padded[r0, c0]
            + (1.0 - fr) * fc * padded[r0, c1]
            + fr * (1.0 - fc) * padded[r1, c0]
            + fr * fc * padded[r1, c1])


def sample_at(img: CartesianImage, x1, x2):
    """Bilinear samples of ``img`` at physical positions (zero outside)."""
    ci, cj = img.center()
    return bilinear(img.values, ci - np.asarray(x2) / img.pitch, np.asarray(x1) / img.pitch + cj)


def transform_image(img: CartesianImage, g: RigidMotion) -> CartesianImage:
    """Return ``x -> img(g^{-1} x)``, bilinearly sampled with zero fill."""
    ci, cj = img.center()
    u = np.arange(img.width) - cj
    v = ci - np.arange(img.height)
    u, v = np.meshgrid(u, v)
    c, s = math.cos(g.theta), math.sin(g.theta)
    du = u - g.dx / img.pitch
    dv = v - g.dy / img.pitch
    su = c * du + s * dv
    sv = -s * du + c * dv
    return img.like(bilinear(img.values, ci - sv, su + cj))


def default_polar_shape(img: CartesianImage):
    n = max(img.width, img.height)
    return n, 4 * n


def cartesian_to_polar(img: CartesianImage, n_r=None, n_phi=None, r_max=None) -> PolarImage:
    """Resample onto a polar grid; defaults oversample and cover the corners."""
    dn_r, dn_phi = default_polar_shape(img)
    n_r = dn_r if n_r is None else n_r
    n_phi = dn_phi if n_phi is None else n_phi
    r_max = img.half_diagonal() if r_max is None else r_max
    r = (np.arange(n_r) + 0.5) * (r_max / n_r)
    phi = np.arange(n_phi) * (2 * math.pi / n_phi)
    x1 = np.outer(r, np.cos(phi))
    x2 = np.outer(r, np.sin(phi))
    return PolarImage(sample_at(img, x1, x2), r_max)


def polar_sample(pol: PolarImage, r, phi):
    """Bilinear samples in ``(r, phi)`` with angular wrap; zero beyond ``r_max``."""
    r = np.asarray(r, dtype=float)
    kr = np.clip(r / pol.dr - 0.5, 0.0, pol.n_r - 1.0)
    kp = np.mod(np.asarray(phi, dtype=float), 2 * math.pi) / pol.dphi
    r0 = np.minimum(np.floor(kr).astype(np.int64), pol.n_r - 1)
    r1 = np.minimum(r0 + 1, pol.n_r - 1)
    fr = kr - r0
    p0 = np.floor(kp).astype(np.int64) % pol.n_phi
    fp = kp - np.floor(kp)
    p1 = (p0 + 1) % pol.n_phi
    v = pol.values
    out = ((1 - fr) * ((1 - fp) * v[r0, p0] + fp * v[r0, p1])
           + fr * ((1 - fp) * v[r1, p0] + fp * v[r1, p1]))
    return np.where(r > pol.r_max, 0.0, out)


def polar_to_cartesian(pol: PolarImage, width, height, pitch=1.0) -> CartesianImage:
    grid = CartesianImage(np.zeros((height, width)), pitch)
    x1, x2 = grid.coords()
    return grid.like(polar_sample(pol, np.hypot(x1, x2), np.arctan2(x2, x1)))


def back_to_cartesian(pol: PolarImage, like: CartesianImage) -> CartesianImage:
    return polar_to_cartesian(pol, like.width, like.height, like.pitch)


def _check_same(a: CartesianImage, b: CartesianImage):
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


def rmse(a: CartesianImage, b: CartesianImage) -> float:
    _check_same(a, b)
    d = (a.values - b.values).ravel()
    return math.sqrt(math.fsum(d * d) / d.size)


def psnr(a: CartesianImage, b: CartesianImage, peak: float = 1.0) -> float:
    e = rmse(a, b)
    if e == 0:
        return math.inf
    return 20.0 * math.log10(peak / e)


def total(img: CartesianImage) -> float:
    return math.fsum(img.values.ravel())
