"""Fourier analysis on the motion group SE(2) and combined-blur deconvolution.

Matrix elements of the irreducible unitary representations are

    u_mn(g(a, phi, theta), p) = i^(n-m) exp(-i[n theta + (m-n) phi]) J_(n-m)(p a)

and the transform is ``f_mn(p) = int f(g) u_mn(g^-1, p) dg`` with
``dg = r dr dphi dtheta``.  A planar image is a function on SE(2) that does not
depend on ``theta``, so only its ``m = 0`` row survives:

    rho_0n(p) = 2 pi i^n int int rho(r, phi) exp(i n phi) J_-n(p r) r dr dphi.

With this unnormalized measure the inverse carries ``1 / (4 pi^2)``:

    rho(r, phi) = (1 / 4 pi^2) sum_n i^-n exp(-i n phi) int rho_0n(p) J_-n(p r) p dp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import BesselTable, bessel_j
from .fourier import realify, wiener_gain
from .imaging import CartesianImage, PolarImage, back_to_cartesian, cartesian_to_polar, polar_to_cartesian
from .kernels import DomainError, MotionParams, kernel_ft_se2

_IPOW = (1, 1j, -1, -1j)


def ipow(k: int) -> complex:
    """``i**k`` exactly for integer ``k``."""
    return _IPOW[int(k) % 4]


def se2_matrix_element(m: int, n: int, a: float, phi: float, theta: float, p: float,
                       bessel=bessel_j) -> complex:
    """``u_mn(g(a, phi, theta), p)``; ``bessel(nu, x)`` can be swapped for a table."""
    return (ipow(n - m) * np.exp(-1j * (n * theta + (m - n) * phi))
            * bessel(n - m, p * a))


def se2_matrix(B: int, a: float, phi: float, theta: float, p: float):
    """Truncated ``U(g, p)`` with ``m, n`` in ``[-B, B]``."""
    J = {nu: bessel_j(nu, p * a) for nu in range(-2 * B, 2 * B + 1)}
    idx = range(-B, B + 1)
    return np.array([[se2_matrix_element(m, n, a, phi, theta, p, lambda nu, x: J[nu])
                      for n in idx] for m in idx])


@dataclass(frozen=True)
class DeconvConfig:
    """Regularization and sampling for the SE(2) pipeline.

    ``None`` fields are resolved against the polar grid: ``band_limit =
    n_phi // 4``, ``n_radial = 2 * n_r``, ``p_max = pi / pitch``.
    """

    epsilon: float = 1e-3
    band_limit: int | None = None
    n_radial: int | None = None
    p_max: float | None = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise DomainError("epsilon must be > 0")
        if self.band_limit is not None and self.band_limit < 1:
            raise DomainError("band_limit must be >= 1")
        if self.n_radial is not None and self.n_radial < 2:
            raise DomainError("n_radial must be >= 2")
        if self.p_max is not None and not self.p_max > 0:
            raise DomainError("p_max must be > 0")

    def resolve(self, n_r: int, n_phi: int, pitch: float) -> "DeconvConfig":
        B = self.band_limit if self.band_limit is not None else n_phi // 4
        if 2 * B >= n_phi:
            raise DomainError(f"band_limit {B} needs n_phi > {2 * B}")
        return DeconvConfig(
            self.epsilon,
            B,
            self.n_radial if self.n_radial is not None else 2 * n_r,
            self.p_max if self.p_max is not None else math.pi / pitch,
        )

    def p_grid(self):
        return np.arange(1, self.n_radial + 1) * (self.p_max / self.n_radial)

    def p_weights(self):
        """Trapezoid weights for ``int ... dp`` on the grid (the ``p = 0`` node carries ``p dp = 0``)."""
        w = np.full(self.n_radial, self.p_max / self.n_radial)
        w[-1] *= 0.5
        return w


@dataclass(frozen=True, eq=False)
class SE2Spectrum:
    """Band-limited SE(2) spectrum of an image: the ``m = 0`` row only.

    ``row[k, n + B]`` is ``f_0n(p[k])``; every other row of ``f(p)`` is zero.
    """

    band_limit: int
    p: np.ndarray
    row: np.ndarray
    p_max: float

    @property
    def n_radial(self):
        return self.p.size

    @property
    def harmonics(self):
        return np.arange(-self.band_limit, self.band_limit + 1)

    def column(self, n: int):
        return self.row[:, n + self.band_limit]

    def matrix(self, k: int):
        """Full ``(2B+1) x (2B+1)`` matrix at ``p[k]`` (zero outside ``m = 0``)."""
        B = self.band_limit
        out = np.zeros((2 * B + 1, 2 * B + 1), dtype=complex)
        out[B] = self.row[k]
        return out

    def scaled(self, factor) -> "SE2Spectrum":
        return SE2Spectrum(self.band_limit, self.p, self.row * factor, self.p_max)

    def __add__(self, other):
        return SE2Spectrum(self.band_limit, self.p, self.row + other.row, self.p_max)

    def to_text(self) -> str:
        lines = [f"SE2SPEC {self.band_limit} {self.n_radial} {float(self.p_max)!r}"]
        for k in range(self.n_radial):
            pairs = " ".join(f"{float(z.real)!r} {float(z.imag)!r}" for z in self.row[k])
            lines.append(f"{float(self.p[k])!r} {pairs}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SE2Spectrum":
        lines = text.strip().splitlines()
        head = lines[0].split()
        if head[0] != "SE2SPEC":
            raise ValueError("not an SE2SPEC dump")
        B, M, p_max = int(head[1]), int(head[2]), float(head[3])
        data = np.array([[float(t) for t in ln.split()] for ln in lines[1:1 + M]])
        p = data[:, 0]
        row = data[:, 1::2] + 1j * data[:, 2::2]
        if row.shape != (M, 2 * B + 1):
            raise ValueError("SE2SPEC body does not match header")
        return cls(B, p, row, p_max)


def _radial_table(cfg: DeconvConfig, radii):
    """``J_nu(p r)`` for ``|nu| <= B`` with shape ``(2B+1, M, n_r)``."""
    return BesselTable(cfg.band_limit, np.multiply.outer(cfg.p_grid(), radii))


def radial_weights(pol: PolarImage):
    """Quadrature weights for ``int_0 r h(r) dr`` on the cell-centered radii.

    Midpoint weights ``r_k dr`` minus the leading endpoint term
    ``dr^2 h(0) / 24`` (folded into the first node); this removes the
    ``O(dr^2)`` error that the midpoint rule makes at the origin.
    """
    w = pol.radii * pol.dr
    w[0] -= pol.dr ** 2 / 24.0
    return w


def se2_fourier_polar(pol: PolarImage, cfg: DeconvConfig, table=None, pitch=None) -> SE2Spectrum:
    """Transform of a polar-sampled image: angular DFT, then midpoint radial quadrature.

    Unset ``cfg`` fields resolve against ``pitch`` (default: the radial step).
    """
    cfg = cfg.resolve(pol.n_r, pol.n_phi, pitch or pol.dr)
    B = cfg.band_limit
    if 2 * B >= pol.n_phi:
        raise DomainError(f"band_limit {B} needs n_phi > {2 * B}")
    table = table if table is not None else _radial_table(cfg, pol.radii)
    # c_n(r) = int rho(r, phi) exp(+i n phi) dphi
    c = np.fft.ifft(pol.values, axis=1) * (2 * math.pi)
    ns = np.arange(-B, B + 1)
    cn = c[:, ns % pol.n_phi]                                  # (n_r, 2B+1)
    w = radial_weights(pol)
    Jneg = table.orders(-ns)                                   # (2B+1, M, n_r)
    radial = np.einsum("nkr,rn->kn", Jneg, cn * w[:, None])
    phase = np.array([ipow(n) for n in ns])
    return SE2Spectrum(B, cfg.p_grid(), 2 * math.pi * phase[None, :] * radial, cfg.p_max)


def se2_fourier_image(img: CartesianImage, cfg: DeconvConfig, n_r=None, n_phi=None,
                      r_max=None) -> SE2Spectrum:
    pol = cartesian_to_polar(img, n_r, n_phi, r_max)
    return se2_fourier_polar(pol, cfg, pitch=img.pitch)


def se2_inverse_polar(spec: SE2Spectrum, n_r: int, n_phi: int, r_max: float,
                      table=None) -> PolarImage:
    B = spec.band_limit
    if 2 * B >= n_phi:
        raise DomainError(f"band_limit {B} needs n_phi > {2 * B}")
    cfg = DeconvConfig(1.0, B, spec.n_radial, spec.p_max)
    radii = (np.arange(n_r) + 0.5) * (r_max / n_r)
    table = table if table is not None else _radial_table(cfg, radii)
    ns = spec.harmonics
    wp = cfg.p_weights() * spec.p
    Jneg = table.orders(-ns)                                   # (2B+1, M, n_r)
    g = np.einsum("nkr,kn->rn", Jneg, spec.row * wp[:, None]) / (4 * math.pi ** 2)
    phase = np.array([ipow(-n) for n in ns])
    coef = np.zeros((n_r, n_phi), dtype=complex)
    coef[:, ns % n_phi] = g * phase[None, :]
    z = np.fft.fft(coef, axis=1)
    return PolarImage(realify(z), r_max)


def se2_fourier_inverse_image(spec: SE2Spectrum, width: int, height: int, pitch: float = 1.0,
                              n_r=None, n_phi=None, r_max=None) -> CartesianImage:
    like = CartesianImage(np.zeros((height, width)), pitch)
    n = max(width, height)
    pol = se2_inverse_polar(spec, n_r or n, n_phi or 4 * n, r_max or like.half_diagonal())
    return polar_to_cartesian(pol, width, height, pitch)


def se2_kernel_row(spec: SE2Spectrum, params: MotionParams):
    """Diagonal of the blur kernel's transform laid out like ``spec.row``."""
    return kernel_ft_se2(spec.p[:, None], spec.harmonics[None, :], params)


def deconv_se2_polar(pol: PolarImage, params: MotionParams, cfg: DeconvConfig,
                     pitch=None) -> PolarImage:
    cfg = cfg.resolve(pol.n_r, pol.n_phi, pitch or pol.dr)
    table = _radial_table(cfg, pol.radii)
    spec = se2_fourier_polar(pol, cfg, table)
    gain = wiener_gain(se2_kernel_row(spec, params), cfg.epsilon)
    return se2_inverse_polar(spec.scaled(gain), pol.n_r, pol.n_phi, pol.r_max, table)


def deconv_se2(blurred: CartesianImage, params: MotionParams, cfg: DeconvConfig,
               n_r=None, n_phi=None) -> CartesianImage:
    """Combined translational + rotational deconvolution in the SE(2) Fourier domain.

    The kernel transform is diagonal and real, so each ``(p, n)`` entry is
    inverted with the scalar Wiener gain ``f / (eps + f^2)``.
    """
    pol = cartesian_to_polar(blurred, n_r, n_phi)
    return back_to_cartesian(deconv_se2_polar(pol, params, cfg, blurred.pitch), blurred)


def se2_transform_numeric(f, m: int, n: int, p: float, r_max: float, n_r=96, n_phi=64, n_theta=64):
    """``int f(g) u_mn(g^-1, p) dg`` by quadrature for ``f(r, phi, theta)`` on SE(2).

    Gauss-Legendre in ``r`` on ``[0, r_max]``, uniform (periodic) rules in both angles.
    For ``g = (r, phi, theta)`` the inverse is ``(r, phi - theta + pi, -theta)``.
    """
    x, w = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * r_max * (x + 1)
    wr = 0.5 * r_max * w * r
    phi = np.arange(n_phi) * (2 * math.pi / n_phi)
    theta = np.arange(n_theta) * (2 * math.pi / n_theta)
    R, PHI, TH = np.meshgrid(r, phi, theta, indexing="ij")
    u = (ipow(n - m) * np.exp(-1j * (-n * TH + (m - n) * (PHI - TH + math.pi)))
         * bessel_j(n - m, p * R))
    vals = f(R, PHI, TH) * u
    return complex(np.einsum("ijk,i->", vals, wr) * (2 * math.pi / n_phi) * (2 * math.pi / n_theta))
