"""Motion-error densities on the plane, the circle and SE(2).

All densities are heat kernels: the translational one solves the planar
diffusion equation with diffusion time ``t1`` (variance ``2 * t1`` per axis),
the rotational one is the wrapped normal on the circle with diffusion time
``t2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TAIL_TOL = 1e-12


class DomainError(ValueError):
    """Argument outside the domain of a density or sampler."""


K_MAX = 100_000


def default_cutoff(t2: float, tol: float = 1e-14) -> int:
    """Smallest K with ``exp(-K**2 * t2) < tol`` (at least 1, at most ``K_MAX``).

    The cap only binds for ``t2`` below about 3e-9, where the kernel is a delta
    at any practical angular resolution.
    """
    if t2 <= 0:
        return 1
    k = math.sqrt(-math.log(tol) / t2)
    return K_MAX if k >= K_MAX else max(1, math.ceil(k))


@dataclass(frozen=True)
class MotionParams:
    """Diffusion times of the translational and rotational error.

    ``t1`` is in length**2 (pixels**2 for unit pitch), ``t2`` in rad**2.
    ``series_cutoff`` truncates the Fourier series of the wrapped normal;
    ``None`` picks the default that drops less than 1e-14.
    """

    t1: float = 0.0
    t2: float = 0.0
    series_cutoff: int | None = field(default=None)

    def __post_init__(self):
        if not (np.isfinite(self.t1) and np.isfinite(self.t2)):
            raise DomainError("t1 and t2 must be finite")
        if self.t1 < 0 or self.t2 < 0:
            raise DomainError(f"diffusion times must be >= 0, got t1={self.t1}, t2={self.t2}")
        if self.series_cutoff is None:
            object.__setattr__(self, "series_cutoff", default_cutoff(self.t2))
        if int(self.series_cutoff) < 1:
            raise DomainError("series_cutoff must be >= 1")
        object.__setattr__(self, "series_cutoff", int(self.series_cutoff))

    @property
    def K(self) -> int:
        return self.series_cutoff

    def tail_bound(self) -> float:
        """First dropped series term ``exp(-K**2 t2)``; bounds the truncated tail."""
        return math.exp(-(self.K ** 2) * self.t2) if self.t2 > 0 else 1.0

    def check_tail(self, tol: float = TAIL_TOL) -> bool:
        return self.t2 == 0 or self.tail_bound() < tol

    def require_blur(self):
        if self.t1 <= 0 and self.t2 <= 0:
            raise DomainError("at least one of t1, t2 must be positive")

    def to_dict(self) -> dict:
        return {"t1": self.t1, "t2": self.t2, "series_cutoff": self.series_cutoff}

    @classmethod
    def from_dict(cls, d: dict) -> "MotionParams":
        return cls(float(d.get("t1", 0.0)), float(d.get("t2", 0.0)), d.get("series_cutoff"))


def _positive(t, name="t"):
    if not t > 0:
        raise DomainError(f"{name} must be > 0, got {t}")


def gauss1d(x, t):
    """Heat kernel on the line: ``exp(-x**2 / 4t) / (2 sqrt(pi t))``."""
    _positive(t)
    x = np.asarray(x, dtype=float)
    return np.exp(-x * x / (4.0 * t)) / (2.0 * math.sqrt(math.pi * t))


def gauss2d(x1, x2, t):
    """Isotropic planar heat kernel, the product of two line kernels."""
    return gauss1d(x1, t) * gauss1d(x2, t)


def wrapped_gauss(theta, t, K=None):
    """Wrapped normal density on the circle from its Fourier series.

    The series ``(1/2pi) sum_k exp(-k^2 t) exp(ik theta)`` is summed over
    ``|k| <= K`` with the +k/-k terms paired, so the result is real by
    construction.
    """
    _positive(t)
    if K is None:
        K = default_cutoff(t)
    if K < 1:
        raise DomainError("K must be >= 1")
    theta = np.asarray(theta, dtype=float)
    k = np.arange(1, K + 1, dtype=float)
    coef = np.exp(-k * k * t)
    s = np.cos(np.multiply.outer(theta, k)) @ coef
    return (1.0 + 2.0 * s) / (2.0 * math.pi)


def folded_gauss(theta, t, n_fold=5):
    """Wrapped normal as the folded line kernel, ``sum_n gauss1d(theta - 2 pi n)``."""
    theta = np.asarray(theta, dtype=float)
    n = np.arange(-n_fold, n_fold + 1)
    return gauss1d(np.subtract.outer(theta, 2 * math.pi * n), t).sum(axis=-1)


def se2_kernel_density(r, phi, theta, params: MotionParams):
    """Product density on SE(2) in polar coordinates ``(r, phi, theta)``.

    Does not depend on ``phi``; integrates to one against ``r dr dphi dtheta``.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("r must be >= 0")
    _positive(params.t1, "t1")
    _positive(params.t2, "t2")
    phi = np.asarray(phi, dtype=float)
    radial = np.exp(-r * r / (4.0 * params.t1)) / (4.0 * math.pi * params.t1)
    radial = radial + 0.0 * phi
    return radial * wrapped_gauss(theta, params.t2, params.K)


def kernel_ft_translational(w1, w2, t):
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    return np.exp(-(w1 * w1 + w2 * w2) * t)


def kernel_ft_rotational(n, t):
    n = np.asarray(n, dtype=float)
    return np.exp(-n * n * t)


def kernel_ft_se2(p, m, params: MotionParams):
    """Diagonal entry ``f_mm(p)`` of the SE(2) transform of the product kernel.

    Off-diagonal entries vanish identically, so only the diagonal is returned.
    """
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise DomainError("p must be >= 0")
    m = np.asarray(m, dtype=float)
    return np.exp(-p * p * params.t1) * np.exp(-m * m * params.t2)


def sample_translation(params: MotionParams, rng: np.random.Generator):
    """One translation ``(dx, dy)``; each component is N(0, 2 t1)."""
    _positive(params.t1, "t1")
    sd = math.sqrt(2.0 * params.t1)
    dx, dy = rng.normal(0.0, sd, size=2)
    return float(dx), float(dy)


def wrap_angle(theta):
    """Map angles into ``[-pi, pi)``."""
    return np.mod(np.asarray(theta, dtype=float) + math.pi, 2 * math.pi) - math.pi


def sample_rotation(params: MotionParams, rng: np.random.Generator) -> float:
    """One rotation angle: N(0, 2 t2) wrapped into ``[-pi, pi)``."""
    _positive(params.t2, "t2")
    theta = rng.normal(0.0, math.sqrt(2.0 * params.t2))
    return float(wrap_angle(theta))
