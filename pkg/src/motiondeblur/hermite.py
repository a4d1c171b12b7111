"""Hermite functions, truncated 2-D Hermite expansions and translational deblurring.

Expansions live in dimensionless coordinates ``xi = x / unit``.  An expansion
with scale ``a`` uses the dilated basis ``h_m(xi1 / a) h_n(xi2 / a)`` with
``m + n <= N``.  Gaussian translational blur with diffusion time ``t`` (in
``xi`` units) maps an order-N expansion at scale 1 onto an order-N expansion
at scale ``a = sqrt(2 t + 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .imaging import CartesianImage

N_MAX = 128
FIT_TIKHONOV = 1e-10
COND_LIMIT = 1e12
SUPPORT_FRACTION = 0.9


class ConditioningError(ArithmeticError):
    """A least-squares system is too ill-conditioned to solve reliably."""


def hermite_functions(nmax: int, x):
    """Orthonormal ``h_0 .. h_nmax`` at ``x``; shape ``(nmax + 1,) + x.shape``.

    Uses the recurrence on the normalized functions, which stays finite where
    ``H_n(x) / s_n`` would overflow.
    """
    if not 0 <= nmax <= N_MAX:
        raise ValueError(f"Hermite order must be in [0, {N_MAX}], got {nmax}")
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    if nmax >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, nmax):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def hermite_h(n: int, x):
    if n < 0:
        raise ValueError("Hermite order must be >= 0")
    return hermite_functions(n, x)[n]


def hermite_poly(n: int, x):
    """Physicists' Hermite polynomial ``H_n`` (unnormalized; overflows for large n)."""
    x = np.asarray(x, dtype=float)
    h0, h1 = np.ones_like(x), 2 * x
    if n == 0:
        return h0
    for k in range(1, n):
        h0, h1 = h1, 2 * x * h1 - 2 * k * h0
    return h1


def hermite_norm(n: int) -> float:
    """``s_n = sqrt(2^n n! sqrt(pi))``."""
    return math.exp(0.5 * (n * math.log(2) + math.lgamma(n + 1) + 0.5 * math.log(math.pi)))


def hermite_eigen_check(n: int, omega):
    """Closed-form Fourier transform of ``h_n``: ``sqrt(2 pi) (-i)^n h_n(omega)``."""
    return math.sqrt(2 * math.pi) * (-1j) ** n * hermite_h(n, omega)


def hermite_scaling_coeffs(m: int, a_inv: float):
    """``alpha_{m,k}(a_inv)`` with ``H_m(x) = sum_k alpha_{m,k} H_k(a x)``, ``a = 1 / a_inv``.

    Only ``k`` of the same parity as ``m`` are nonzero and ``alpha_{m,m} = a_inv^m``.
    """
    if not 0 < a_inv <= 1:
        raise ValueError("a_inv must be in (0, 1]")
    g = a_inv
    out = np.zeros(m + 1)
    for j in range(m // 2 + 1):
        k = m - 2 * j
        out[k] = (g ** k * (g * g - 1) ** j
                  * math.exp(math.lgamma(m + 1) - math.lgamma(j + 1) - math.lgamma(k + 1)))
    return out


def scaled_hermite_matrix(N: int, a: float):
    """``beta[m, k]`` with ``h_m(w) exp(-w^2 t) = sum_k beta[m, k] h_k(a w)``, ``a^2 = 2t + 1``.

    Equals ``alpha_{m,k}(1/a) s_k / s_m``, evaluated in log space.
    """
    g = 1.0 / a
    out = np.zeros((N + 1, N + 1))
    if a == 1.0:
        np.fill_diagonal(out, 1.0)
        return out
    lg, l1 = math.log(g), math.log(1 - g * g)
    for m in range(N + 1):
        for j in range(m // 2 + 1):
            k = m - 2 * j
            logv = (k * lg + j * l1 - math.lgamma(j + 1) - j * math.log(2)
                    + 0.5 * (math.lgamma(m + 1) - math.lgamma(k + 1)))
            out[m, k] = (-1) ** j * math.exp(logv)
    return out


def _triangle(N):
    m, n = np.meshgrid(np.arange(N + 1), np.arange(N + 1), indexing="ij")
    return m + n <= N


def default_unit(img: CartesianImage, N: int) -> float:
    """Physical length per expansion unit: the half-width lands at ``0.9 sqrt(2N+1)``."""
    half = 0.5 * img.pitch * max(img.width, img.height)
    return half / (SUPPORT_FRACTION * math.sqrt(2 * N + 1))


@dataclass(frozen=True, eq=False)
class HermiteExpansion:
    """``sum_{m+n<=N} coeffs[m, n] h_m(xi1 / a) h_n(xi2 / a)`` with ``xi = x / unit``."""

    order: int
    scale: float
    coeffs: np.ndarray
    unit: float = 1.0
    residual: float = field(default=float("nan"), compare=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        N = self.order
        if c.shape != (N + 1, N + 1):
            raise ValueError(f"coefficient matrix must be {(N + 1, N + 1)}, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        if not self.scale >= 1 - 1e-12:
            raise ValueError(f"scale must be >= 1, got {self.scale}")
        c[~_triangle(N)] = 0.0
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def n_coeffs(self):
        return (self.order + 1) * (self.order + 2) // 2

    def flat(self):
        """Coefficients in canonical order: ``m`` ascending, then ``n = 0..N-m``."""
        return np.array([self.coeffs[m, n] for m in range(self.order + 1)
                         for n in range(self.order + 1 - m)])

    def to_text(self) -> str:
        head = f"HEXP {self.order} {float(self.scale)!r}"
        if self.unit != 1.0:
            head += f" {float(self.unit)!r}"
        return head + "\n" + "\n".join(repr(float(v)) for v in self.flat()) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "HermiteExpansion":
        tok = text.split()
        if not tok or tok[0] != "HEXP":
            raise ValueError("not an HEXP file")
        N, a = int(tok[1]), float(tok[2])
        body = tok[3:]
        n = (N + 1) * (N + 2) // 2
        unit = 1.0
        if len(body) == n + 1:
            unit, body = float(body[0]), body[1:]
        if len(body) != n:
            raise ValueError(f"HEXP body has {len(body)} values, expected {n}")
        vals = iter(float(v) for v in body)
        c = np.zeros((N + 1, N + 1))
        for m in range(N + 1):
            for k in range(N + 1 - m):
                c[m, k] = next(vals)
        return cls(N, a, c, unit)


def hermite_eval(exp: HermiteExpansion, x1, x2):
    """Evaluate at expansion coordinates ``(x1, x2)`` (any broadcastable shapes)."""
    x1, x2 = np.broadcast_arrays(np.asarray(x1, float), np.asarray(x2, float))
    H1 = hermite_functions(exp.order, x1 / exp.scale)
    H2 = hermite_functions(exp.order, x2 / exp.scale)
    return np.einsum("m...,mn,n...->...", H1, exp.coeffs, H2)


def _axes(img: CartesianImage, unit: float):
    ci, cj = img.center()
    xi1 = (np.arange(img.width) - cj) * img.pitch / unit
    xi2 = (ci - np.arange(img.height)) * img.pitch / unit
    return xi1, xi2


def render_hermite(exp: HermiteExpansion, like: CartesianImage) -> CartesianImage:
    """Sample the expansion on the pixel grid of ``like``."""
    xi1, xi2 = _axes(like, exp.unit)
    A = hermite_functions(exp.order, xi1 / exp.scale)           # (N+1, w)
    B = hermite_functions(exp.order, xi2 / exp.scale)           # (N+1, h)
    return like.like(B.T @ exp.coeffs.T @ A)


def hermite_fit(img: CartesianImage, N: int, scale: float = 1.0, unit: float | None = None,
                tikhonov: float = FIT_TIKHONOV) -> HermiteExpansion:
    """Least-squares order-N Hermite expansion of ``img`` on its pixel grid.

    Solves the normal equations (with ``tikhonov`` on the diagonal) using the
    Kronecker structure of the separable basis.
    """
    unit = default_unit(img, N) if unit is None else unit
    xi1, xi2 = _axes(img, unit)
    A = hermite_functions(N, xi1 / scale).T                    # (w, N+1) for m
    B = hermite_functions(N, xi2 / scale).T                    # (h, N+1) for n
    tri = _triangle(N)
    mi, ni = np.nonzero(tri)
    GA, GB = A.T @ A, B.T @ B
    G = GA[np.ix_(mi, mi)] * GB[np.ix_(ni, ni)]
    cond = np.linalg.cond(G)
    if not cond < COND_LIMIT:
        raise ConditioningError(
            f"Hermite fit of order N={N} on a {img.width}x{img.height} grid is rank deficient "
            f"(condition number {cond:.3g}); lower N or enlarge the grid")
    rhs = (A.T @ img.values.T @ B)[mi, ni]
    sol = np.linalg.solve(G + tikhonov * np.eye(len(mi)), rhs)
    c = np.zeros((N + 1, N + 1))
    c[mi, ni] = sol
    fitted = B @ c.T @ A.T
    res = float(np.sqrt(np.mean((fitted - img.values) ** 2)))
    return HermiteExpansion(N, scale, c, unit, res)


def blur_scale(t: float) -> float:
    return math.sqrt(2.0 * t + 1.0)


def hermite_blur(exp: HermiteExpansion, t: float) -> HermiteExpansion:
    """Exact coefficient map of Gaussian blur (diffusion time ``t`` in expansion units).

    ``gamma[k, l] = a^-2 sum_{m,n} rho[m, n] i^(k+l-m-n) beta[m, k] beta[n, l]``;
    input must be at scale 1, output is at scale ``a = sqrt(2t + 1)``.
    """
    if abs(exp.scale - 1.0) > 1e-12:
        raise ValueError("forward blur map expects a scale-1 expansion")
    a = blur_scale(t)
    F = _phase_matrix(exp.order) * scaled_hermite_matrix(exp.order, a).T   # F[k, m]
    G = F @ exp.coeffs @ F.T / a ** 2
    return HermiteExpansion(exp.order, a, G, exp.unit)


def _phase_matrix(N):
    # i^(k - m) restricted to equal parity, where it is real
    d = np.subtract.outer(np.arange(N + 1), np.arange(N + 1))
    return np.where(d % 2 == 0, np.where((d // 2) % 2 == 0, 1.0, -1.0), 0.0)


OMEGA_SPAN = 1.2


def default_omega_samples(N: int):
    """``2 (N + 1)`` uniform samples on ``[-L, L]``, ``L = 1.2 sqrt(2N + 1)``.

    Both signs are needed: on a half-line the even and odd functions are
    nearly dependent and ``H^T H`` loses about 13 digits at N = 12.
    """
    L = OMEGA_SPAN * math.sqrt(2 * N + 1)
    return np.linspace(-L, L, 2 * (N + 1))


def _pinv_checked(H, what):
    HtH = H.T @ H
    cond = np.linalg.cond(HtH)
    if not cond < COND_LIMIT:
        raise ConditioningError(
            f"{what}: normal matrix condition number {cond:.3g} exceeds {COND_LIMIT:g}; "
            f"choose different sample points")
    return np.linalg.solve(HtH, H.T)


def deconv_translational_hermite(blurred_fit: HermiteExpansion, t: float, epsilon: float,
                                 omega_samples=None) -> HermiteExpansion:
    """Deblur a scale-``sqrt(2t+1)`` Hermite expansion onto the scale-1 basis.

    Samples the frequency-domain identity at ``omega_samples`` and solves
    ``R = a^2 M G M^T`` with ``M = U^-1 H^+ E^+ H_a U`` where
    ``E^+ = diag(1 / (exp(-t w^2) + eps))`` and ``H^+ = (H^T H)^-1 H^T``.
    Entries of ``M`` that would couple opposite parities are dropped; they are
    zero for the exact system and only carry sampling noise otherwise.
    """
    a = blur_scale(t)
    if abs(blurred_fit.scale - a) > 1e-9:
        raise ValueError(f"blurred expansion has scale {blurred_fit.scale}, expected sqrt(2t+1) = {a}")
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    N = blurred_fit.order
    w = default_omega_samples(N) if omega_samples is None else np.asarray(omega_samples, float)
    if w.size < N + 1:
        raise ValueError(f"need at least N + 1 = {N + 1} omega samples, got {w.size}")
    H = hermite_functions(N, w).T
    Ha = hermite_functions(N, a * w).T
    Einv = 1.0 / (np.exp(-t * w * w) + epsilon)
    X = _pinv_checked(H, f"Hermite deconvolution (N={N}, {w.size} omega samples)") @ (Einv[:, None] * Ha)
    M = _phase_matrix(N) * X
    R = a ** 2 * M @ blurred_fit.coeffs @ M.T
    return HermiteExpansion(N, 1.0, R, blurred_fit.unit)
