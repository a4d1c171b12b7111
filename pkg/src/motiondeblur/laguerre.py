"""Laguerre-Fourier expansions: rotational and combined SE(2) deblurring.

Basis (``j = (m - |n|) / 2``):

    chi_mn(r, phi) = y_mn(r) exp(-i n phi)
    y_mn(r) = (-1)^j sqrt(j! / (pi (j + |n|)!)) r^|n| L_j^|n|(r^2) exp(-r^2 / 2)

An expansion is ``rho = sum rho_mn conj(chi_mn)(r / a, phi)`` over ``m = 0..N``,
``n = -m..m`` with ``m - |n|`` even.  The image is real exactly when
``rho_m,-n = conj(rho_mn)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fourier import realify
from .hermite import COND_LIMIT, FIT_TIKHONOV, ConditioningError, default_unit
from .imaging import CartesianImage, PolarImage
from .kernels import DomainError, MotionParams
from .se2 import SE2Spectrum, ipow


def laguerre_all(nmax: int, k: float, x):
    """``L_0^k .. L_nmax^k`` at ``x``; shape ``(nmax + 1,) + x.shape``."""
    if nmax < 0 or k < 0:
        raise ValueError("Laguerre degree and superscript must be >= 0")
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = 1.0 + k - x
    for j in range(1, nmax):
        out[j + 1] = ((2 * j + 1 + k - x) * out[j] - (j + k) * out[j - 1]) / (j + 1)
    return out


def laguerre_L(n: int, k: float, x):
    """Associated Laguerre polynomial ``L_n^k(x)``."""
    if n < 0 or k < 0:
        raise ValueError("Laguerre degree and superscript must be >= 0")
    return laguerre_all(n, k, x)[n]


def _check_index(m, n):
    if m < 0 or abs(n) > m or (m - abs(n)) % 2:
        raise DomainError(f"invalid Laguerre-Fourier index (m={m}, n={n}): need m >= |n| and m - |n| even")


def radial_all(N: int, n: int, r):
    """``y_kn(r)`` for ``k = |n|, |n|+2, .., N``; shape ``(count,) + r.shape``."""
    al = abs(n)
    r = np.asarray(r, dtype=float)
    if al > N:
        return np.empty((0,) + r.shape)
    J = (N - al) // 2
    L = laguerre_all(J, al, r * r)
    with np.errstate(divide="ignore"):
        logr = np.log(r)
    env = -0.5 * r * r + (al * logr if al else 0.0)
    out = np.empty_like(L)
    for j in range(J + 1):
        logc = 0.5 * (math.lgamma(j + 1) - math.lgamma(j + al + 1) - math.log(math.pi))
        out[j] = (-1) ** j * np.exp(env + logc) * L[j]
    return out


def radial_y(m: int, n: int, r):
    _check_index(m, n)
    return radial_all(m, n, r)[-1]


def chi_basis(m: int, n: int, r, phi):
    """``chi_mn(r, phi) = y_mn(r) exp(-i n phi)``."""
    return radial_y(m, n, r) * np.exp(-1j * n * np.asarray(phi, dtype=float))


def lf_indices(N: int):
    """Canonical ``(m, n)`` order: ``m`` ascending, ``n`` ascending within ``m``."""
    return [(m, n) for m in range(N + 1) for n in range(-m, m + 1, 2)]


@dataclass(frozen=True, eq=False)
class LaguerreFourierExpansion:
    """Coefficients ``rho_mn`` stored flat in :func:`lf_indices` order.

    Radii are in expansion units ``r / unit`` and the basis is dilated by ``scale``.
    """

    order: int
    scale: float
    coeffs: np.ndarray
    unit: float = 1.0
    residual: float = field(default=float("nan"), compare=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        n = (self.order + 1) * (self.order + 2) // 2
        if c.size != n:
            raise ValueError(f"order {self.order} needs {n} coefficients, got {c.size}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        if not self.scale >= 1 - 1e-12:
            raise ValueError(f"scale must be >= 1, got {self.scale}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def indices(self):
        return lf_indices(self.order)

    def harmonic_slots(self, n: int):
        """Flat positions of ``(m, n)`` for ``m = |n|, |n|+2, .., N``."""
        return np.array([i for i, (m, k) in enumerate(self.indices) if k == n], dtype=int)

    def coeff(self, m: int, n: int) -> complex:
        _check_index(m, n)
        return complex(self.coeffs[self.indices.index((m, n))])

    def with_coeffs(self, coeffs, scale=None) -> "LaguerreFourierExpansion":
        return LaguerreFourierExpansion(self.order, self.scale if scale is None else scale,
                                        coeffs, self.unit)

    def conjugate_residual(self) -> float:
        """``max |rho_m,-n - conj(rho_mn)|``; zero for a real image."""
        pos = {mn: i for i, mn in enumerate(self.indices)}
        c = self.coeffs
        return max((abs(c[pos[(m, -n)]] - np.conj(c[i])) for i, (m, n) in enumerate(self.indices)),
                   default=0.0)

    def to_text(self) -> str:
        head = f"LFEXP {self.order} {float(self.scale)!r}"
        if self.unit != 1.0:
            head += f" {float(self.unit)!r}"
        body = "\n".join(f"{float(z.real)!r} {float(z.imag)!r}" for z in self.coeffs)
        return head + "\n" + body + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LaguerreFourierExpansion":
        tok = text.split()
        if not tok or tok[0] != "LFEXP":
            raise ValueError("not an LFEXP file")
        N, a = int(tok[1]), float(tok[2])
        body = tok[3:]
        n = (N + 1) * (N + 2) // 2
        unit = 1.0
        if len(body) == 2 * n + 1:
            unit, body = float(body[0]), body[1:]
        if len(body) != 2 * n:
            raise ValueError(f"LFEXP body has {len(body)} values, expected {2 * n}")
        v = np.array([float(t) for t in body])
        return cls(N, a, v[0::2] + 1j * v[1::2], unit)


def _design(N: int, r, phi, scale: float):
    """Complex basis ``conj(chi_mn)(r / a, phi)`` as columns in canonical order."""
    r = np.asarray(r, dtype=float).ravel()
    phi = np.asarray(phi, dtype=float).ravel()
    idx = lf_indices(N)
    out = np.empty((r.size, len(idx)), dtype=complex)
    rad = {n: radial_all(N, n, r / scale) for n in range(N + 1)}
    for col, (m, n) in enumerate(idx):
        out[:, col] = rad[abs(n)][(m - abs(n)) // 2] * np.exp(1j * n * phi)
    return out


def laguerre_eval(exp: LaguerreFourierExpansion, r, phi, check=True):
    """Evaluate at expansion-unit polar coordinates."""
    r, phi = np.broadcast_arrays(np.asarray(r, float), np.asarray(phi, float))
    z = (_design(exp.order, r, phi, exp.scale) @ exp.coeffs).reshape(r.shape)
    return realify(z) if check else z.real


def _polar_grid(img: CartesianImage, unit: float):
    x1, x2 = img.coords()
    return np.hypot(x1, x2) / unit, np.arctan2(x2, x1)


def render_laguerre(exp: LaguerreFourierExpansion, like: CartesianImage) -> CartesianImage:
    r, phi = _polar_grid(like, exp.unit)
    return like.like(laguerre_eval(exp, r, phi))


def render_laguerre_polar(exp: LaguerreFourierExpansion, n_r: int, n_phi: int,
                          r_max: float) -> PolarImage:
    """Sample the expansion directly on a polar grid (``r_max`` in physical units)."""
    shell = PolarImage(np.zeros((n_r, n_phi)), r_max)
    r, phi = np.meshgrid(shell.radii / exp.unit, shell.angles, indexing="ij")
    return shell.like(laguerre_eval(exp, r, phi))


def laguerre_fit(img: CartesianImage, N: int, scale: float = 1.0, unit: float | None = None,
                 tikhonov: float = FIT_TIKHONOV) -> LaguerreFourierExpansion:
    """Least-squares order-N Laguerre-Fourier expansion of a real image.

    Works with the real pair ``(y cos n phi, y sin n phi)`` for each ``n > 0``
    so the result satisfies ``rho_m,-n = conj(rho_mn)`` by construction.
    """
    unit = default_unit(img, N) if unit is None else unit
    r, phi = _polar_grid(img, unit)
    Z = _design(N, r, phi, scale)
    idx = lf_indices(N)
    # real parametrization: n = 0 -> rho; n > 0 -> (2 Re rho, -2 Im rho) on (Re Z, Im Z)
    cols, keys = [], []
    for col, (m, n) in enumerate(idx):
        if n == 0:
            cols.append(Z[:, col].real)
            keys.append((m, n, "r"))
        elif n > 0:
            cols += [Z[:, col].real, Z[:, col].imag]
            keys += [(m, n, "c"), (m, n, "s")]
    A = np.column_stack(cols)
    G = A.T @ A
    cond = np.linalg.cond(G)
    if not cond < COND_LIMIT:
        raise ConditioningError(
            f"Laguerre-Fourier fit of order N={N} on a {img.width}x{img.height} grid is rank "
            f"deficient (condition number {cond:.3g}); lower N or enlarge the grid")
    sol = np.linalg.solve(G + tikhonov * np.eye(len(cols)), A.T @ img.values.ravel())
    got = dict(zip(keys, sol))
    c = np.empty(len(idx), dtype=complex)
    for col, (m, n) in enumerate(idx):
        if n == 0:
            c[col] = got[(m, 0, "r")]
        else:
            k = abs(n)
            z = 0.5 * got[(m, k, "c")] - 0.5j * got[(m, k, "s")]
            c[col] = z if n > 0 else np.conj(z)
    res = float(np.sqrt(np.mean((A @ sol - img.values.ravel()) ** 2)))
    return LaguerreFourierExpansion(N, scale, c, unit, res)


def _harmonics(exp):
    return np.array([n for _, n in exp.indices])


def blur_rotational_laguerre(exp: LaguerreFourierExpansion, t2: float) -> LaguerreFourierExpansion:
    """Rotational blur keeps the truncation and scales ``rho_mn`` by ``exp(-n^2 t2)``."""
    n = _harmonics(exp)
    return exp.with_coeffs(exp.coeffs * np.exp(-n * n * t2))


def deconv_rotational_laguerre(blurred_fit: LaguerreFourierExpansion, t2: float,
                               epsilon: float) -> LaguerreFourierExpansion:
    if t2 < 0 or epsilon < 0:
        raise DomainError("t2 and epsilon must be >= 0")
    n = _harmonics(blurred_fit)
    return blurred_fit.with_coeffs(blurred_fit.coeffs / (np.exp(-n * n * t2) + epsilon))


def _hankel_sign(k, n):
    # (-1)^((k + n) / 2); k + n is always even
    return 1.0 if ((k + n) // 2) % 2 == 0 else -1.0


def se2_ft_laguerre(exp: LaguerreFourierExpansion, p, band_limit: int | None = None) -> SE2Spectrum:
    """Closed-form ``m = 0`` row of the SE(2) transform (``p`` in physical units).

    ``rho_0n(p) = 4 pi^2 i^n a^2 sum_k rho_k,-n (-1)^((k+n)/2) y_kn(a p)``
    in expansion units; physical frequencies pick up ``unit^2`` and ``p unit``.
    """
    N = exp.order
    B = N if band_limit is None else band_limit
    p = np.asarray(p, dtype=float)
    q = p * exp.unit * exp.scale
    row = np.zeros((p.size, 2 * B + 1), dtype=complex)
    for n in range(-min(B, N), min(B, N) + 1):
        slots = exp.harmonic_slots(-n)
        ks = [exp.indices[s][0] for s in slots]
        Y = radial_all(N, n, q)
        signs = np.array([_hankel_sign(k, n) for k in ks])
        row[:, n + B] = (4 * math.pi ** 2 * ipow(n) * exp.scale ** 2 * exp.unit ** 2
                         * (exp.coeffs[slots] * signs) @ Y)
    return SE2Spectrum(B, p, row, float(p.max()) if p.size else 0.0)


def _alternating(count):
    return (-1.0) ** np.arange(count)


def _mult_matrix(N: int, n: int, a: float):
    """``C[j, i]`` with ``y_kj,n(p) exp(-p^2 t1) = sum_i C[j, i] y_ki,n(a p)``, ``a^2 = 2 t1 + 1``.

    Follows from the Laguerre multiplication theorem
    ``L_j(lam x) = sum_i binom(j + |n|, j - i) lam^i (1 - lam)^(j - i) L_i(x)``, ``lam = a^-2``.
    """
    al = abs(n)
    J = (N - al) // 2
    lam = 1.0 / (a * a)
    C = np.zeros((J + 1, J + 1))

    def logc(j):
        return 0.5 * (math.lgamma(j + 1) - math.lgamma(j + al + 1))

    for j in range(J + 1):
        for i in range(j + 1):
            if j > i and lam == 1.0:
                continue
            logb = math.lgamma(j + al + 1) - math.lgamma(j - i + 1) - math.lgamma(i + al + 1)
            logv = logb + logc(j) - logc(i) - al * math.log(a) + i * math.log(lam)
            if j > i:
                logv += (j - i) * math.log1p(-lam)
            C[j, i] = (-1) ** (j - i) * math.exp(logv)
    return C


def blur_se2_laguerre(exp: LaguerreFourierExpansion, params: MotionParams) -> LaguerreFourierExpansion:
    """Exact coefficient map of combined blur (``t1``, ``t2`` in expansion units).

    Input at scale 1, output at scale ``a = sqrt(2 t1 + 1)``:
    ``g_i = exp(-n^2 t2) a^-2 s_i sum_k s_k C[k, i] rho_k`` per harmonic, where
    ``s`` are the Hankel signs.
    """
    if abs(exp.scale - 1.0) > 1e-12:
        raise ValueError("forward blur map expects a scale-1 expansion")
    a = math.sqrt(2 * params.t1 + 1)
    N = exp.order
    out = np.zeros_like(exp.coeffs)
    for n in range(-N, N + 1):
        slots = exp.harmonic_slots(n)
        s = _alternating(slots.size)
        C = _mult_matrix(N, n, a)
        out[slots] = math.exp(-n * n * params.t2) / a ** 2 * s * ((s * exp.coeffs[slots]) @ C)
    return exp.with_coeffs(out, scale=a)


def default_p_samples(N: int):
    """``2 (N + 1)`` uniform samples on ``[0.05, sqrt(2N + 1)]``."""
    return np.linspace(0.05, math.sqrt(2 * N + 1), 2 * (N + 1))


def deconv_se2_laguerre(blurred_fit: LaguerreFourierExpansion, params: MotionParams,
                        epsilon: float, p_samples=None) -> LaguerreFourierExpansion:
    """Per-harmonic solve ``r = a^2 J Y^+ W^+ Y_a J g`` onto the scale-1 basis.

    ``W = diag(exp(-p^2 t1 - n^2 t2))`` inverted as ``1 / (w + eps)``,
    ``Y^+ = (Y^T Y)^-1 Y^T`` and ``J`` alternates sign along the unknowns.
    ``params`` are in expansion units.
    """
    a = math.sqrt(2 * params.t1 + 1)
    if abs(blurred_fit.scale - a) > 1e-9:
        raise ValueError(f"blurred expansion has scale {blurred_fit.scale}, expected sqrt(2 t1 + 1) = {a}")
    if epsilon < 0:
        raise DomainError("epsilon must be >= 0")
    N = blurred_fit.order
    p = default_p_samples(N) if p_samples is None else np.asarray(p_samples, float)
    out = np.zeros_like(blurred_fit.coeffs)
    for n in range(-N, N + 1):
        slots = blurred_fit.harmonic_slots(n)
        if p.size < slots.size:
            raise ValueError(f"harmonic {n} has {slots.size} unknowns but only {p.size} p samples")
        Y = radial_all(N, n, p).T
        Ya = radial_all(N, n, a * p).T
        YtY = Y.T @ Y
        cond = np.linalg.cond(YtY)
        if not cond < COND_LIMIT:
            raise ConditioningError(
                f"Laguerre SE(2) deconvolution, harmonic n={n}: condition number {cond:.3g} "
                f"exceeds {COND_LIMIT:g}; choose different p samples")
        Winv = 1.0 / (np.exp(-p * p * params.t1 - n * n * params.t2) + epsilon)
        s = _alternating(slots.size)
        X = np.linalg.solve(YtY, Y.T @ (Winv[:, None] * Ya))
        out[slots] = a ** 2 * s * (X @ (s * blurred_fit.coeffs[slots]))
    return blurred_fit.with_coeffs(out, scale=1.0)
