"""Integer-order Bessel functions of the first kind.

Small arguments use the ascending series; everything else uses Miller's
backward recurrence normalized by ``J0 + 2 sum_k J_2k = 1``.  Negative orders
come from ``J_{-n} = (-1)^n J_n``.
"""

from __future__ import annotations

import math

import numpy as np

SERIES_LIMIT = 12.0
_SERIES_TERMS = 64
_RESCALE = 1e250


def _series_all(nmax, x):
    """Ascending series for orders 0..nmax; x is 1-D with x < SERIES_LIMIT."""
    out = np.empty((nmax + 1, x.size))
    h = 0.5 * x
    h2 = h * h
    with np.errstate(divide="ignore"):
        logh = np.log(h)
    for n in range(nmax + 1):
        if n == 0:
            term = np.ones_like(x)
        else:
            term = np.where(x > 0, np.exp(n * logh - math.lgamma(n + 1)), 0.0)
        acc = term.copy()
        for k in range(1, _SERIES_TERMS):
            term = -term * h2 / (k * (k + n))
            acc += term
        out[n] = acc
    return out


def _miller_all(nmax, x):
    """Backward recurrence for orders 0..nmax; x is 1-D with x > 0."""
    top = max(nmax, float(x.max()))
    start = int(top + 30 + 4 * top ** (1 / 3))
    start += start % 2
    out = np.zeros((nmax + 1, x.size))
    bjp = np.zeros_like(x)
    bj = np.full_like(x, 1e-300)
    norm = np.zeros_like(x)
    two_over_x = 2.0 / x
    for j in range(start, 0, -1):
        bjm = j * two_over_x * bj - bjp
        bjp, bj = bj, bjm
        order = j - 1
        if order <= nmax:
            out[order] = bj
        if order % 2 == 0:
            norm += bj if order == 0 else 2.0 * bj
        big = np.abs(bj) > _RESCALE
        if big.any():
            bj[big] /= _RESCALE
            bjp[big] /= _RESCALE
            norm[big] /= _RESCALE
            out[:, big] /= _RESCALE
    return out / norm


def bessel_j_all(nmax: int, x):
    """``J_0 .. J_nmax`` at ``x``; returns shape ``(nmax + 1,) + x.shape``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("Bessel argument must be >= 0")
    if nmax < 0:
        raise ValueError("nmax must be >= 0")
    flat = x.ravel()
    out = np.empty((nmax + 1, flat.size))
    small = flat < SERIES_LIMIT
    if small.any():
        out[:, small] = _series_all(nmax, flat[small])
    if (~small).any():
        out[:, ~small] = _miller_all(nmax, flat[~small])
    return out.reshape((nmax + 1,) + x.shape)


def bessel_j(nu: int, x):
    """``J_nu(x)`` for integer ``nu`` and ``x >= 0``."""
    nu = int(nu)
    row = bessel_j_all(abs(nu), x)[abs(nu)]
    if nu < 0 and abs(nu) % 2:
        row = -row
    return row if row.ndim else float(row)


class BesselTable:
    """Read-only ``J_nu(x)`` for ``|nu| <= max_order`` on a fixed argument grid."""

    def __init__(self, max_order: int, x, _values=None):
        self.max_order = int(max_order)
        self.x = np.array(x, dtype=float)
        self.x.setflags(write=False)
        if _values is None:
            pos = bessel_j_all(self.max_order, self.x)
            sign = (-1.0) ** np.arange(self.max_order, 0, -1)
            neg = pos[:0:-1] * sign.reshape((-1,) + (1,) * self.x.ndim)
            _values = np.concatenate([neg, pos])
        self._values = np.array(_values)
        self._values.setflags(write=False)

    def __call__(self, nu: int):
        nu = int(nu)
        if abs(nu) > self.max_order:
            raise KeyError(f"order {nu} outside table (|nu| <= {self.max_order})")
        return self._values[nu + self.max_order]

    def orders(self, nus):
        return self._values[np.asarray(nus) + self.max_order]

    def corrupted(self, scale=1e-6, seed=0) -> "BesselTable":
        """Copy with the negative-order rows perturbed (debug hook for self-tests)."""
        rng = np.random.default_rng(seed)
        vals = self._values.copy()
        vals[:self.max_order] += scale * rng.standard_normal(vals[:self.max_order].shape)
        return BesselTable(self.max_order, self.x, vals)
