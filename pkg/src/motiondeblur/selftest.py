"""Fast analytic invariant checks, shared by ``motiondeblur selftest`` and the tests."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import phantoms
from .bessel import BesselTable
from .blur import Order, exact_blur_se2
from .hermite import hermite_eigen_check, hermite_functions
from .imaging import rmse
from .kernels import MotionParams, kernel_ft_se2, se2_kernel_density
from .laguerre import radial_y
from .se2 import ipow, se2_transform_numeric


@dataclass
class Check:
    name: str
    passed: bool
    error: float
    tolerance: float
    seconds: float = 0.0

    def record(self):
        return {"check": self.name, "passed": self.passed, "error": self.error,
                "tolerance": self.tolerance, "seconds": round(self.seconds, 3)}


def _legendre(a, b, n):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def hermite_eigenfunction(nmax=20, tol=1e-8):
    """Quadrature Fourier transform of ``h_n`` against ``sqrt(2 pi) (-i)^n h_n``."""
    x, w = _legendre(-20.0, 20.0, 400)
    H = hermite_functions(nmax, x)
    omega = np.linspace(-5, 5, 21)
    E = np.exp(-1j * np.outer(x, omega))
    err = 0.0
    for n in range(nmax + 1):
        num = (H[n] * w) @ E
        err = max(err, float(np.abs(num - hermite_eigen_check(n, omega)).max()))
    return err, tol


def kernel_transform(params=MotionParams(0.5, 0.1), tol=1e-4):
    """Closed-form diagonal transform of the SE(2) heat kernel against quadrature."""
    def f(r, phi, theta):
        return se2_kernel_density(r, phi, theta, params)

    r_max = math.sqrt(4 * params.t1 * 40)
    err = 0.0
    for m, n, p in ((0, 0, 0.5), (1, 1, 1.0), (2, 2, 2.0), (-2, -2, 1.3), (0, 1, 1.0), (2, -1, 0.8)):
        num = se2_transform_numeric(f, m, n, p, r_max)
        ref = kernel_ft_se2(p, m, params) if m == n else 0.0
        err = max(err, abs(num - ref))
    return err, tol


def hankel_laguerre(kmax=8, tol=1e-6):
    """``int y_kl(r) J_l(p r) r dr = (-1)^((k-l)/2) y_kl(p)`` by Gauss-Legendre quadrature."""
    r, w = _legendre(0.0, 30.0, 600)
    p = np.array([0.2, 0.9, 1.7, 3.1])
    table = BesselTable(kmax, np.multiply.outer(p, r))
    err = 0.0
    for k in range(kmax + 1):
        for l in range(-k, k + 1, 2):
            num = table(l) @ (radial_y(k, l, r) * r * w)
            ref = (-1) ** ((k - l) // 2) * radial_y(k, l, p)
            err = max(err, float(np.abs(num - ref).max()))
    return err, tol


def representation_symmetries(count=1000, seed=0, table_hook=None, tol=1e-12):
    """The three symmetry identities of ``u_mn`` evaluated through a Bessel table.

    ``table_hook`` may replace the table (used to confirm the check detects a
    corrupted table).
    """
    rng = np.random.default_rng(seed)
    B = 6
    a = rng.uniform(0, 5, count)
    phi = rng.uniform(-math.pi, math.pi, count)
    theta = rng.uniform(-math.pi, math.pi, count)
    p = rng.uniform(0, 3, count)
    m = rng.integers(-B, B + 1, count)
    n = rng.integers(-B, B + 1, count)
    table = BesselTable(2 * B, p * a)
    if table_hook is not None:
        table = table_hook(table)
    idx = np.arange(count)

    def u(mm, nn, ph, th):
        ph_ = np.array([ipow(k) for k in nn - mm])
        return ph_ * np.exp(-1j * (nn * th + (mm - nn) * ph)) * table.orders(nn - mm)[idx, idx]

    sign = (-1.0) ** (m - n)
    e1 = np.abs(np.conj(u(m, n, phi, theta)) - sign * u(-m, -n, phi, theta)).max()
    # the translation direction flips: a -> a, phi -> phi + pi
    e2 = np.abs(u(m, n, phi + math.pi, theta) - sign * u(m, n, phi, theta)).max()
    e3 = np.abs(sign * u(m, n, phi - theta, -theta) - np.conj(u(n, m, phi, theta))).max()
    return float(max(e1, e2, e3)), tol


def commutativity(params=MotionParams(2.0, 0.02), tol=0.02):
    """Both blur orders agree on every phantom (RMSE over range)."""
    err = 0.0
    for name in sorted(phantoms.PHANTOMS):
        img = phantoms.make(name, 64)
        a = exact_blur_se2(img, params, Order.TRANSLATE_THEN_ROTATE)
        b = exact_blur_se2(img, params, Order.ROTATE_THEN_TRANSLATE)
        err = max(err, rmse(a, b) / img.value_range())
    return err, tol


CHECKS = {
    "hermite-eigenfunction": hermite_eigenfunction,
    "kernel-transform": kernel_transform,
    "hankel-laguerre": hankel_laguerre,
    "representation-symmetries": representation_symmetries,
    "blur-commutativity": commutativity,
}


def run(corrupt_bessel_table=False):
    out = []
    for name, fn in CHECKS.items():
        t = time.perf_counter()
        if name == "representation-symmetries" and corrupt_bessel_table:
            err, tol = fn(table_hook=lambda tb: tb.corrupted())
        else:
            err, tol = fn()
        out.append(Check(name, bool(err <= tol), float(err), tol, time.perf_counter() - t))
    return out
