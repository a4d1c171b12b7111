"""The six deblurring methods on Cartesian images, plus the epsilon sweep.

Diffusion times are physical: ``t1`` in length^2 (px^2 at unit pitch) and
``t2`` in rad^2.  The expansion methods convert ``t1`` to expansion units
with ``t1 / unit^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .fourier import deconv_rotational_image, deconv_translational
from .hermite import (blur_scale, deconv_translational_hermite, default_unit, hermite_fit,
                      render_hermite)
from .imaging import CartesianImage, psnr, rmse
from .kernels import DomainError, MotionParams
from .laguerre import (deconv_rotational_laguerre, deconv_se2_laguerre, laguerre_fit,
                       render_laguerre)
from .se2 import DeconvConfig, deconv_se2

METHODS = ("wiener", "circ", "se2", "hermite", "laguerre-rot", "laguerre-se2")

# which diffusion times each method models
MODELS = {
    "wiener": ("t1",),
    "hermite": ("t1",),
    "circ": ("t2",),
    "laguerre-rot": ("t2",),
    "se2": ("t1", "t2"),
    "laguerre-se2": ("t1", "t2"),
}


@dataclass(frozen=True)
class DeblurOptions:
    order: int = 30
    band_limit: int | None = None
    n_radial: int | None = None
    p_max: float | None = None
    n_r: int | None = None
    n_phi: int | None = None
    pad: int = 0


def applicable(method: str, params: MotionParams) -> bool:
    """True when ``params`` has a nonzero component that ``method`` models."""
    return any(getattr(params, t) > 0 for t in MODELS[method])


def matched(method: str, params: MotionParams) -> bool:
    """True when the method models every nonzero component of ``params``."""
    return applicable(method, params) and all(
        t in MODELS[method] for t in ("t1", "t2") if getattr(params, t) > 0)


def deblur(img: CartesianImage, method: str, params: MotionParams, epsilon: float,
           options: DeblurOptions = DeblurOptions()) -> CartesianImage:
    if method not in METHODS:
        raise DomainError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    if not epsilon > 0:
        raise DomainError("epsilon must be > 0")
    o = options
    if method == "wiener":
        return deconv_translational(img, params.t1, epsilon, o.pad)
    if method == "circ":
        return deconv_rotational_image(img, params.t2, epsilon, o.n_r, o.n_phi)
    if method == "se2":
        cfg = DeconvConfig(epsilon, o.band_limit, o.n_radial, o.p_max)
        return deconv_se2(img, params, cfg, o.n_r, o.n_phi)

    N = o.order
    unit = default_unit(img, N)
    t1 = params.t1 / unit ** 2
    if method == "hermite":
        fit = hermite_fit(img, N, blur_scale(t1), unit)
        return render_hermite(deconv_translational_hermite(fit, t1, epsilon), img)
    if method == "laguerre-rot":
        fit = laguerre_fit(img, N, 1.0, unit)
        return render_laguerre(deconv_rotational_laguerre(fit, params.t2, epsilon), img)
    fit = laguerre_fit(img, N, blur_scale(t1), unit)
    xi_params = MotionParams(t1, params.t2, params.series_cutoff)
    return render_laguerre(deconv_se2_laguerre(fit, xi_params, epsilon), img)


def log_grid(lo=1e-8, hi=1e-1, per_decade=2):
    n = int(round(math.log10(hi / lo) * per_decade)) + 1
    return [lo * (hi / lo) ** (k / (n - 1)) for k in range(n)]


def sweep(img: CartesianImage, method: str, params: MotionParams, epsilons, reference: CartesianImage,
          options: DeblurOptions = DeblurOptions(), keep_images=False):
    """Deblur at each epsilon and score against ``reference``.

    Rows are ``{epsilon, rmse, psnr, best}``; ``best`` marks the lowest rmse.
    With ``keep_images`` the deblurred images come back as a second list.
    """
    if not epsilons:
        raise DomainError("need at least one epsilon")
    peak = reference.value_range() or 1.0
    rows, images = [], []
    for eps in epsilons:
        out = deblur(img, method, params, eps, options)
        rows.append({"epsilon": eps, "rmse": rmse(out, reference), "psnr": psnr(out, reference, peak),
                     "best": False})
        if keep_images:
            images.append(out)
    best = min(range(len(rows)), key=lambda k: rows[k]["rmse"])
    rows[best]["best"] = True
    return (rows, images) if keep_images else rows
