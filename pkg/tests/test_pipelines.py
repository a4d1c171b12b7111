import numpy as np
import pytest

from motiondeblur import phantoms
from motiondeblur.blur import exact_blur_se2
from motiondeblur.imaging import rmse
from motiondeblur.kernels import DomainError, MotionParams
from motiondeblur.pipelines import (METHODS, DeblurOptions, applicable, deblur, log_grid, matched,
                                    sweep)

OPTS = DeblurOptions(order=20)


@pytest.mark.parametrize("method,params", [
    ("wiener", MotionParams(2.0, 0.0)),
    ("hermite", MotionParams(2.0, 0.0)),
    ("circ", MotionParams(0.0, 0.02)),
    ("laguerre-rot", MotionParams(0.0, 0.02)),
    ("se2", MotionParams(2.0, 0.02)),
    ("laguerre-se2", MotionParams(2.0, 0.02)),
])
def test_matched_method_improves(method, params):
    img = phantoms.blobs()
    blurred = exact_blur_se2(img, params)
    out = deblur(blurred, method, params, 1e-4, OPTS)
    assert out.shape == img.shape and out.pitch == img.pitch
    assert rmse(out, img) < rmse(blurred, img)


def test_applicability():
    t1, t2, both = MotionParams(1.0, 0.0), MotionParams(0.0, 0.1), MotionParams(1.0, 0.1)
    assert applicable("wiener", t1) and not applicable("wiener", t2)
    assert applicable("circ", both) and not matched("circ", both)
    assert matched("se2", t1) and matched("se2", both)
    assert all(applicable(m, both) for m in METHODS)


def test_inapplicable_method_only_rescales():
    img = phantoms.blobs()
    out = deblur(img, "wiener", MotionParams(0.0, 0.1), 0.01)
    assert np.abs(out.values - img.values / 1.01).max() < 1e-12


def test_validation():
    img = phantoms.blobs(16)
    with pytest.raises(DomainError):
        deblur(img, "nope", MotionParams(1.0, 0.0), 1e-3)
    with pytest.raises(DomainError):
        deblur(img, "wiener", MotionParams(1.0, 0.0), 0.0)
    with pytest.raises(DomainError):
        sweep(img, "wiener", MotionParams(1.0, 0.0), [], img)


def test_log_grid():
    g = log_grid(1e-8, 1e-1, 2)
    assert len(g) == 15
    assert g[0] == pytest.approx(1e-8) and g[-1] == pytest.approx(1e-1)
    assert np.allclose(np.diff(np.log10(g)), 0.5)


def test_sweep_prefers_small_epsilon_without_noise():
    img = phantoms.blobs()
    P = MotionParams(2.0, 0.0)
    blurred = exact_blur_se2(img, P)
    rows, images = sweep(blurred, "wiener", P, [1e-1, 1e-8], img, keep_images=True)
    assert rows[1]["rmse"] < rows[0]["rmse"]
    assert [r["best"] for r in rows] == [False, True]
    assert len(images) == 2
    assert rows[1]["psnr"] > rows[0]["psnr"]
    single = sweep(blurred, "wiener", P, [1e-3], img)
    assert len(single) == 1 and single[0]["best"]
