"""Figure rendering for the CLI reports (non-interactive backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def image_panels(panels, path, title=None):
    """Side-by-side grayscale panels; ``panels`` is a list of ``(label, CartesianImage)``."""
    lo = min(float(img.values.min()) for _, img in panels)
    hi = max(float(img.values.max()) for _, img in panels)
    fig, axes = plt.subplots(1, len(panels), figsize=(3 * len(panels), 3.3), squeeze=False)
    for ax, (label, img) in zip(axes[0], panels):
        ax.imshow(img.values, cmap="gray", vmin=lo, vmax=hi, interpolation="nearest")
        ax.set_title(label, fontsize=9)
        ax.set_xticks([])
        ax.set_yticks([])
    if title:
        fig.suptitle(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def sweep_curve(rows, path, title=None, baseline=None):
    """RMSE against epsilon on log axes; the best row is marked."""
    eps = [r["epsilon"] for r in rows]
    err = [r["rmse"] for r in rows]
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    ax.loglog(eps, err, "o-", ms=4)
    best = [r for r in rows if r.get("best")]
    if best:
        ax.loglog([best[0]["epsilon"]], [best[0]["rmse"]], "r*", ms=12, label="best")
    if baseline is not None:
        ax.axhline(baseline, color="gray", ls="--", lw=1, label="blurred")
    ax.set_xlabel("epsilon")
    ax.set_ylabel("RMSE to reference")
    if title:
        ax.set_title(title, fontsize=10)
    if best or baseline is not None:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
