"""Figures written next to the text reports of the CLI."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "legend.fontsize": 8,
    "figure.dpi": 120,
    "savefig.bbox": "tight",
}


def _figure(width=4.5, ratio=None):
    golden = (np.sqrt(5.0) - 1.0) / 2.0
    return plt.subplots(figsize=(width, width * (ratio or golden)))


def plot_gram(K, path, title="Gram matrix"):
    with plt.rc_context(STYLE):
        fig, ax = _figure(4.0, 0.9)
        im = ax.imshow(np.asarray(K), cmap="viridis", interpolation="nearest")
        ax.set_title(title)
        ax.set_xlabel("graph")
        ax.set_ylabel("graph")
        fig.colorbar(im, ax=ax, shrink=0.85)
        fig.savefig(path)
        plt.close(fig)


def plot_contributions(contributions, path):
    """Mean off-diagonal share of each iteration's contribution to the kernel."""
    vals = []
    for Kt in contributions:
        Kt = np.asarray(Kt)
        d = np.sqrt(np.outer(np.diag(Kt), np.diag(Kt)))
        with np.errstate(invalid="ignore", divide="ignore"):
            C = np.where(d > 0, Kt / d, 0.0)
        n = C.shape[0]
        vals.append((C.sum() - np.trace(C)) / max(n * (n - 1), 1))
    with plt.rc_context(STYLE):
        fig, ax = _figure()
        ax.plot(range(len(vals)), vals, marker="o", color="k", lw=1)
        ax.set_xlabel("iteration $t$")
        ax.set_ylabel("mean normalized similarity")
        ax.spines[["top", "right"]].set_visible(False)
        fig.savefig(path)
        plt.close(fig)


def plot_accuracies(report, path):
    acc = np.asarray(report.accuracies)
    with plt.rc_context(STYLE):
        fig, ax = _figure()
        ax.boxplot(acc.T, widths=0.5)
        ax.plot(range(1, acc.shape[0] + 1), report.run_accuracies, "o", color="tab:red", ms=4,
                label="run accuracy")
        ax.axhline(report.mean, color="0.4", ls="--", lw=1, label=f"mean {report.mean:.3f}")
        ax.set_xlabel("run")
        ax.set_ylabel("fold accuracy")
        ax.set_ylim(-0.02, 1.02)
        ax.legend(loc="lower right", frameon=False)
        ax.spines[["top", "right"]].set_visible(False)
        fig.savefig(path)
        plt.close(fig)
