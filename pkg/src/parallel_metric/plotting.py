"""Static figures for the ``plot-data`` report."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "figure.figsize": (5.0, 4.0),
    "figure.dpi": 120,
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.bbox": "tight",
}


def _colors(block_of):
    cmap = plt.get_cmap("tab10")
    return [cmap(k % 10) for k in block_of]


def plot_points(coords, block_of, names, path):
    coords = np.asarray(coords, dtype=float)
    if coords.shape[1] == 1:
        coords = np.column_stack([coords[:, 0], np.zeros(len(coords))])
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        c = _colors(block_of)
        ax.scatter(coords[:, 0], coords[:, 1], c=c, s=14)
        if len(names) <= 10:
            for k, name in enumerate(names):
                ax.scatter([], [], color=_colors([k])[0], label=name, s=14)
            ax.legend(frameon=False, fontsize=7)
        ax.set_aspect("equal", adjustable="datalim")
        ax.set_title("points by block")
        fig.savefig(path)
        plt.close(fig)


def plot_distance_comparison(rho, d, same_block, path):
    """Constructed distance against truncated input distance, one dot per pair."""
    rho = np.asarray(rho, dtype=float)
    d = np.asarray(d, dtype=float)
    iu = np.triu_indices(len(rho), 1)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        within = same_block[iu]
        ax.scatter(rho[iu][~within], d[iu][~within], s=6, label="across blocks")
        ax.scatter(rho[iu][within], d[iu][within], s=6, label="within a block")
        ax.plot([0, 1], [0, 1], lw=0.8, color="0.5")
        ax.set_xlabel("input distance (capped at 1)")
        ax.set_ylabel("constructed distance")
        ax.set_xlim(0, 1.02)
        ax.set_ylim(0, 1.02)
        ax.legend(frameon=False, fontsize=7)
        fig.savefig(path)
        plt.close(fig)


def plot_block_distances(table, names, path, title="distances between blocks"):
    table = np.asarray(table, dtype=float)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        im = ax.imshow(table, cmap="viridis")
        ax.set_xticks(range(len(names)), names, rotation=90, fontsize=7)
        ax.set_yticks(range(len(names)), names, fontsize=7)
        fig.colorbar(im, ax=ax)
        ax.set_title(title)
        fig.savefig(path)
        plt.close(fig)


def plot_modulus(scales, input_mod, constructed_mod, path):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(scales, input_mod, marker="o", ms=3, label="input metric")
        ax.plot(scales, constructed_mod, marker="s", ms=3, label="constructed metric")
        ax.plot(scales, scales, lw=0.8, ls="--", color="0.5", label="identity")
        ax.set_xlabel("scale")
        ax.set_ylabel("largest one-sided block gap")
        ax.legend(frameon=False, fontsize=7)
        fig.savefig(path)
        plt.close(fig)
