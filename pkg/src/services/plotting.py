"""
SVG figures of parameter sweeps.

Figures are written with the Agg backend, a fixed SVG hash salt and no
creation date, so identical sweeps produce identical files.
"""

import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from src.models.experiment import SweepResult  # noqa: E402

logger = logging.getLogger(__name__)

plt.rcParams["svg.hashsalt"] = "cfmm-notrade"
SVG_METADATA = {"Date": None}


def plot_sweep1d(
    result: SweepResult,
    path: Path,
    no_trade_interval: tuple[float, float] | None = None,
) -> Path:
    """
    Net trade of every asset against the scaling factor t.

    The closed-form no-trade interval is shaded; solver no-trade points are marked.
    """
    t = np.array([row.t for row in result.rows])
    net = np.array([row.net for row in result.rows])
    index = result.perturbed[0]

    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    if no_trade_interval is not None and no_trade_interval[0] <= no_trade_interval[1]:
        ax.axvspan(*no_trade_interval, color="0.9", label="closed-form no-trade")
    for asset in range(net.shape[1]):
        ax.plot(t, net[:, asset], linewidth=1.2, label=f"asset {asset}")
    flags = np.array([row.no_trade_solver for row in result.rows])
    ax.plot(t[flags], np.zeros(flags.sum()), "k|", markersize=8, label="solver no-trade")
    ax.axhline(0.0, color="0.4", linewidth=0.6)
    ax.set_xlabel(f"price scaling t of asset {index}")
    ax.set_ylabel("net trade x - y")
    ax.set_title(result.name)
    ax.legend(fontsize="small", ncol=2)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    logger.info(f"Wrote {path}")
    return path


def plot_sweep2d(result: SweepResult, path: Path) -> Path:
    """Closed-form and solver no-trade flags over the (t, s) grid, side by side."""
    t_values = sorted({row.t for row in result.rows})
    s_values = sorted({row.s for row in result.rows if row.s is not None})
    closed = np.zeros((len(s_values), len(t_values)))
    solver = np.zeros_like(closed)
    t_index = {t: i for i, t in enumerate(t_values)}
    s_index = {s: j for j, s in enumerate(s_values)}
    for row in result.rows:
        assert row.s is not None
        closed[s_index[row.s], t_index[row.t]] = row.no_trade_closed_form
        solver[s_index[row.s], t_index[row.t]] = row.no_trade_solver

    extent = (t_values[0], t_values[-1], s_values[0], s_values[-1])
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 4.2), sharey=True)
    for ax, flags, title in ((axes[0], closed, "closed form"), (axes[1], solver, "solver")):
        ax.imshow(flags, origin="lower", extent=extent, aspect="auto", cmap="Greys", vmin=0, vmax=1)
        ax.set_title(f"no-trade region ({title})")
        ax.set_xlabel(f"t (asset {result.perturbed[0]})")
    axes[0].set_ylabel(f"s (asset {result.perturbed[1]})")
    fig.suptitle(result.name)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    logger.info(f"Wrote {path}")
    return path
