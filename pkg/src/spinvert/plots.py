"""Figure rendering for the CLI report paths (PNG files next to the CSVs)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .elastic import ElasticModel, to_impedances
from .forward import SeismicGather
from .inversion import InversionReport, SweepRow


def plot_gather(gather: SeismicGather, path) -> None:
    """Traces offset horizontally by angle, time running downward."""
    times = gather.axis.times()
    peak = np.max(np.abs(gather.traces))
    scale = 0.45 / peak if peak > 0 else 1.0
    fig, ax = plt.subplots(figsize=(1.5 + 1.2 * len(gather.angles), 5))
    for i, angle in enumerate(gather.angles):
        ax.plot(i + scale * gather.traces[i], times, "k-", lw=0.9)
    ax.set_xticks(range(len(gather.angles)))
    ax.set_xticklabels([f"{a:g}" for a in gather.angles])
    ax.set_xlabel("angle (deg)")
    ax.set_ylabel("t (s)")
    ax.invert_yaxis()
    ax.set_title("gather")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def plot_impedances(report: InversionReport, path,
                    background: ElasticModel | None = None,
                    truth: ElasticModel | None = None) -> None:
    times = report.predicted_model.axis.times()
    has_is = report.predicted_is is not None
    n_panels = 2 if has_is else 1
    fig, axes = plt.subplots(1, n_panels, figsize=(4 * n_panels, 5), sharey=True)
    axes = np.atleast_1d(axes)

    def draw(ax, idx, title):
        curves = [("predicted", (report.predicted_ip, report.predicted_is)[idx], "C3-")]
        if background is not None:
            curves.append(("background", to_impedances(background)[idx], "C0--"))
        if truth is not None:
            curves.append(("truth", to_impedances(truth)[idx], "k-"))
        for label, values, style in curves:
            if values is not None:
                ax.plot(values, times, style, lw=1.2, label=label)
        ax.set_xlabel("km/s*g/cc")
        ax.set_title(title)
        ax.legend(fontsize=8)

    draw(axes[0], 0, "P impedance")
    if has_is:
        draw(axes[1], 1, "S impedance")
    axes[0].set_ylabel("t (s)")
    axes[0].invert_yaxis()
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def plot_epochs(report: InversionReport, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    epochs = np.arange(1, len(report.objective_per_epoch) + 1)
    ax.plot(epochs, report.objective_per_epoch, "o-")
    ax.set_xlabel("epoch")
    ax.set_ylabel("objective")
    ax.set_xticks(epochs)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def plot_sweep(rows: list[SweepRow], path) -> None:
    counts = [row.n_spins for row in rows]
    fig, axes = plt.subplots(2, 2, figsize=(8, 6))
    panels = [
        ("runtime (s)", [row.runtime_s for row in rows]),
        ("solver time (s)", [row.solver_time_s for row in rows]),
        ("objective", [row.objective for row in rows]),
        ("rms_ip (km/s*g/cc)", [row.rms_ip for row in rows]),
    ]
    for ax, (label, values) in zip(axes.ravel(), panels):
        if all(v is None for v in values):
            ax.set_visible(False)
            continue
        ax.plot(counts, values, "o-")
        ax.set_xlabel("spins per weight")
        ax.set_ylabel(label)
        ax.set_xticks(counts)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
