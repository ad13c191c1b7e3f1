"""Diagnostic figures written next to CLI reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_estimate(estimate, path: str | Path, exact=None, epsilon: float | None = None,
                  title: str = "") -> Path:
    """Batch means, their median and (when known) the exact value with a
    relative-error band."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    means = list(estimate.batch_means)
    if means:
        ax.plot(range(1, len(means) + 1), means, "o", color="tab:blue", label="batch mean")
    ax.axhline(estimate.value, color="tab:blue", lw=1.5, label="median")
    if exact is not None:
        v = float(exact)
        ax.axhline(v, color="black", ls="--", lw=1, label="exact")
        if epsilon:
            ax.axhspan(v * (1 - epsilon), v * (1 + epsilon), color="0.85", zorder=0,
                       label=f"±{epsilon:g} relative")
    ax.set_xlabel("batch")
    ax.set_ylabel("probability")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
    return path
