"""Convergence figures rendered from a training report.

The metrics CSV is the canonical data interface; these plots are a
convenience view written next to it after a run.
"""

from __future__ import annotations

import os
from typing import Sequence

import matplotlib

matplotlib.use("Agg")  # headless
import matplotlib.pyplot as plt

from .train import EpochRow


def render_convergence_figures(rows: Sequence[EpochRow], out_dir, stem: str = "metrics") -> list[str]:
    """Write loss and accuracy curves as PNGs; returns the file paths."""
    if not rows:
        raise ValueError("no epochs to plot")
    epochs = [r.epoch for r in rows]
    os.makedirs(out_dir, exist_ok=True)
    paths = []

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(epochs, [r.train_loss for r in rows], marker="o", markersize=3, label="train loss")
    ax.plot(epochs, [r.val_loss for r in rows], marker="s", markersize=3, label="validation loss")
    ax.set_xlabel("epoch")
    ax.set_ylabel("loss")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    loss_path = os.path.join(out_dir, f"{stem}_loss.png")
    fig.savefig(loss_path, dpi=120)
    plt.close(fig)
    paths.append(loss_path)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(epochs, [r.val_accuracy for r in rows], marker="o", markersize=3, color="tab:green",
            label="validation accuracy")
    ax.set_xlabel("epoch")
    ax.set_ylabel("accuracy")
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)
    ax2 = ax.twinx()
    ax2.plot(epochs, [r.learning_rate for r in rows], drawstyle="steps-post", color="tab:gray",
             alpha=0.7, label="learning rate")
    ax2.set_ylabel("learning rate")
    lines, labels = ax.get_legend_handles_labels()
    lines2, labels2 = ax2.get_legend_handles_labels()
    ax.legend(lines + lines2, labels + labels2, loc="lower right")
    fig.tight_layout()
    acc_path = os.path.join(out_dir, f"{stem}_accuracy.png")
    fig.savefig(acc_path, dpi=120)
    plt.close(fig)
    paths.append(acc_path)

    return paths
