"""Figure rendering for energy profiles.

Kept separate from the CLI so matplotlib is only imported (and its Agg
backend selected) when a plot is actually requested.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np


def plot_energy_profile(profile: np.ndarray, path: str | Path, title: str | None = None) -> None:
    """Render the per-frame energy curve to an image file.

    The x axis is the 1-based frame index; the y axis the flow energy. The
    output format follows the file extension (PNG, PDF, SVG, ...).
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    energies = np.asarray(profile, dtype=np.float64)
    frames = np.arange(1, energies.shape[0] + 1)
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.plot(frames, energies, marker="o", linewidth=1.2, markersize=3.5)
    ax.set_xlabel("frame")
    ax.set_ylabel("flow energy")
    ax.set_title(title if title is not None else "flow energy profile")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
