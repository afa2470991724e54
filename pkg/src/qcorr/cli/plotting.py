"""SVG line plots rendered from the CSV files (the CSV is the only data source)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .runner import read_csv  # noqa: E402

SVG_HASHSALT = "qcorr"
X_LABELS = {"time": "time (ns)", "alpha": "alpha (real)", "frequency_ghz": "frequency (GHz)"}


def plot_csv(csv_path, svg_path, title: str = "") -> Path:
    """Plot every data column of ``csv_path`` against its first column."""
    header, data = read_csv(csv_path)
    with plt.rc_context({"svg.hashsalt": SVG_HASHSALT, "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        for k, name in enumerate(header[1:], start=1):
            ax.plot(data[:, 0], data[:, k], label=name, linewidth=1.2)
        ax.set_xlabel(X_LABELS.get(header[0], header[0]))
        ax.set_title(f"{title}\n(grid extents repo-chosen)", fontsize=9)
        if len(header) > 2:
            ax.legend(fontsize=8)
        ax.grid(alpha=0.3)
        fig.tight_layout()
        fig.savefig(svg_path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return Path(svg_path)
