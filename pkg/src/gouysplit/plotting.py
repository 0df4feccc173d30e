"""Figures for scenario outputs, written next to the CSV files.

Only the ``Agg`` backend is used, so nothing needs a display.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# metadata left out so repeated runs give identical files
_SAVE_KW = dict(dpi=120, metadata={"Software": None})


def _figure(width=6.0, height=None):
    golden = (np.sqrt(5) - 1.0) / 2.0
    fig, ax = plt.subplots(figsize=(width, height or width * golden))
    return fig, ax


def _as_image(output):
    """Reshape a long-format table to ``(a0, a1, values)`` or ``None``."""
    if len(output.columns) != 3:
        return None
    a0 = np.unique(output.data[:, 0])
    a1 = np.unique(output.data[:, 1])
    if a0.size * a1.size != output.data.shape[0] or a0.size < 2 or a1.size < 2:
        return None
    values = output.data[:, 2].reshape(a0.size, a1.size)
    return a0, a1, values


def _x_pairs(columns):
    """``[(x_column, y_column), ...]`` for tables holding several own-axis curves."""
    pairs = []
    for i, c in enumerate(columns):
        if c.startswith("x_") and i + 1 < len(columns):
            pairs.append((i, i + 1))
    return pairs


def render(output, path):
    title = output.name.replace("_", " ")
    image = _as_image(output)
    fig, ax = _figure()
    if image is not None:
        a0, a1, values = image
        mesh = ax.pcolormesh(a1, a0 * 1e3, values, shading="auto", cmap="inferno")
        fig.colorbar(mesh, ax=ax, label=output.columns[2])
        ax.set_xlabel(output.columns[1])
        ax.set_ylabel(f"{output.columns[0]} [mm]")
    else:
        pairs = _x_pairs(output.columns)
        if pairs:
            for ix, iy in pairs:
                y = output.data[:, iy]
                ax.plot(output.data[:, ix] * 1e3, y / y.max(), label=output.columns[iy])
            ax.set_xlabel("position [mm]")
            ax.set_ylabel("normalized")
        else:
            x = output.data[:, 0]
            scale = 1e3 if output.columns[0] == "x" else 1.0
            for i, name in enumerate(output.columns[1:], start=1):
                ax.plot(x * scale, output.data[:, i], label=name)
            ax.set_xlabel(output.columns[0] + (" [mm]" if scale != 1.0 else ""))
        ax.legend(fontsize=7)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def render_outputs(outputs, out_dir) -> list:
    """One PNG per multi-row table; single-row summaries are skipped."""
    paths = []
    for o in outputs:
        if o.data.shape[0] < 2:
            continue
        paths.append(render(o, os.path.join(out_dir, f"{o.name}.png")))
    return paths
