"""Matplotlib renderings of plane structures and benchmark timings."""

from __future__ import annotations

import itertools

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .bipartition import PlaneStructure  # noqa: E402


def _family_colors(labels, families):
    fams = sorted({families.get(lab, lab) for lab in labels})
    cmap = plt.get_cmap("tab20", max(len(fams), 1))
    return {f: cmap(i) for i, f in enumerate(fams)}


def plot_plane(ps: PlaneStructure, path, families=None, title=None):
    """Grid of ``rows x (n1*n2)`` slots, each occupied slot tagged by its label."""
    families = families or {}
    n1, n2 = ps.cols
    columns = list(itertools.product(range(n1), range(n2)))
    colors = _family_colors(set(ps.grid.values()), families)
    width = max(4.0, 0.45 * len(columns))
    fig, ax = plt.subplots(figsize=(width, 0.5 * ps.rows + 1.2))
    img = np.ones((ps.rows, len(columns), 4))
    for (r, c), lab in ps.grid.items():
        x = columns.index(c)
        img[ps.rows - 1 - r, x] = colors[families.get(lab, lab)]
        short = lab[3:] if lab.startswith("phi") else lab
        ax.text(x, ps.rows - 1 - r, short, ha="center", va="center", fontsize=7)
    ax.imshow(img, aspect="equal", interpolation="nearest")
    ax.set_xticks(range(len(columns)))
    ax.set_xticklabels([f"{a}{b}" for a, b in columns], fontsize=7)
    ax.set_yticks(range(ps.rows))
    ax.set_yticklabels([str(ps.rows - 1 - r) for r in range(ps.rows)], fontsize=7)
    ax.set_xticks(np.arange(-0.5, len(columns)), minor=True)
    ax.set_yticks(np.arange(-0.5, ps.rows), minor=True)
    ax.grid(which="minor", color="0.6", linewidth=0.5)
    ax.tick_params(which="minor", length=0)
    ax.set_xlabel("joint index")
    ax.set_ylabel("single-party index")
    ax.set_title(title or f"{ps.bipartition.tag} plane structure ({ps.rows} x {len(columns)})", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_bench(rows: list[dict], path):
    """Elapsed time against d, one line per (mode, cut)."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    keys = sorted({(r["mode"], r["bipartition"]) for r in rows})
    for mode, cut in keys:
        pts = sorted((r["d"], r["elapsed_ms"]) for r in rows if r["mode"] == mode and r["bipartition"] == cut)
        xs, ys = zip(*pts)
        ax.plot(xs, ys, marker="o", label=f"{mode} {cut}")
    ax.set_yscale("log")
    ax.set_xlabel("d")
    ax.set_ylabel("elapsed [ms]")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
