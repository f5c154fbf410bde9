"""Matplotlib figures rendered next to the delimited reports.

Plot emission is best-effort: callers wrap these in try/except so a plotting
failure can never change the exit code of a verification run.
"""

import math

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "polya-cert"

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["plot_counting_bounds", "plot_packing", "plot_spectrum_staircase"]


def plot_counting_bounds(spectrum, reports, path):
    """Counting-function staircase against the three bound lines."""
    eigs = np.asarray(spectrum.eigenvalues)
    area = spectrum.domain_area
    lam_max = max(r.lam for r in reports) * 1.05
    lam = np.linspace(0.0, lam_max, 400)

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    counts = np.searchsorted(eigs, lam + 1e-9, side="right")
    ax.step(lam, counts, where="post", color="k", lw=1.4, label="N(λ) (computed)")
    ax.plot(lam, area * lam / (4 * math.pi), "--", color="tab:red", label="area·λ/(4π)")
    ax.plot(lam, area * lam / (8 * math.pi), ":", color="tab:green", label="area·λ/(8π)")
    convex_coeff = reports[0].convex / (reports[0].lam * area)
    ax.plot(lam, area * lam * convex_coeff, "-", color="tab:blue",
            label="area·λ/(2√3 j₀²)")
    ax.scatter([r.lam for r in reports], [r.n_N for r in reports],
               color="tab:orange", zorder=5, s=24, label="verified λ")
    ax.set_xlabel("λ")
    ax.set_ylabel("count")
    ax.set_xlim(0, lam_max)
    ax.legend(loc="upper left", fontsize=9)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_packing(polygon, packing, path):
    """Domain outline with the packed centers and their disjoint disks."""
    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    v = np.vstack((polygon.vertices, polygon.vertices[0]))
    ax.plot(v[:, 0], v[:, 1], "k-", lw=1.2)
    pts = packing.points
    if len(pts):
        ax.plot(pts[:, 0], pts[:, 1], "o", color="tab:blue", ms=3)
        for x, y in pts:
            ax.add_patch(plt.Circle((x, y), packing.r, fill=False,
                                    color="tab:blue", lw=0.6, alpha=0.7))
    ax.set_aspect("equal")
    ax.set_title(f"{len(pts)} centers, r = {packing.r:g} "
                 f"(guaranteed ≥ {packing.guaranteed_min:.4g})", fontsize=10)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_spectrum_staircase(spectrum, path):
    eigs = np.asarray(spectrum.eigenvalues)
    fig, ax = plt.subplots(figsize=(6.5, 4.0))
    ax.step(eigs, np.arange(1, len(eigs) + 1), where="post", color="k", lw=1.2)
    ax.set_xlabel("μ")
    ax.set_ylabel("count ≤ μ")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
