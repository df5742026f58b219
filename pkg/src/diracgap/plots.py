"""Figure rendering for the report-producing subcommands.

Every renderer writes a PNG next to the delimited output and degrades to a
warning if the backend is unavailable; the CSV remains the primary artifact.
"""

import warnings

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import geometry


def _save(fig, path):
    try:
        fig.savefig(path, dpi=150, bbox_inches="tight")
    except Exception as exc:  # rendering must never fail the pipeline
        warnings.warn(f"figure rendering failed for {path}: {exc}")
    finally:
        plt.close(fig)


def render_domain(domain, path, centers=None):
    theta = np.linspace(0, 2 * np.pi, 720)
    pts = geometry.boundary_point(domain, theta)
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    ax.plot(pts[:, 0], pts[:, 1], "k-", lw=1.2)
    if centers is not None:
        ax.plot(centers[:, 0], centers[:, 1], ".", ms=2.5, color="tab:blue")
    ax.plot(*domain.incenter, "r+", ms=8)
    ax.set_aspect("equal")
    ax.set_title(f"area={domain.area:.4f}  perimeter={domain.perimeter:.4f}")
    _save(fig, path)


def render_sweep(records, path):
    perim = np.array([r.perimeter for r in records])
    e1 = np.array([r.e1_dirac for r in records])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(perim, e1, ".", ms=4)
    ax.axhline(1.434695650819, color="r", lw=0.8, ls="--",
               label="disk reference")
    ax.set_xlabel("perimeter")
    ax.set_ylabel("principal eigenvalue")
    ax.legend()
    _save(fig, path)


def render_mu_curve(curves, path, labels=None):
    """curves: list of (E_array, mu_array)."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for i, (e, mu) in enumerate(curves):
        label = labels[i] if labels else None
        ax.plot(e, mu, "-o", ms=3, label=label)
    ax.axhline(0.0, color="k", lw=0.6)
    ax.set_xlabel("E")
    ax.set_ylabel("mu(E)")
    if labels:
        ax.legend()
    _save(fig, path)


def render_fields(pts, abs_u1, arg_u1, path):
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    for ax, vals, title in ((axes[0], abs_u1, "|u1|"),
                            (axes[1], arg_u1, "arg u1")):
        sc = ax.scatter(pts[:, 0], pts[:, 1], c=vals, s=6,
                        cmap="viridis" if title == "|u1|" else "twilight")
        ax.set_aspect("equal")
        ax.set_title(title)
        fig.colorbar(sc, ax=ax, shrink=0.85)
    _save(fig, path)
