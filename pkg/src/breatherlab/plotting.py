"""Static SVG figures of spectra, fields and growth curves.

Output is byte-reproducible: matplotlib's SVG element ids are salted with a
fixed string and the date metadata is dropped.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

HASH_SALT = "breatherlab"

STYLE = {
    "svg.hashsalt": HASH_SALT,
    "svg.fonttype": "none",
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "lines.linewidth": 1.2,
}


def save_svg(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(STYLE):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def _axes(ax, title: str, extent: float):
    ax.axhline(0.0, color="0.7", lw=0.6, zorder=0)
    ax.axvline(0.0, color="0.7", lw=0.6, zorder=0)
    ax.set_xlabel(r"Re $\lambda$")
    ax.set_ylabel(r"Im $\lambda$")
    ax.set_xlim(-extent, extent)
    ax.set_ylim(-extent, extent)
    ax.set_aspect("equal")
    ax.set_title(title)


def _continuum(ax):
    """The set iR u [-1, 1]."""
    ax.plot([-1.0, 1.0], [0.0, 0.0], color="tab:blue", lw=2.5, zorder=1)
    ax.axvline(0.0, color="tab:blue", lw=2.5, zorder=1)


def background_figure(periodic: np.ndarray, antiperiodic: np.ndarray, path,
                      extent: float = 2.0) -> Path:
    """Continuous spectrum on the line next to the periodic/antiperiodic point spectra."""
    with plt.rc_context(STYLE):
        fig, (left, right) = plt.subplots(1, 2, figsize=(7.0, 3.4))
        _continuum(left)
        _axes(left, "line", extent)
        right.plot(periodic.real, periodic.imag, "o", ms=4, color="tab:blue", label="periodic")
        right.plot(antiperiodic.real, antiperiodic.imag, "s", ms=4, mfc="none",
                   color="tab:green", label="antiperiodic")
        _axes(right, "periodic and antiperiodic", extent)
        right.legend(loc="upper right", frameon=False)
        fig.tight_layout()
    return save_svg(fig, path)


def ab_figure(periodic: np.ndarray, antiperiodic: np.ndarray, lambda0: float, path,
              extent: float = 2.5) -> Path:
    """Union of the periodic and antiperiodic AB spectra with +-lambda0 marked."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.6, 4.2))
        ax.plot([lambda0, -lambda0], [0.0, 0.0], "o", ms=9, color="tab:red",
                label=r"$\pm\lambda_0$")
        ax.plot(periodic.real, periodic.imag, "o", ms=4, color="tab:blue", label="periodic")
        ax.plot(antiperiodic.real, antiperiodic.imag, "s", ms=5, mfc="none",
                color="tab:green", label="antiperiodic")
        _axes(ax, rf"AB, $\lambda_0 = {lambda0:g}$", extent)
        ax.legend(loc="upper right", frameon=False)
        fig.tight_layout()
    return save_svg(fig, path)


def line_figure(eigenvalues: np.ndarray, labels: Optional[Sequence[str]], path,
                title: str = "", extent: float = 2.0,
                marked: Sequence[complex] = ()) -> Path:
    """Band samples as small dots, stationary eigenvalues as large red dots."""
    lab = np.asarray(labels if labels is not None else ["band"] * eigenvalues.size)
    band = eigenvalues[lab == "band"]
    point = eigenvalues[lab == "point"]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.6, 4.2))
        _continuum(ax)
        ax.plot(band.real, band.imag, ".", ms=2, color="0.35", label="band samples")
        ax.plot(point.real, point.imag, "o", ms=7, color="tab:red", label="stationary")
        for z in marked:
            ax.plot(z.real, z.imag, "x", ms=8, color="k")
        _axes(ax, title, extent)
        ax.legend(loc="upper right", frameon=False)
        fig.tight_layout()
    return save_svg(fig, path)


def field_figure(x: np.ndarray, t: np.ndarray, values: np.ndarray, path, title: str = "") -> Path:
    """Heat map of |u(x, t)| with ``values`` of shape (nt, nx)."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 3.6))
        mesh = ax.pcolormesh(x, t, np.abs(values), shading="auto", cmap="viridis",
                             rasterized=False)
        fig.colorbar(mesh, ax=ax, label="|u|")
        ax.set_xlabel("x")
        ax.set_ylabel("t")
        ax.set_title(title)
        fig.tight_layout()
    return save_svg(fig, path)


def growth_figure(t: np.ndarray, amplitude: np.ndarray, rate: float, window, path,
                  title: str = "") -> Path:
    """Semilog amplitude history with the fitted exponential over the window."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.8, 3.4))
        ax.semilogy(t, amplitude, ".-", ms=3, color="tab:blue", label="modal amplitude")
        sel = (t >= window[0]) & (t <= window[1])
        if sel.any():
            t0 = t[sel][0]
            a0 = amplitude[sel][0]
            tt = np.linspace(window[0], window[1], 50)
            ax.semilogy(tt, a0 * np.exp(rate * (tt - t0)), "--", color="tab:red",
                        label=f"rate {rate:.4f}")
        ax.set_xlabel("t")
        ax.set_ylabel("amplitude")
        ax.set_title(title)
        ax.legend(frameon=False)
        fig.tight_layout()
    return save_svg(fig, path)


def diagnostics_figure(rows: np.ndarray, path, title: str = "") -> Path:
    """Relative mass and energy drift from rows (t, mass, energy, max_amp)."""
    rows = np.asarray(rows, dtype=float)
    t, m, e = rows[:, 0], rows[:, 1], rows[:, 2]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.8, 3.4))
        ax.plot(t, (m - m[0]) / abs(m[0]), label="mass")
        ax.plot(t, (e - e[0]) / max(abs(e[0]), 1e-300), label="energy")
        ax.set_xlabel("t")
        ax.set_ylabel("relative drift")
        ax.set_title(title)
        ax.legend(frameon=False)
        fig.tight_layout()
    return save_svg(fig, path)
