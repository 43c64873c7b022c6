"""Figure rendering for the report paths: switching-function plots and
per-horizon spectral-radius curves, written to image files next to the
delimited output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .first_order import SwitchingFunctionSamples


def switching_function_figure(samples: SwitchingFunctionSamples, path,
                              switch_times=()) -> None:
    """Plot m(t) with its zero line and the declared switch times."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(samples.times, samples.values, lw=1.2)
    ax.axhline(0.0, color="0.5", lw=0.8)
    for t in switch_times:
        ax.axvline(t, color="0.7", lw=0.8, ls="--")
    ax.set_xlabel("t")
    ax.set_ylabel("m(t)")
    ax.set_title("switching function")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def rho_curve_figure(curve, path) -> None:
    """Plot the estimated per-time spectral radius rho_t^(1/t) against the
    instability threshold 1."""
    curve = np.asarray(curve, dtype=float)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(curve[:, 0], curve[:, 1], "o-", lw=1.2)
    ax.axhline(1.0, color="0.4", lw=0.8, ls="--", label="instability threshold")
    ax.set_xlabel("horizon t")
    ax.set_ylabel(r"$\rho_t^{1/t}$ (grid lower bound)")
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
