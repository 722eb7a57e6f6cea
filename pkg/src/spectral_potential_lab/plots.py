"""Rendered-figure companions to the CSV outputs.

Each report command emits a gnuplot script referencing its CSVs; these
helpers additionally render the same views to PNG with matplotlib so a run
directory is self-contained without further tooling.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def plot_profile(path: Path, coords: np.ndarray, series: dict[str, np.ndarray],
                 xlabel: str, title: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, values in series.items():
        ax.plot(coords, values, label=label)
    ax.set_xlabel(xlabel)
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_omega(path: Path, ks: np.ndarray, omegas: np.ndarray, limit: float) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ks, omegas, "o-", ms=3, label="omega_k")
    ax.axhline(limit, color="k", ls="--", lw=1, label="-u*'(r*)")
    ax.set_xlabel("k")
    ax.set_ylabel("omega_k")
    ax.set_title("boundary coercivity sequence")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_ratio_scatter(path: Path, deltas: np.ndarray, ratios: np.ndarray,
                       families: list[str]) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for fam in sorted(set(families)):
        sel = np.array([f == fam for f in families])
        ax.scatter(deltas[sel], ratios[sel], s=12, label=fam)
    ax.set_xlabel("||V - V*||_1")
    ax.set_ylabel("(lambda(V) - lambda(V*)) / ||V - V*||_1^2")
    ax.set_yscale("log")
    ax.set_title("deficit ratios by family")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_hessian(path: Path, rows: list[dict]) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    specs = sorted({r["g"] for r in rows})
    for spec in specs:
        ts = np.array([r["t"] for r in rows if r["g"] == spec])
        fd2 = np.array([r["fd2"] for r in rows if r["g"] == spec])
        ref = [r["fourier_form"] for r in rows if r["g"] == spec][0]
        line, = ax.plot(ts, fd2, "o-", ms=4, label=f"FD2 {spec}")
        ax.axhline(ref, color=line.get_color(), ls="--", lw=1)
    ax.set_xlabel("step t")
    ax.set_ylabel("second derivative of L")
    ax.set_title("FD Hessian vs Fourier quadratic form (dashed)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
