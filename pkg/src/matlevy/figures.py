"""Matplotlib renderings saved alongside the delimited outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .spectral import MarchenkoPastur, target_pdf


def _finish(fig, out_path: Path) -> None:
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_spectrum(eigenvalues: np.ndarray, target, out_path) -> None:
    """Eigenvalue histogram with the target density overlaid."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.hist(eigenvalues, bins=60, density=True, color="#4878a8",
            alpha=0.75, label="empirical spectrum")
    if target is not None:
        lo, hi = float(np.min(eigenvalues)), float(np.max(eigenvalues))
        xs = np.linspace(lo, hi, 400)
        ax.plot(xs, [target_pdf(target, float(x)) for x in xs], "k-",
                lw=1.6, label=type(target).__name__)
        if isinstance(target, MarchenkoPastur) and target.atom > 0:
            ax.axvline(0.0, color="k", ls=":", lw=1.0,
                       label=f"atom {target.atom:.2f} at 0")
    ax.set_xlabel("eigenvalue")
    ax.set_ylabel("density")
    ax.legend(frameon=False)
    _finish(fig, out_path)


def render_verify(aggregates: dict, out_path) -> None:
    """Log-scale bars of the worst discrepancy per identity."""
    labels = ["quadratic", "difference", "pair"]
    values = [max(aggregates[f"{key}_max"], 1e-18) for key in labels]
    fig, ax = plt.subplots(figsize=(5.2, 3.8))
    ax.bar(labels, values, color="#4878a8")
    ax.axhline(1e-10, color="crimson", ls="--", lw=1.2, label="tolerance 1e-10")
    ax.set_yscale("log")
    ax.set_ylabel("max Frobenius discrepancy")
    ax.legend(frameon=False)
    _finish(fig, out_path)


def render_approx(levels: list, out_path) -> None:
    """Mean KS statistic against the discretization level."""
    ns = [level["n"] for level in levels]
    means = [level["ks_mean"] for level in levels]
    ses = [level["ks_se"] or 0.0 for level in levels]
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    if any(m is not None for m in means):
        ax.errorbar(ns, means, yerr=ses, fmt="o-", color="#4878a8", capsize=3)
    ax.set_xscale("log")
    ax.set_xlabel("discretization level n")
    ax.set_ylabel("mean KS distance to target")
    _finish(fig, out_path)


def render_exponent(z_scores: list, out_path) -> None:
    """Per-theta z-scores of empirical CF minus analytic exponent."""
    fig, ax = plt.subplots(figsize=(5.2, 3.8))
    ax.bar(range(len(z_scores)), z_scores, color="#4878a8")
    ax.axhline(3.0, color="crimson", ls="--", lw=1.2, label="3 SE")
    ax.set_xlabel("theta index")
    ax.set_ylabel("|empirical - analytic| / SE")
    ax.legend(frameon=False)
    _finish(fig, out_path)
