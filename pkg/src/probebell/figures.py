"""Matplotlib renderings of the report outputs (Agg only, deterministic)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["fig_generate", "fig_readout", "fig_certify", "fig_oracle"]

_SAVE_OPTS = {"dpi": 120, "metadata": {"Software": None}}


def fig_generate(result, path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(result.times, result.q_exact, color="C0", lw=1.2, label="exact exchange")
    ax.plot(result.times, result.q_eff, color="C1", lw=1.0, ls="--", label="dispersive model")
    ax.plot(result.times, result.q_oat, color="C2", lw=1.0, ls=":", label="ideal twisting")
    ax.axhline(0.0, color="0.6", lw=0.8)
    ax.set_xlabel(r"twisting phase $\chi t$")
    ax.set_ylabel(r"$Q = \log_2 E + \mu$")
    ax.set_title(rf"$\mu = {result.mu}$, $g/\Delta = {result.params.dispersive_ratio:.3g}$")
    ax.legend(loc="lower right", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def fig_readout(grid, freqs, magnitudes, path) -> None:
    fig, (ax, ax2) = plt.subplots(
        1, 2, figsize=(8.4, 3.8), gridspec_kw={"width_ratios": [2.0, 1.0]}
    )
    mesh = ax.pcolormesh(
        grid.thetas, grid.labels, grid.p, shading="nearest", cmap="viridis"
    )
    fig.colorbar(mesh, ax=ax, label=r"$p_n(\theta)$")
    ax.set_xlabel(r"$\theta$")
    ax.set_ylabel(r"$n$")
    ax.set_title(f"populations, N = {grid.n_qubits} ({grid.provenance})")
    ax2.semilogy(freqs, np.maximum(magnitudes, 1e-18), lw=0.9, color="C0")
    ax2.set_xlabel(r"harmonic of $\theta$")
    ax2.set_ylabel(r"$|\mathcal{F}[p_{n=N/2}]|$")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def fig_certify(grid, xi2, fisher, theta_star, path) -> None:
    fig, (ax, ax2) = plt.subplots(2, 1, figsize=(6.4, 5.4), sharex=True)
    finite = np.isfinite(xi2)
    shown = np.where(finite, xi2, np.nan)
    ax.semilogy(grid.thetas, shown, lw=0.9, color="C0")
    ax.axhline(1.0, color="0.6", lw=0.8)
    ax.set_ylabel(r"$\xi^2$")
    ax2.plot(grid.thetas, fisher, lw=0.9, color="C1")
    ax2.axhline(grid.n_qubits, color="0.6", lw=0.8, label=r"$I = N$")
    ax2.set_xlabel(r"$\theta$")
    ax2.set_ylabel(r"$I(\theta)$")
    for a in (ax, ax2):
        a.axvline(theta_star, color="C3", lw=0.8, ls="--")
    ax2.legend(loc="upper right", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def fig_oracle(records, path) -> None:
    fig, ax = plt.subplots(figsize=(6.8, 3.8))
    names = [r["check"] for r in records]
    devs = [max(r["max_deviation"], 1e-18) for r in records]
    tols = [r["tolerance"] for r in records]
    x = np.arange(len(names))
    ax.bar(x, np.log10(devs), color="C0", width=0.6, label="measured")
    ax.plot(x, np.log10(tols), "r_", markersize=18, label="tolerance")
    ax.set_xticks(x)
    ax.set_xticklabels(names, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel(r"$\log_{10}$ deviation")
    ax.legend(fontsize=9)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
