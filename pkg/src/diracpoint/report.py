"""Figure rendering for scenario reports.

All plots are conveniences written next to the CSV output; no assertion
reads them back.  Rendering is headless (Agg) and file-format follows the
requested suffix (.svg by default).
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .diagnostics import SpectrumReport, WindowMetrics  # noqa: E402
from .evolution import TraceSeries  # noqa: E402
from .model import SpinorField  # noqa: E402


def save_spectrum_plot(path, reports: Sequence[SpectrumReport],
                       marks: Sequence[float] = ()) -> None:
    fig, axes = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    for j, ax in enumerate(axes):
        for rep in reports:
            ax.semilogy(rep.omega, rep.power[j] + 1e-300,
                        label=f"[{rep.t0:.0f}, {rep.t1:.0f}]")
        m = reports[0].m
        for edge in (-m, m):
            ax.axvline(edge, color="k", ls=":", lw=0.8)
        for w in marks:
            ax.axvline(w, color="r", ls="--", lw=0.8)
        ax.set_ylabel(f"power, comp. {j + 1}")
        ax.set_xlim(-4 * m, 4 * m)
    axes[1].set_xlabel("omega")
    axes[0].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_metric_trends(path, metrics: Sequence[WindowMetrics]) -> None:
    t_end = [w.t1 for w in metrics]
    fig, axes = plt.subplots(3, 1, figsize=(7, 7), sharex=True)
    for j in range(2):
        axes[0].plot(t_end, [w.gap_mass[j] for w in metrics], "o-",
                     label=f"comp. {j + 1}")
        axes[1].semilogy(t_end, [max(w.flatness[j], 1e-16) for w in metrics],
                         "o-", label=f"comp. {j + 1}")
    axes[2].semilogy(t_end, [max(w.fit.residual, 1e-16) for w in metrics], "o-")
    axes[0].set_ylabel("gap mass")
    axes[1].set_ylabel("modulus flatness")
    axes[2].set_ylabel("fit residual (H1 local)")
    axes[2].set_xlabel("window end time")
    for ax in axes[:2]:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_trace_plot(path, trace: TraceSeries) -> None:
    fig, axes = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    for j in range(2):
        axes[0].plot(trace.times, abs(trace.y[:, j]), lw=0.7,
                     label=f"|y_{j + 1}|")
    axes[0].set_ylabel("|psi(0, t)|")
    axes[0].legend(fontsize=8)
    drift = abs(trace.energy - trace.energy[0])
    axes[1].semilogy(trace.times, drift + 1e-18, lw=0.7)
    axes[1].set_ylabel("|H(t) - H(0)|")
    axes[1].set_xlabel("t")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_snapshot_plot(path, fields: dict[str, SpinorField]) -> None:
    fig, axes = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    for label, f in fields.items():
        for j in range(2):
            axes[j].plot(f.grid.x, abs(f.values[j]), lw=0.8, label=label)
    for j in range(2):
        axes[j].set_ylabel(f"|psi_{j + 1}(x)|")
        axes[j].legend(fontsize=8)
    axes[1].set_xlabel("x")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_branch_plot(path, records, m: float) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    for j, color in ((1, "C0"), (2, "C1")):
        pts = [(r.omega, r.C) for r in records if r.j == j and r.C > 0]
        if pts:
            ax.plot([q[0] for q in pts], [q[1] for q in pts], ".",
                    color=color, ms=3, label=f"comp. {j}")
    ax.axvline(-m, color="k", ls=":", lw=0.8)
    ax.axvline(m, color="k", ls=":", lw=0.8)
    ax.set_xlabel("omega")
    ax.set_ylabel("amplitude C")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_convergence_plot(path, dts: Sequence[float],
                          errors: Sequence[float]) -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(dts, errors, "o-", label="measured")
    ref = [errors[0] * (dt / dts[0]) ** 2 for dt in dts]
    ax.loglog(dts, ref, "k--", lw=0.8, label="order 2")
    ax.set_xlabel("dt")
    ax.set_ylabel("successive L2 difference")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
