"""Figure rendering for the CLI report path.

Each report command drops a PNG next to its delimited output: distribution
curves on the shifted axis (m - mean)/N + 1, sweep panels for moments and
their field derivatives, and the even/odd splitting zoom.  The delimited
files stay the primary interface; figures are a convenience view of the
same numbers.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

_MARKERS = ("s", "o", "^", "v", "D", "P", "X", "*")
_DPI = 150


def _style(i: int) -> dict:
    return {"marker": _MARKERS[i % len(_MARKERS)], "markersize": 3.5,
            "linewidth": 1.0, "markevery": max(1, 1)}


def save_distribution_figure(path: Path, curves: list[dict]) -> None:
    """curves: dicts with keys label, x, p."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for i, curve in enumerate(curves):
        ax.plot(curve["x"], curve["p"], label=curve["label"], **_style(i))
    ax.set_xlabel(r"$(m - \bar m)/N + 1$")
    ax.set_ylabel(r"$p(m)$")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_sweep_figure(path: Path, groups: dict) -> None:
    """groups: {(gamma, kappa): list of SweepRecord} sharing one g grid each."""
    fig, (ax_m, ax_d) = plt.subplots(2, 1, figsize=(6.0, 7.0), sharex=True)
    for i, ((gamma, kappa), records) in enumerate(sorted(groups.items())):
        g = [r.params.g for r in records]
        tag = rf"$\gamma$={gamma:g}, $\kappa$={kappa:g}"
        ax_m.plot(g, [r.mean_per_site for r in records],
                  label=rf"$\bar m/N$ ({tag})", **_style(2 * i))
        ax_m.plot(g, [r.var_per_site for r in records],
                  label=rf"var$/N$ ({tag})", **_style(2 * i + 1))
        ax_d.plot(g, [r.d_mean_dg for r in records],
                  label=rf"$d\bar m/dg$ ({tag})", **_style(2 * i))
        ax_d.plot(g, [r.d_var_dg for r in records],
                  label=rf"$d\,$var$/dg$ ({tag})", **_style(2 * i + 1))
    ax_m.set_ylabel("per-site moments")
    ax_d.set_ylabel("per-site derivatives")
    ax_d.set_xlabel(r"$g = h/J$")
    for ax in (ax_m, ax_d):
        ax.legend(fontsize=7)
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_splitting_figure(path: Path, entries: list[dict]) -> None:
    """entries: dicts with keys label, m, p, mean, sigma; zoomed to the bulk."""
    fig, axes = plt.subplots(1, len(entries), figsize=(4.0 * len(entries), 3.6),
                             squeeze=False)
    for ax, entry in zip(axes[0], entries):
        m, p = entry["m"], entry["p"]
        lo = max(0, int(entry["mean"] - 6 * entry["sigma"]))
        hi = min(len(p), int(entry["mean"] + 6 * entry["sigma"]) + 2)
        ax.plot(m[lo:hi], p[lo:hi], marker=".", markersize=2.5, linewidth=0.7)
        ax.set_title(entry["label"], fontsize=9)
        ax.set_xlabel(r"$m$")
        ax.set_ylabel(r"$p(m)$")
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
