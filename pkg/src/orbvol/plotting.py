"""Figures written next to reports (matplotlib, Agg backend)."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from . import bounds  # noqa: E402
from .solver import OutcomeClass  # noqa: E402

_COLORS = {
    OutcomeClass.GEOMETRIC: "tab:blue",
    OutcomeClass.NONGEOMETRIC: "tab:red",
    OutcomeClass.DEGENERATE: "tab:orange",
    OutcomeClass.NOSOLUTION: "black",
}


def _style(ax):
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    ax.tick_params(direction="out", labelsize=9)


def drill_factor_figure(path: Path, marks=(0.294, 0.4157, 0.54527)) -> Path:
    rs = [0.2 + 0.8 * k / 400 for k in range(401)]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot(rs, [bounds.drill_factor(r) for r in rs], color="k", lw=1.2)
    for r in marks:
        f = bounds.drill_factor(r)
        ax.plot([r], [f], "o", color="tab:red", ms=4)
        ax.annotate(f"{f:.3f}", (r, f), textcoords="offset points", xytext=(5, 5), fontsize=8)
    ax.set_yscale("log")
    ax.set_xlabel("collar radius r")
    ax.set_ylabel("drill factor")
    _style(ax)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def search_figure(searches, path: Path) -> Path:
    """Filling volume against slope length for every searched slope."""
    fig, ax = plt.subplots(figsize=(6, 3.8))
    seen = set()
    for s in searches:
        for r in s.slopes:
            if r.volume is None:
                continue
            label = str(r.outcome) if r.outcome not in seen else None
            seen.add(r.outcome)
            ax.plot(r.length, r.volume, ".", color=_COLORS[r.outcome], ms=5, label=label)
    if searches:
        ax.axhline(searches[0].budget, color="0.5", lw=0.8, ls="--")
    ax.axvline(2 * math.pi, color="0.7", lw=0.8, ls=":")
    ax.set_xlabel("slope length on the maximal cusp")
    ax.set_ylabel("sum of D(z)")
    if seen:
        ax.legend(fontsize=8, frameon=False)
    _style(ax)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def slope_disc_figure(search, cusp, path: Path) -> Path:
    """Searched slopes as lattice vectors inside the cutoff disc."""
    fig, ax = plt.subplots(figsize=(4.2, 4.2))
    tm, tl = cusp.translations
    L = search.cutoff_length
    t = [2 * math.pi * k / 200 for k in range(201)]
    ax.plot([L * math.cos(a) for a in t], [L * math.sin(a) for a in t], color="0.5", lw=0.8)
    for r in search.slopes:
        w = r.slope.p * tm + r.slope.q * tl
        for sgn in (1, -1):
            ax.plot(sgn * w.real, sgn * w.imag, ".", color=_COLORS[r.outcome], ms=5)
    ax.set_aspect("equal")
    ax.set_title(f"{search.manifold}, gcd {search.multiplicity}, B = {search.budget}", fontsize=9)
    _style(ax)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def report_figures(report, outdir, fixtures=None) -> list[Path]:
    from .pipeline import fixture_cusp
    from .triangulation import census

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    stem = report.command.replace(" ", "_")
    paths = []
    if report.chains:
        paths.append(drill_factor_figure(outdir / f"{stem}_drill_factor.png"))
    if report.searches:
        paths.append(search_figure(report.searches, outdir / f"{stem}_volumes.png"))
        for s in report.searches:
            cusp = fixture_cusp(census(s.manifold, fixtures))
            paths.append(slope_disc_figure(
                s, cusp, outdir / f"{stem}_{s.manifold}_gcd{s.multiplicity}.png"))
    return paths
