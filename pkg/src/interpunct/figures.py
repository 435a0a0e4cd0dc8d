"""Figure rendering for the report bundle.

Every figure is an optional by-product of `report`; the delimited and JSON
outputs remain the canonical results. Rendering is deterministic: fixed
figure sizes, fixed dpi, explicit PNG metadata, inputs already sorted by
the caller.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.patches import Ellipse

from .aggregate import HazardCurve, HurstScatter, LanguageSummary, ShiftReport
from .plots import PlotSeries
from .weibull import WeibullParams

__all__ = [
    "save_params_scatter",
    "save_hazard_curves",
    "save_rescaled_plots",
    "save_hurst_scatter",
    "save_translation_shift",
]

_DPI = 150
_META = {"Software": "interpunct"}

# One stable color per language, assigned by sorted language code at call
# time so reruns and reorderings agree.
_PALETTE = plt.cm.tab10.colors


def _save(fig, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=_DPI, metadata=_META)
    plt.close(fig)


def _color_map(keys: Sequence[str]) -> dict[str, tuple]:
    ordered = sorted(set(keys))
    return {key: _PALETTE[i % len(_PALETTE)] for i, key in enumerate(ordered)}


def _draw_ellipse(ax, summary: LanguageSummary, color) -> None:
    angle = np.degrees(np.arctan2(summary.axes[1, 0], summary.axes[0, 0]))
    ax.add_patch(
        Ellipse(
            xy=(summary.mean_p, summary.mean_beta),
            width=2 * summary.semi_major,
            height=2 * summary.semi_minor,
            angle=angle,
            fill=False,
            color=color,
            lw=1.2,
        )
    )


def save_params_scatter(
    points: Mapping[str, np.ndarray],
    summaries: Sequence[LanguageSummary],
    isolines: Mapping[str, Sequence[WeibullParams]],
    path,
) -> None:
    """(p, beta) scatter per language with principal-axis ellipses and
    constant-expected-value isolines through each centroid."""
    colors = _color_map(list(points))
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for code in sorted(points):
        pts = points[code]
        ax.scatter(pts[:, 0], pts[:, 1], s=14, color=colors[code], label=code, alpha=0.75)
    for summary in summaries:
        color = colors.get(summary.language_code, "black")
        ax.plot([summary.mean_p], [summary.mean_beta], "+", color=color, ms=10, mew=1.8)
        _draw_ellipse(ax, summary, color)
    for code in sorted(isolines):
        params = isolines[code]
        ax.plot(
            [q.p for q in params],
            [q.beta for q in params],
            "--",
            color=colors.get(code, "gray"),
            lw=0.9,
            alpha=0.8,
        )
    ax.set_xlabel("p")
    ax.set_ylabel("beta")
    ax.legend(fontsize=8)
    _save(fig, Path(path))


def save_hazard_curves(
    parametric: Mapping[str, HazardCurve],
    empirical: Mapping[str, HazardCurve],
    reliability: Mapping[str, float],
    path,
) -> None:
    """Model hazard at averaged parameters vs averaged empirical hazard,
    with each language's reliability bound marked."""
    colors = _color_map(list(parametric) + list(empirical))
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for code in sorted(parametric):
        curve = parametric[code]
        k = np.arange(1, curve.k_max + 1)
        ax.plot(k, curve.values, "-", color=colors[code], label=f"{code} model", lw=1.4)
    for code in sorted(empirical):
        curve = empirical[code]
        k = np.arange(1, curve.k_max + 1)
        ax.plot(k, curve.values, "o", color=colors[code], ms=3.5,
                label=f"{code} empirical", alpha=0.8)
    for code in sorted(reliability):
        ax.axvline(reliability[code], color=colors.get(code, "gray"), ls=":", lw=0.9)
    ax.set_xlabel("k")
    ax.set_ylabel("h(k)")
    ax.legend(fontsize=7)
    _save(fig, Path(path))


def save_rescaled_plots(plots: Mapping[str, PlotSeries], path) -> None:
    """Rescaled probability plots overlaid on the unit diagonal."""
    fig, ax = plt.subplots(figsize=(4.8, 4.8))
    ax.plot([0, 1], [0, 1], "-", color="black", lw=1.0)
    for label in sorted(plots):
        pts = plots[label].points
        ax.plot(pts[:, 0], pts[:, 1], ".", ms=2.5, alpha=0.6, label=label)
    ax.set_xlabel("rescaled log k")
    ax.set_ylabel("rescaled log(-log(1 - F))")
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    if len(plots) <= 12:
        ax.legend(fontsize=6)
    _save(fig, Path(path))


def save_hurst_scatter(scatter: HurstScatter, path) -> None:
    """Paired Hurst exponents with their least-squares trend."""
    fig, ax = plt.subplots(figsize=(4.8, 4.8))
    ax.scatter(scatter.points[:, 0], scatter.points[:, 1], s=16, alpha=0.8)
    xs = np.array([scatter.points[:, 0].min(), scatter.points[:, 0].max()])
    ax.plot(xs, scatter.intercept + scatter.slope * xs, "-", color="black", lw=1.1)
    ax.set_xlabel("H (sentence stops)")
    ax.set_ylabel("H (all marks)")
    _save(fig, Path(path))


def save_translation_shift(
    arrows: Mapping[str, Sequence[tuple[float, float, float, float]]],
    summaries: Mapping[str, LanguageSummary],
    path,
) -> None:
    """Arrows from original to translated (p, beta) points, with the target
    language's ellipse for reference. ``arrows`` rows are (p0, b0, p1, b1)."""
    colors = _color_map(list(arrows))
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for code in sorted(arrows):
        color = colors[code]
        for p0, b0, p1, b1 in arrows[code]:
            ax.annotate(
                "",
                xy=(p1, b1),
                xytext=(p0, b0),
                arrowprops=dict(arrowstyle="->", color=color, lw=1.0),
            )
            ax.plot([p0], [b0], "o", color=color, ms=3)
        if code in summaries:
            _draw_ellipse(ax, summaries[code], color)
            ax.plot(
                [summaries[code].mean_p], [summaries[code].mean_beta],
                "+", color=color, ms=9, mew=1.6,
            )
    ax.set_xlabel("p")
    ax.set_ylabel("beta")
    _save(fig, Path(path))
