"""Probability-plot coordinates for interval series.

On axes x = log k, y = log(-log(1 - F(k))) a discrete Weibull CDF is the
straight line y = a + b x with slope b = beta and intercept
a = log(-log(1 - p)). Plotting the empirical CDF of a series in these
coordinates therefore turns goodness of fit into straightness, and an
affine rescaling maps the fitted reference line onto the unit diagonal so
that curves from different texts can be overlaid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .weibull import WeibullParams

__all__ = ["PlotSeries", "PlotSupportError", "weibull_plot", "rescale_plot", "plot_to_csv"]


class PlotSupportError(ValueError):
    """No plottable points remain after dropping the saturated top."""


@dataclass(frozen=True)
class PlotSeries:
    """Empirical points plus the straight reference line in plot coordinates.

    ``points`` has one row per distinct interval length, x strictly
    increasing. ``intercept``/``slope`` describe the reference line
    y = intercept + slope * x. After rescaling, ``source_box`` records the
    rectangle (x_min, x_max, y_min, y_max) that was mapped to the unit
    square; it is None for raw plots.
    """

    points: np.ndarray
    intercept: float
    slope: float
    source_box: tuple[float, float, float, float] | None = None

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != 2:
            raise ValueError("points must be an (n, 2) array")
        if points.shape[0] == 0:
            raise PlotSupportError("a plot needs at least one point")
        if np.any(np.diff(points[:, 0]) <= 0):
            raise ValueError("x coordinates must be strictly increasing")
        object.__setattr__(self, "points", points)

    def reference_y(self, x) -> np.ndarray:
        return self.intercept + self.slope * np.asarray(x, dtype=np.float64)


def weibull_plot(series, params: WeibullParams) -> PlotSeries:
    """Empirical CDF of ``series`` in plot coordinates with the reference
    line of ``params``.

    The top of the CDF (F = 1) has no finite y and is dropped.
    """
    values = np.asarray(getattr(series, "values", series), dtype=np.int64)
    if values.ndim != 1 or values.size == 0:
        raise PlotSupportError("need a non-empty one-dimensional series")
    uniq, counts = np.unique(values, return_counts=True)
    f_emp = np.cumsum(counts) / values.size
    keep = f_emp < 1.0
    if not np.any(keep):
        raise PlotSupportError(
            "all empirical mass sits on one value; nothing to plot below F = 1"
        )
    x = np.log(uniq[keep].astype(np.float64))
    y = np.log(-np.log1p(-f_emp[keep]))
    intercept = math.log(-math.log1p(-params.p))
    return PlotSeries(
        points=np.column_stack([x, y]),
        intercept=intercept,
        slope=params.beta,
    )


def rescale_plot(plot: PlotSeries) -> PlotSeries:
    """Affinely map ``plot`` so its reference line becomes the unit diagonal.

    The bounding box is widened just enough that the reference line enters
    at the lower-left corner and leaves at the upper-right one:

        x_lo = min(min x, (min y - a) / b)      x_hi = max(max x, (max y - a) / b)
        y_lo = min(min y, a + b * min x)        y_hi = max(max y, a + b * max x)

    Both axes are then squashed to [0, 1]. For b > 0 the line y = a + b x
    passes through (x_lo, y_lo) and (x_hi, y_hi), so it maps onto the
    segment from (0, 0) to (1, 1). Requires a positive slope and at least
    two points so the box has nonzero area.
    """
    if plot.points.shape[0] < 2:
        raise PlotSupportError("rescaling needs at least two points")
    if not (plot.slope > 0.0):
        raise ValueError(f"rescaling requires a positive slope, got {plot.slope}")
    a, b = plot.intercept, plot.slope
    x, y = plot.points[:, 0], plot.points[:, 1]
    x_lo = min(x.min(), (y.min() - a) / b)
    x_hi = max(x.max(), (y.max() - a) / b)
    y_lo = min(y.min(), a + b * x.min())
    y_hi = max(y.max(), a + b * x.max())
    if not (x_hi > x_lo) or not (y_hi > y_lo):
        raise ValueError("degenerate bounding box; points span no area")
    new_x = (x - x_lo) / (x_hi - x_lo)
    new_y = (y - y_lo) / (y_hi - y_lo)
    return PlotSeries(
        points=np.column_stack([new_x, new_y]),
        intercept=0.0,
        slope=1.0,
        source_box=(float(x_lo), float(x_hi), float(y_lo), float(y_hi)),
    )


def plot_to_csv(plot: PlotSeries) -> str:
    """Serialize points to two-column CSV with the line and box in comments."""
    lines = [f"# intercept={plot.intercept!r} slope={plot.slope!r}"]
    if plot.source_box is not None:
        box = " ".join(repr(v) for v in plot.source_box)
        lines.append(f"# source_box={box}")
    lines.append("x,y")
    for px, py in plot.points:
        lines.append(f"{float(px)!r},{float(py)!r}")
    return "\n".join(lines) + "\n"
