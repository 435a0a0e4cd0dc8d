"""Detrended fluctuation analysis of interval series.

The series is integrated into a profile, the profile is cut into
non-overlapping windows of length s (walking from the start and again from
the end, so 2 * floor(N/s) windows in total), a least-squares polynomial is
removed from each window, and the fluctuation function

    F(s) = sqrt( mean over windows of mean squared residual )

is read off on a log-spaced grid of scales. A straight log-log plot with
slope H indicates scale-free correlations: H = 0.5 for shuffled data,
H > 0.5 for persistence. Some series instead show two regimes separated by
a crossover scale, which is detected by comparing a single straight line
against a continuous two-segment fit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "FluctuationCurve",
    "SingleScaling",
    "DoubleScaling",
    "DfaResult",
    "SeriesTooShortError",
    "NonPositiveFluctuationError",
    "default_scales",
    "compute_fluctuation",
    "loglog_slope",
    "fit_scaling",
    "dfa",
]


class SeriesTooShortError(ValueError):
    """Series shorter than 5 times the smallest scale."""

    def __init__(self, n: int, minimum: int):
        self.n = n
        self.minimum = minimum
        super().__init__(f"series of length {n} is shorter than the minimum {minimum}")


class NonPositiveFluctuationError(ValueError):
    """log F(s) undefined because some F(s) is zero."""


@dataclass(frozen=True)
class FluctuationCurve:
    """F(s) sampled on an increasing grid of integer scales."""

    scales: np.ndarray
    values: np.ndarray
    poly_order: int
    n: int

    def __post_init__(self) -> None:
        scales = np.asarray(self.scales, dtype=np.int64)
        values = np.asarray(self.values, dtype=np.float64)
        if scales.shape != values.shape or scales.ndim != 1:
            raise ValueError("scales and values must be matching 1-d arrays")
        if scales.size and np.any(np.diff(scales) <= 0):
            raise ValueError("scales must be strictly increasing")
        object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "values", values)

    @property
    def is_degenerate(self) -> bool:
        """True when every window was fitted exactly (constant-like input)."""
        return bool(np.all(self.values == 0.0))


@dataclass(frozen=True)
class SingleScaling:
    """One scaling regime: log F = log_amplitude + hurst * log s."""

    hurst: float
    log_amplitude: float
    rmse: float


@dataclass(frozen=True)
class DoubleScaling:
    """Two regimes joined continuously at a crossover scale."""

    hurst_small: float
    hurst_large: float
    crossover_scale: float
    rmse: float


@dataclass(frozen=True)
class DfaResult:
    curve: FluctuationCurve
    scaling: SingleScaling | DoubleScaling

    def to_record(self) -> dict:
        rec: dict = {"poly_order": self.curve.poly_order, "n": self.curve.n}
        if isinstance(self.scaling, SingleScaling):
            rec.update(
                regime="single",
                hurst=self.scaling.hurst,
                hurst_small="",
                hurst_large="",
                crossover_scale="",
                rmse=self.scaling.rmse,
            )
        else:
            rec.update(
                regime="double",
                hurst="",
                hurst_small=self.scaling.hurst_small,
                hurst_large=self.scaling.hurst_large,
                crossover_scale=self.scaling.crossover_scale,
                rmse=self.scaling.rmse,
            )
        return rec


def default_scales(n: int, *, s_min: int = 10, s_max: int | None = None, num: int = 30) -> np.ndarray:
    """About ``num`` log-spaced integer scales in [s_min, n // 5], deduplicated."""
    if s_max is None:
        s_max = n // 5
    if s_max < s_min:
        raise SeriesTooShortError(n, 5 * s_min)
    raw = np.geomspace(s_min, s_max, num)
    return np.unique(np.rint(raw).astype(np.int64))


def compute_fluctuation(series, scales=None, *, poly_order: int = 2) -> FluctuationCurve:
    """Fluctuation function of a series over the given scales.

    Windows are taken from the start and, to use the tail left over by the
    integer division, again from the end; each contributes the mean squared
    residual of its own polynomial fit.
    """
    x = np.asarray(getattr(series, "values", series), dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("series must be one-dimensional")
    if not 1 <= poly_order <= 3:
        raise ValueError(f"poly_order must be 1, 2, or 3, got {poly_order}")
    n = x.size
    if scales is None:
        scales = default_scales(n)
    scales = np.asarray(scales, dtype=np.int64)
    if scales.size == 0:
        raise ValueError("need at least one scale")
    s_min, s_max = int(scales.min()), int(scales.max())
    if s_min < poly_order + 2:
        raise ValueError(f"smallest scale {s_min} cannot constrain a degree-{poly_order} fit")
    if n < 5 * s_min or s_max > n // 5:
        raise SeriesTooShortError(n, max(5 * s_min, 5 * s_max))

    profile = np.cumsum(x)
    values = np.empty(scales.size, dtype=np.float64)
    for i, s in enumerate(scales):
        s = int(s)
        n_seg = n // s
        forward = profile[: n_seg * s].reshape(n_seg, s)
        backward = profile[n - n_seg * s :].reshape(n_seg, s)
        windows = np.concatenate([forward, backward], axis=0).T  # (s, 2*n_seg)
        design = np.vander(np.arange(s, dtype=np.float64), poly_order + 1)
        _, ssr, rank, _ = np.linalg.lstsq(design, windows, rcond=None)
        if ssr.size != windows.shape[1]:  # pragma: no cover - full rank for s > order
            coef = np.linalg.lstsq(design, windows, rcond=None)[0]
            ssr = ((windows - design @ coef) ** 2).sum(axis=0)
        # Windows the polynomial reproduces exactly leave only rounding
        # noise in ssr; snap those to a true zero so deterministic inputs
        # register as degenerate instead of yielding slopes of noise.
        ssr = np.where(ssr <= (windows**2).sum(axis=0) * 1e-24, 0.0, ssr)
        values[i] = np.sqrt(ssr.mean() / s)
    return FluctuationCurve(scales=scales, values=values, poly_order=poly_order, n=n)


def loglog_slope(curve: FluctuationCurve) -> SingleScaling:
    """Least-squares line through (log s, log F)."""
    if np.any(curve.values <= 0.0):
        raise NonPositiveFluctuationError(
            "fluctuation function vanishes at some scale; no log-log fit exists"
        )
    lx = np.log(curve.scales.astype(np.float64))
    ly = np.log(curve.values)
    design = np.column_stack([np.ones_like(lx), lx])
    coef, _, _, _ = np.linalg.lstsq(design, ly, rcond=None)
    resid = ly - design @ coef
    rmse = float(np.sqrt(np.mean(resid**2)))
    return SingleScaling(hurst=float(coef[1]), log_amplitude=float(coef[0]), rmse=rmse)


def _two_segment(lx: np.ndarray, ly: np.ndarray, j: int) -> tuple[float, float, float]:
    """Continuous piecewise-linear fit with the knee at lx[j].

    Returns (slope_left, slope_right, rmse).
    """
    knee = lx[j]
    bend = np.maximum(lx - knee, 0.0)
    design = np.column_stack([np.ones_like(lx), lx, bend])
    coef, _, _, _ = np.linalg.lstsq(design, ly, rcond=None)
    resid = ly - design @ coef
    rmse = float(np.sqrt(np.mean(resid**2)))
    return float(coef[1]), float(coef[1] + coef[2]), rmse


def fit_scaling(
    curve: FluctuationCurve,
    *,
    min_points: int = 10,
    min_segment_points: int = 5,
    improvement: float = 0.6,
    min_gap: float = 0.15,
) -> SingleScaling | DoubleScaling:
    """Choose between one and two scaling regimes.

    Every interior knee position leaving at least ``min_segment_points``
    scales on each side is tried. The two-segment description wins only if
    its rmse undercuts the single line by more than ``improvement`` and
    the two slopes differ by more than ``min_gap``; otherwise the single
    line stands.

    The defaults are deliberately conservative. The knee position adapts
    to the data, and fluctuation values share one realization, so their
    errors are correlated across scales; chance bends in uncorrelated
    series at n = 10^4 routinely cut the rmse by half. Requiring a 60%
    cut plus a 0.15 slope gap keeps the false-crossover rate on such
    series below ~5% while still catching every synthetic two-regime
    curve with a gap of 0.2 at realistic noise levels.
    """
    if curve.scales.size < min_points:
        raise ValueError(
            f"need at least {min_points} scales to classify scaling, got {curve.scales.size}"
        )
    single = loglog_slope(curve)
    lx = np.log(curve.scales.astype(np.float64))
    ly = np.log(curve.values)
    n = lx.size
    best: tuple[float, int, float, float] | None = None
    for j in range(min_segment_points - 1, n - min_segment_points):
        h1, h2, rmse = _two_segment(lx, ly, j)
        if best is None or rmse < best[0]:
            best = (rmse, j, h1, h2)
    if best is not None:
        rmse2, j, h1, h2 = best
        if rmse2 < (1.0 - improvement) * single.rmse and abs(h2 - h1) > min_gap:
            return DoubleScaling(
                hurst_small=h1,
                hurst_large=h2,
                crossover_scale=float(curve.scales[j]),
                rmse=rmse2,
            )
    return single


def dfa(series, *, poly_order: int = 2, scales=None, **scaling_kwargs) -> DfaResult:
    """Fluctuation curve plus regime classification in one call."""
    curve = compute_fluctuation(series, scales, poly_order=poly_order)
    if curve.is_degenerate:
        raise NonPositiveFluctuationError(
            "series has no fluctuations around local trends (constant-like input)"
        )
    return DfaResult(curve=curve, scaling=fit_scaling(curve, **scaling_kwargs))
