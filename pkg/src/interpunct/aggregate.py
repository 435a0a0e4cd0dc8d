"""Cross-text statistics in the (p, beta) plane and along the hazard axis.

Groups of fitted texts are summarized by their centroid and the principal
axes of their (p, beta) scatter; constant-expected-value isolines give
those clouds a frame of reference. Hazard rates are averaged across texts
two ways, either by evaluating the model at the averaged parameters or by
averaging empirical hazard curves pointwise, with a percentile-based bound
on how far out in k the empirical average deserves trust. Translation
pairs are scored by how far each point sits from the target language's
cloud in Mahalanobis distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .dfa import DfaResult, SingleScaling
from .weibull import BETA_BOUNDS, FitResult, WeibullParams, expected_value, hazard

__all__ = [
    "HazardCurve",
    "LanguageSummary",
    "ShiftRow",
    "ShiftReport",
    "HurstScatter",
    "IsolineError",
    "hurst_scatter_points",
    "empirical_hazard",
    "hazard_from_counts",
    "summarize_language",
    "isoline",
    "average_hazard_parametric",
    "average_hazard_empirical",
    "reliability_bound",
    "nearest_rank_percentile",
    "mahalanobis_distance",
    "translation_shift",
    "hurst_scatter",
]


class IsolineError(ValueError):
    """No (p, beta) on the grid reaches the requested expected value."""


@dataclass(frozen=True)
class HazardCurve:
    """Hazard values at k = 1..K; NaN marks positions with no information.

    ``source`` records how the curve was obtained: "parametric" (model
    evaluated at some params), "empirical" (one text), or
    "empirical-mean" (pointwise average of empirical curves).
    """

    values: np.ndarray
    source: str
    params: WeibullParams | None = None

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("hazard curve needs a non-empty 1-d value array")
        finite = values[~np.isnan(values)]
        if finite.size and (finite.min() < 0.0 or finite.max() > 1.0):
            raise ValueError("hazard values must lie in [0, 1]")
        object.__setattr__(self, "values", values)

    @property
    def k_max(self) -> int:
        return int(self.values.size)

    def value_at(self, k: int) -> float:
        if not 1 <= k <= self.k_max:
            raise IndexError(f"k={k} outside 1..{self.k_max}")
        return float(self.values[k - 1])


def hazard_from_counts(counts: Mapping[int, float], k_max: int) -> HazardCurve:
    """Empirical hazard from outcome weights: h(k) = w(k) / w(>= k).

    Weights may be fractional; outcomes beyond ``k_max`` still feed the
    at-risk denominators.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    values = np.full(k_max, np.nan)
    total = float(sum(counts.values()))
    below = 0.0
    for k in range(1, k_max + 1):
        at_risk = total - below
        w = float(counts.get(k, 0.0))
        if at_risk > 0.0:
            values[k - 1] = w / at_risk
        below += w
    return HazardCurve(values=values, source="empirical")


def empirical_hazard(series, k_max: int) -> HazardCurve:
    """h(k) = #{k_i = k} / #{k_i >= k} for k = 1..k_max, NaN where the
    denominator vanishes."""
    values = np.asarray(getattr(series, "values", series), dtype=np.int64)
    if values.size == 0:
        raise ValueError("series must be nonempty")
    uniq, counts = np.unique(values, return_counts=True)
    return hazard_from_counts(dict(zip(uniq.tolist(), counts.tolist())), k_max)


@dataclass(frozen=True)
class LanguageSummary:
    """Centroid and principal-axis ellipse of one language's (p, beta) cloud."""

    language_code: str
    n_texts: int
    mean_p: float
    mean_beta: float
    axes: np.ndarray          # columns: major, minor unit vectors
    semi_major: float
    semi_minor: float
    reliability_k: float = float("nan")

    def __post_init__(self) -> None:
        axes = np.asarray(self.axes, dtype=np.float64)
        if axes.shape != (2, 2):
            raise ValueError("axes must be a 2x2 matrix with axis vectors as columns")
        if not np.allclose(axes.T @ axes, np.eye(2), atol=1e-9):
            raise ValueError("axis vectors must be orthonormal")
        if not (self.semi_major >= self.semi_minor >= 0.0):
            raise ValueError("semi-axis lengths must satisfy major >= minor >= 0")
        object.__setattr__(self, "axes", axes)

    @property
    def center(self) -> np.ndarray:
        return np.array([self.mean_p, self.mean_beta])

    def covariance(self) -> np.ndarray:
        """Reconstruct the cloud covariance from axes and semi-axis lengths."""
        lengths_sq = np.diag([self.semi_major**2, self.semi_minor**2])
        return self.axes @ lengths_sq @ self.axes.T

    def to_record(self) -> dict:
        return {
            "language_code": self.language_code,
            "n_texts": self.n_texts,
            "mean_p": self.mean_p,
            "mean_beta": self.mean_beta,
            "major_axis": [float(v) for v in self.axes[:, 0]],
            "minor_axis": [float(v) for v in self.axes[:, 1]],
            "semi_major": self.semi_major,
            "semi_minor": self.semi_minor,
            "reliability_k": self.reliability_k,
        }


def _fit_points(fits: Iterable[FitResult]) -> np.ndarray:
    return np.array([[f.params.p, f.params.beta] for f in fits], dtype=np.float64)


def summarize_language(
    language_code: str,
    fits: Sequence[FitResult],
    *,
    reliability_k: float = float("nan"),
) -> LanguageSummary:
    """Centroid plus principal axes of the (p, beta) points of ``fits``.

    Semi-axis lengths are square roots of the covariance eigenvalues
    (sample covariance, n-1 denominator), so the total variance of the
    cloud equals the sum of squared semi-axes.
    """
    points = _fit_points(fits)
    if points.shape[0] < 2:
        raise ValueError(f"need >= 2 fits to summarize, got {points.shape[0]}")
    center = points.mean(axis=0)
    cov = np.cov(points.T, ddof=1)
    eigvals, eigvecs = np.linalg.eigh(cov)  # ascending
    lengths = np.sqrt(np.clip(eigvals, 0.0, None))
    axes = eigvecs[:, ::-1]  # major first
    return LanguageSummary(
        language_code=language_code,
        n_texts=int(points.shape[0]),
        mean_p=float(center[0]),
        mean_beta=float(center[1]),
        axes=axes,
        semi_major=float(lengths[1]),
        semi_minor=float(lengths[0]),
        reliability_k=reliability_k,
    )


def isoline(
    expected: float,
    p_grid: Sequence[float],
    *,
    beta_tol: float = 1e-6,
) -> list[WeibullParams]:
    """Points (p, beta) whose expected interval length equals ``expected``.

    For each p, beta is found by bisection; the expected value is strictly
    decreasing in beta, so a sign change over [0.05, 10] brackets the root.
    Grid points with no root are dropped; an empty result is an error.
    """
    if not expected > 1.0:
        raise ValueError("expected interval length must exceed 1")
    lo_b, hi_b = BETA_BOUNDS
    # Summation is cut off once the partial sum passes this; anything above
    # the target plus tolerance compares identically.
    ceiling = expected * (1.0 + 1e-6) + 1.0
    out: list[WeibullParams] = []
    for p in p_grid:
        if not 0.0 < p < 1.0:
            raise ValueError(f"p_grid values must lie in (0, 1), got {p!r}")
        lo, hi = lo_b, hi_b
        e_lo = expected_value(WeibullParams(p, lo), stop_above=ceiling)
        e_hi = expected_value(WeibullParams(p, hi), stop_above=ceiling)
        if e_lo < expected or e_hi > expected:
            continue
        beta = None
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            e_mid = expected_value(WeibullParams(p, mid), stop_above=ceiling)
            if abs(e_mid - expected) <= beta_tol and e_mid <= ceiling:
                beta = mid
                break
            if e_mid > expected:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-13:
                break
        if beta is None:
            mid = 0.5 * (lo + hi)
            if abs(expected_value(WeibullParams(p, mid), stop_above=ceiling) - expected) <= 1e-5:
                beta = mid
        if beta is not None:
            out.append(WeibullParams(float(p), float(beta)))
    if not out:
        raise IsolineError(
            f"no (p, beta) on the grid reaches expected value {expected}"
        )
    return out


def average_hazard_parametric(fits: Sequence[FitResult], k_max: int) -> HazardCurve:
    """Model hazard evaluated at the arithmetic means of p and beta."""
    if len(fits) < 1:
        raise ValueError("need at least one fit")
    points = _fit_points(fits)
    params = WeibullParams(float(points[:, 0].mean()), float(points[:, 1].mean()))
    k = np.arange(1, k_max + 1)
    return HazardCurve(values=np.asarray(hazard(params, k)), source="parametric", params=params)


def average_hazard_empirical(curves: Sequence[HazardCurve], k_max: int) -> HazardCurve:
    """Pointwise mean over curves, skipping positions a curve does not cover."""
    if len(curves) < 1:
        raise ValueError("need at least one curve")
    values = np.full(k_max, np.nan)
    for k in range(1, k_max + 1):
        present = [
            c.values[k - 1]
            for c in curves
            if k <= c.k_max and not math.isnan(c.values[k - 1])
        ]
        if present:
            values[k - 1] = float(np.mean(present))
    return HazardCurve(values=values, source="empirical-mean")


def nearest_rank_percentile(values, pct: float) -> float:
    """Smallest element with at least pct percent of the sample at or below it."""
    arr = np.sort(np.asarray(getattr(values, "values", values)))
    if arr.size == 0:
        raise ValueError("percentile of an empty sample is undefined")
    if not 0.0 < pct <= 100.0:
        raise ValueError("pct must lie in (0, 100]")
    rank = math.ceil(pct / 100.0 * arr.size)
    return float(arr[rank - 1])


def reliability_bound(series_set: Sequence, pct: float = 95.0) -> float:
    """Mean across series of the per-series nearest-rank percentile."""
    if len(series_set) == 0:
        raise ValueError("need at least one series")
    return float(np.mean([nearest_rank_percentile(s, pct) for s in series_set]))


def mahalanobis_distance(point, summary: LanguageSummary) -> float:
    """Distance of a (p, beta) point from the summary centroid, in units of
    the cloud's own spread. Degenerate directions fall back to the
    pseudo-inverse."""
    diff = np.asarray(point, dtype=np.float64) - summary.center
    cov = summary.covariance()
    try:
        solved = np.linalg.solve(cov, diff)
    except np.linalg.LinAlgError:
        solved = np.linalg.pinv(cov) @ diff
    return float(np.sqrt(max(diff @ solved, 0.0)))


@dataclass(frozen=True)
class ShiftRow:
    """How one translated text moved relative to the target language cloud."""

    delta_p: float
    delta_beta: float
    distance_original: float
    distance_translated: float

    @property
    def moved_closer(self) -> bool:
        return self.distance_translated < self.distance_original

    def to_record(self) -> dict:
        return {
            "delta_p": self.delta_p,
            "delta_beta": self.delta_beta,
            "distance_original": self.distance_original,
            "distance_translated": self.distance_translated,
            "moved_closer": self.moved_closer,
        }


@dataclass(frozen=True)
class ShiftReport:
    """Per-pair displacements plus the aggregate pull toward the target cloud.

    Distances are Mahalanobis distances from the target-language centroid
    under the target cloud covariance; this operationalizes the otherwise
    visual notion of points "moving toward" a language's ellipse and is
    labeled as a convention in serialized output.
    """

    target_language: str
    rows: tuple[ShiftRow, ...]

    @property
    def mean_distance_decrease(self) -> float:
        return float(
            np.mean([r.distance_original - r.distance_translated for r in self.rows])
        )

    def to_record(self) -> dict:
        return {
            "target_language": self.target_language,
            "distance_metric": "mahalanobis (artifact convention)",
            "mean_distance_decrease": self.mean_distance_decrease,
            "n_pairs": len(self.rows),
            "pairs": [r.to_record() for r in self.rows],
        }


def translation_shift(
    pairs: Sequence[tuple[FitResult, FitResult]],
    target_summary: LanguageSummary,
) -> ShiftReport:
    """Score (original, translated) fit pairs against the target language."""
    if len(pairs) < 1:
        raise ValueError("need at least one pair")
    rows = []
    for original, translated in pairs:
        o = np.array([original.params.p, original.params.beta])
        t = np.array([translated.params.p, translated.params.beta])
        rows.append(
            ShiftRow(
                delta_p=float(t[0] - o[0]),
                delta_beta=float(t[1] - o[1]),
                distance_original=mahalanobis_distance(o, target_summary),
                distance_translated=mahalanobis_distance(t, target_summary),
            )
        )
    return ShiftReport(target_language=target_summary.language_code, rows=tuple(rows))


@dataclass(frozen=True)
class HurstScatter:
    """Paired Hurst exponents from two punctuation modes, with their trend."""

    points: np.ndarray  # columns: H_stops, H_all
    slope: float
    intercept: float
    mean_stops: float
    mean_all: float

    def to_record(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "mean_stops": self.mean_stops,
            "mean_all": self.mean_all,
            "n_points": int(self.points.shape[0]),
        }


def hurst_scatter_points(points: Sequence[tuple[float, float]]) -> HurstScatter:
    """Least-squares line through already-paired (H_stops, H_all) values."""
    if len(points) < 2:
        raise ValueError(f"need >= 2 single-regime pairs, got {len(points)}")
    arr = np.array(points, dtype=np.float64)
    design = np.column_stack([np.ones(arr.shape[0]), arr[:, 0]])
    coef, _, _, _ = np.linalg.lstsq(design, arr[:, 1], rcond=None)
    return HurstScatter(
        points=arr,
        slope=float(coef[1]),
        intercept=float(coef[0]),
        mean_stops=float(arr[:, 0].mean()),
        mean_all=float(arr[:, 1].mean()),
    )


def hurst_scatter(results: Sequence[tuple[DfaResult, DfaResult]]) -> HurstScatter:
    """Least-squares line through (H_stops, H_all) pairs.

    Only texts scaling uniformly (single regime) in both modes enter.
    """
    points = [
        (r_stops.scaling.hurst, r_all.scaling.hurst)
        for r_stops, r_all in results
        if isinstance(r_stops.scaling, SingleScaling)
        and isinstance(r_all.scaling, SingleScaling)
    ]
    return hurst_scatter_points(points)
