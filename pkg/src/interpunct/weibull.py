"""Discrete Weibull model for waiting times measured in whole words.

The distribution lives on k = 1, 2, 3, ... and is defined through its
survival function

    S(k) = P(K > k) = (1 - p)^(k^beta),

so that pmf(k) = S(k-1) - S(k) and the hazard rate is

    h(k) = P(K = k | K >= k) = 1 - (1 - p)^(k^beta - (k-1)^beta).

``p`` is the hazard at k = 1 and ``beta`` controls how the hazard evolves:
beta = 1 recovers the geometric distribution (constant hazard), beta > 1
gives an increasing hazard, beta < 1 a decreasing one.

All heavy lifting happens in log space.  With lam = log(1 - p) the survival
exponentiates lam * k^beta, and log pmf(k) is evaluated as

    log pmf(k) = lam * (k-1)^beta + log(1 - exp(lam * (k^beta - (k-1)^beta)))

which stays finite even where S(k) itself underflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.optimize import minimize

__all__ = [
    "WeibullParams",
    "FitResult",
    "DegenerateSeriesError",
    "survival",
    "pmf",
    "log_pmf",
    "hazard",
    "expected_value",
    "log_likelihood",
    "ff_rmse",
    "sample",
    "fit_mle",
    "P_BOUNDS",
    "BETA_BOUNDS",
]

# Optimizer box. The lower beta bound keeps k^beta representable for the
# longest intervals seen in practice; the p bounds keep log(1-p) finite.
P_BOUNDS = (1e-4, 1.0 - 1e-4)
BETA_BOUNDS = (0.05, 10.0)

_GRID_P = np.geomspace(1e-3, 0.9, 14)
_GRID_BETA = np.geomspace(0.1, 6.0, 14)


class DegenerateSeriesError(ValueError):
    """Raised when a series cannot identify both parameters."""


@dataclass(frozen=True)
class WeibullParams:
    """Parameter pair (p, beta) with 0 < p < 1 and beta > 0."""

    p: float
    beta: float

    def __post_init__(self) -> None:
        if not (0.0 < self.p < 1.0):
            raise ValueError(f"p must lie in (0, 1), got {self.p!r}")
        if not (self.beta > 0.0):
            raise ValueError(f"beta must be positive, got {self.beta!r}")

    @property
    def log_q(self) -> float:
        """log(1 - p), the negative rate entering every survival exponent."""
        return math.log1p(-self.p)


@dataclass(frozen=True)
class FitResult:
    """Maximum-likelihood fit of a WeibullParams pair to one interval series."""

    params: WeibullParams
    log_likelihood: float
    ff_rmse: float
    n: int
    converged: bool

    def to_record(self) -> dict:
        """Flatten into plain scalars for delimited or JSON output."""
        return {
            "p": self.params.p,
            "beta": self.params.beta,
            "log_likelihood": self.log_likelihood,
            "ff_rmse": self.ff_rmse,
            "n": self.n,
            "converged": self.converged,
        }


def _as_values(series) -> np.ndarray:
    """Accept an IntervalSeries, sequence, or ndarray of positive integers."""
    values = np.asarray(getattr(series, "values", series))
    if values.ndim != 1:
        raise ValueError("interval series must be one-dimensional")
    if values.size and (not np.issubdtype(values.dtype, np.integer)):
        rounded = np.rint(values)
        if not np.array_equal(rounded, values):
            raise ValueError("intervals must be whole numbers of words")
        values = rounded.astype(np.int64)
    if values.size and values.min() < 1:
        raise ValueError("intervals must be >= 1")
    return values.astype(np.int64, copy=False)


def survival(params: WeibullParams, k) -> np.ndarray | float:
    """S(k) = P(K > k) for integer k >= 0. Vectorized over k.

    Evaluated as (1-p)**(k**beta) rather than exp(log_q * k**beta): pow
    carries extra internal precision, and at beta = 1 it reproduces the
    geometric survival bit for bit.
    """
    k = np.asarray(k, dtype=np.float64)
    out = np.power(1.0 - params.p, np.power(k, params.beta))
    return float(out) if out.ndim == 0 else out


def _log1mexp(x: np.ndarray) -> np.ndarray:
    """log(1 - exp(x)) for x < 0, switching forms at -log 2 for accuracy."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    small = x < -math.log(2.0)
    out[small] = np.log1p(-np.exp(x[small]))
    out[~small] = np.log(-np.expm1(x[~small]))
    return out


def _exponents(params: WeibullParams, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return (lam*(k-1)^beta, lam*k^beta) for k >= 1."""
    lam = params.log_q
    return lam * np.power(k - 1.0, params.beta), lam * np.power(k, params.beta)


def log_pmf(params: WeibullParams, k) -> np.ndarray | float:
    """log P(K = k) for integer k >= 1, stable where survival underflows."""
    k = np.asarray(k, dtype=np.float64)
    if k.size and k.min() < 1:
        raise ValueError("pmf support is k >= 1")
    a, b = _exponents(params, k)
    out = a + _log1mexp(b - a)
    return float(out) if out.ndim == 0 else out


def pmf(params: WeibullParams, k) -> np.ndarray | float:
    """P(K = k) = S(k-1) * h(k) for integer k >= 1."""
    k = np.asarray(k, dtype=np.float64)
    if k.size and k.min() < 1:
        raise ValueError("pmf support is k >= 1")
    out = np.asarray(survival(params, k - 1.0) * hazard(params, k))
    return float(out) if out.ndim == 0 else out


def hazard(params: WeibullParams, k) -> np.ndarray | float:
    """h(k) = P(K = k | K >= k) = 1 - (1-p)^(k^beta - (k-1)^beta).

    The exponent gap k^beta - (k-1)^beta is formed before multiplying by
    log(1-p); where the gap is exactly 1 (all k at beta = 1) the hazard is
    exactly p, so that value is returned directly instead of losing an ulp
    to expm1.
    """
    k = np.asarray(k, dtype=np.float64)
    if k.size and k.min() < 1:
        raise ValueError("hazard support is k >= 1")
    gap = np.power(k, params.beta) - np.power(k - 1.0, params.beta)
    out = np.where(gap == 1.0, params.p, -np.expm1(params.log_q * gap))
    return float(out) if out.ndim == 0 else out


def _survival_tail(params: WeibullParams, k_from: int) -> float:
    """sum_{k >= k_from} S(k) via Euler-Maclaurin with the exact integral.

    Substituting u = -lam * x^beta turns the integral of exp(lam * x^beta)
    into an upper incomplete gamma function with shape 1/beta. The f/2 and
    f'/12 corrections leave an error of order f'''(k_from), negligible for
    the large k_from this is called with.
    """
    lam = params.log_q
    beta = params.beta
    s = 1.0 / beta
    u0 = -lam * k_from**beta
    reg = float(special.gammaincc(s, u0))
    if reg > 0.0:
        log_integral = -math.log(beta) - s * math.log(-lam) + special.gammaln(s) + math.log(reg)
        integral = math.exp(log_integral) if log_integral > -745.0 else 0.0
    else:
        integral = 0.0
    f0 = math.exp(lam * k_from**beta)
    f0_prime = lam * beta * k_from ** (beta - 1.0) * f0
    return integral + 0.5 * f0 - f0_prime / 12.0


def expected_value(
    params: WeibullParams,
    *,
    rel_tol: float = 1e-12,
    stop_above: float | None = None,
) -> float:
    """E[K] = sum_{k>=0} S(k).

    Summed term by term until terms fall below ``rel_tol`` of the running
    total; for small beta the tail decays slower than any geometric rate,
    so past 2^16 terms the remainder is taken analytically instead. Terms
    are positive and decreasing, so the running sum is a lower bound, and
    when ``stop_above`` is given the sum stops early as soon as it exceeds
    that value; callers that only need a comparison against a target use
    this to sidestep astronomically heavy tails.
    """
    total = 0.0
    block = 4096
    cutoff = 65536
    start = 0
    while start < cutoff:
        k = np.arange(start, start + block, dtype=np.float64)
        terms = np.exp(params.log_q * np.power(k, params.beta))
        total += float(terms.sum())
        if stop_above is not None and total > stop_above:
            return total
        if terms[-1] < rel_tol * total:
            return total
        start += block
    return total + _survival_tail(params, cutoff)


def log_likelihood(params: WeibullParams, series) -> float:
    """Total log-likelihood of an interval series."""
    values = _as_values(series)
    if values.size == 0:
        return 0.0
    uniq, counts = np.unique(values, return_counts=True)
    return float(np.dot(counts, log_pmf(params, uniq)))


def _neg_mean_ll(theta: np.ndarray, uniq: np.ndarray, counts: np.ndarray, n: int) -> float:
    p, beta = theta
    if not (P_BOUNDS[0] <= p <= P_BOUNDS[1] and BETA_BOUNDS[0] <= beta <= BETA_BOUNDS[1]):
        return np.inf
    lam = math.log1p(-p)
    a = lam * np.power(uniq - 1.0, beta)
    b = lam * np.power(uniq.astype(np.float64), beta)
    lp = a + _log1mexp(b - a)
    return -float(np.dot(counts, lp)) / n


def ff_rmse(params: WeibullParams, series) -> float:
    """Root mean squared gap between empirical and model CDF over k = 1..max."""
    values = _as_values(series)
    if values.size == 0:
        raise DegenerateSeriesError("cannot score an empty series")
    k_max = int(values.max())
    counts = np.bincount(values, minlength=k_max + 1)[1:]
    f_emp = np.cumsum(counts) / values.size
    k = np.arange(1, k_max + 1, dtype=np.float64)
    f_model = 1.0 - survival(params, k)
    return float(np.sqrt(np.mean((f_emp - f_model) ** 2)))


def sample(params: WeibullParams, n: int, seed=None) -> np.ndarray:
    """Draw n values by inverting the survival function.

    With u uniform on (0, 1], the draw is the smallest k with S(k) < u,
    which is floor((log u / log(1-p))^(1/beta)) + 1.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = np.random.default_rng(seed)
    u = 1.0 - rng.random(n)  # in (0, 1], so log u is finite
    t = np.power(np.log(u) / params.log_q, 1.0 / params.beta)
    return (np.floor(t) + 1.0).astype(np.int64)


def fit_mle(series, *, xatol: float = 1e-6) -> FitResult:
    """Fit (p, beta) by maximum likelihood.

    A coarse log-spaced grid picks the starting corner (ties resolved
    toward the smallest beta, then smallest p), and Nelder-Mead refines it
    inside the parameter box. ``converged`` reports whether the simplex
    collapsed below ``xatol`` before hitting the iteration cap.
    """
    values = _as_values(series)
    if values.size < 2:
        raise DegenerateSeriesError(
            f"need at least 2 intervals to fit, got {values.size}"
        )
    uniq, counts = np.unique(values, return_counts=True)
    if uniq.size < 2:
        raise DegenerateSeriesError(
            "all intervals are identical; p and beta are not jointly identifiable"
        )
    n = int(values.size)
    uniq = uniq.astype(np.float64)

    best = (np.inf, None)
    for beta0 in _GRID_BETA:
        for p0 in _GRID_P:
            val = _neg_mean_ll(np.array([p0, beta0]), uniq, counts, n)
            if val < best[0]:
                best = (val, (p0, beta0))
    if best[1] is None:  # pragma: no cover - grid always contains finite points
        raise DegenerateSeriesError("likelihood is degenerate on the whole grid")

    res = minimize(
        _neg_mean_ll,
        x0=np.array(best[1]),
        args=(uniq, counts, n),
        method="Nelder-Mead",
        options={"xatol": xatol, "fatol": 1e-12, "maxiter": 2000},
    )
    if not res.success:
        res2 = minimize(
            _neg_mean_ll,
            x0=res.x,
            args=(uniq, counts, n),
            method="Nelder-Mead",
            options={"xatol": xatol, "fatol": 1e-12, "maxiter": 2000},
        )
        if res2.fun <= res.fun:
            res = res2

    p_hat = float(np.clip(res.x[0], *P_BOUNDS))
    beta_hat = float(np.clip(res.x[1], *BETA_BOUNDS))
    params = WeibullParams(p_hat, beta_hat)
    return FitResult(
        params=params,
        log_likelihood=float(-res.fun * n),
        ff_rmse=ff_rmse(params, values),
        n=n,
        converged=bool(res.success),
    )
