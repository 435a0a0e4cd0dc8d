"""Inter-punctuation interval statistics for literary corpora.

The package measures how many words separate consecutive punctuation
marks, fits a discrete Weibull model to those waiting times, renders
hazard and rescaled probability-plot diagnostics, and checks interval
sequences for long-range correlations with detrended fluctuation
analysis. A manifest-driven command line ties the pieces together for
whole corpora.
"""

from .corpus import (
    IngestionError,
    IntervalSeries,
    LangConfig,
    MarkKind,
    PunctMode,
    TextTooShortError,
    default_config,
    extract_intervals,
    intervals_from_text,
    load_text,
    preprocess,
    tokenize,
)
from .dfa import (
    DfaResult,
    DoubleScaling,
    FluctuationCurve,
    NonPositiveFluctuationError,
    SeriesTooShortError,
    SingleScaling,
    compute_fluctuation,
    default_scales,
    dfa,
    fit_scaling,
    loglog_slope,
)
from .aggregate import (
    HazardCurve,
    HurstScatter,
    IsolineError,
    LanguageSummary,
    ShiftReport,
    ShiftRow,
    average_hazard_empirical,
    average_hazard_parametric,
    empirical_hazard,
    hazard_from_counts,
    hurst_scatter,
    hurst_scatter_points,
    isoline,
    mahalanobis_distance,
    nearest_rank_percentile,
    reliability_bound,
    summarize_language,
    translation_shift,
)
from .manifest import (
    ConfigError,
    Manifest,
    ManifestError,
    RunConfig,
    TextRecord,
    load_manifest,
    parse_config_file,
)
from .plots import PlotSeries, PlotSupportError, plot_to_csv, rescale_plot, weibull_plot
from .weibull import (
    DegenerateSeriesError,
    FitResult,
    WeibullParams,
    expected_value,
    ff_rmse,
    fit_mle,
    hazard,
    log_likelihood,
    log_pmf,
    pmf,
    sample,
    survival,
)

__version__ = "0.1.0"
