"""Manifest-driven batch pipeline.

Four subcommands: ``fit`` (interval extraction + model fits per text and
mode), ``dfa`` (fluctuation analysis per text for the stops and all-marks
modes), ``report`` (cross-language summaries, hazard averages, isolines,
Hurst scatter, translation shifts, rescaled plot data, and figures), and
``sample`` (synthetic interval series for testing).

Output directories are append-only: a command refuses to touch a file that
already exists, so reruns go to fresh directories. Every output row ends
with the fingerprint of the configuration that produced it. Per-text
failures are collected into ``failures.csv`` and reported with a nonzero
exit code while the remaining texts proceed.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click
import numpy as np

from . import figures as figmod
from .aggregate import (
    IsolineError,
    average_hazard_empirical,
    average_hazard_parametric,
    empirical_hazard,
    hurst_scatter_points,
    isoline,
    reliability_bound,
    summarize_language,
    translation_shift,
)
from .corpus import (
    IngestionError,
    PunctMode,
    TextTooShortError,
    default_config,
    extract_intervals,
    load_text,
    preprocess,
    tokenize,
)
from .dfa import (
    NonPositiveFluctuationError,
    SeriesTooShortError,
    SingleScaling,
    compute_fluctuation,
    default_scales,
    fit_scaling,
)
from .manifest import ConfigError, Manifest, ManifestError, RunConfig, load_manifest, parse_config_file
from .plots import PlotSupportError, plot_to_csv, rescale_plot, weibull_plot
from .weibull import DegenerateSeriesError, FitResult, WeibullParams, expected_value, fit_mle, sample

FIT_FIELDS = [
    "text_id", "language_code", "group", "mode",
    "p", "beta", "log_likelihood", "ff_rmse", "n", "converged", "fingerprint",
]
FAILURE_FIELDS = ["text_id", "mode", "stage", "error", "fingerprint"]
DFA_FIELDS = [
    "text_id", "language_code", "mode", "regime",
    "hurst", "hurst_small", "hurst_large", "crossover_scale",
    "rmse", "poly_order", "n", "fingerprint",
]


def _fmt(value) -> str:
    """Stable text form: repr for floats so reruns are byte-identical."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return "" if math.isnan(v) else repr(v)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _fresh(path: Path) -> Path:
    if path.exists():
        raise click.ClickException(
            f"{path} already exists; outputs are append-only, pick a fresh --out"
        )
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _write_csv(path: Path, fieldnames: list[str], rows: list[dict], fingerprint: str) -> None:
    lines = [",".join(fieldnames)]
    for row in rows:
        row = {**row, "fingerprint": fingerprint}
        lines.append(",".join(_fmt(row.get(name)) for name in fieldnames))
    _fresh(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_json(path: Path, obj) -> None:
    _fresh(path).write_text(
        json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _mode_slug(mode: PunctMode) -> str:
    return mode.name.lower()


# ---------------------------------------------------------------------------
# per-text workers (top level so a process pool can pickle them)

def _tokens_for(record, config: RunConfig):
    text = load_text(record.path, record.byte_range())
    lang = default_config(record.language_code, config.abbreviations_dir)
    return tokenize(preprocess(text, lang))


def _fit_text(args) -> tuple[list[dict], list[dict]]:
    record, config = args
    rows: list[dict] = []
    failures: list[dict] = []
    try:
        tokens = _tokens_for(record, config)
    except IngestionError as exc:
        return [], [{"text_id": record.text_id, "mode": "", "stage": "ingest", "error": str(exc)}]
    for mode in config.modes:
        try:
            series = extract_intervals(tokens, mode, text_id=record.text_id)
            fit = fit_mle(series, xatol=config.fit_xatol)
        except (TextTooShortError, DegenerateSeriesError) as exc:
            failures.append(
                {"text_id": record.text_id, "mode": mode.value, "stage": "fit", "error": str(exc)}
            )
            continue
        rows.append(
            {
                "text_id": record.text_id,
                "language_code": record.language_code,
                "group": record.group,
                "mode": mode.value,
                **fit.to_record(),
            }
        )
    return rows, failures


def _dfa_modes(config: RunConfig) -> list[PunctMode]:
    wanted = (PunctMode.STOPS_ONLY, PunctMode.ALL_MARKS)
    return [m for m in config.modes if m in wanted]


def _dfa_text(args) -> tuple[list[dict], list[tuple[str, str, np.ndarray, np.ndarray]], list[dict]]:
    record, config = args
    rows: list[dict] = []
    curves: list[tuple[str, str, np.ndarray, np.ndarray]] = []
    failures: list[dict] = []
    try:
        tokens = _tokens_for(record, config)
    except IngestionError as exc:
        return [], [], [{"text_id": record.text_id, "mode": "", "stage": "ingest", "error": str(exc)}]
    for mode in _dfa_modes(config):
        try:
            series = extract_intervals(tokens, mode, text_id=record.text_id)
            n = len(series)
            s_max = n // 5 if config.dfa_max_scale is None else min(config.dfa_max_scale, n // 5)
            scales = default_scales(
                n, s_min=config.dfa_min_scale, s_max=s_max, num=config.dfa_num_scales
            )
            curve = compute_fluctuation(series, scales, poly_order=config.dfa_poly_order)
            if curve.is_degenerate:
                raise NonPositiveFluctuationError("degenerate zero-fluctuation series")
            scaling = fit_scaling(curve)
        except (TextTooShortError, SeriesTooShortError, NonPositiveFluctuationError, ValueError) as exc:
            failures.append(
                {"text_id": record.text_id, "mode": mode.value, "stage": "dfa", "error": str(exc)}
            )
            continue
        row = {
            "text_id": record.text_id,
            "language_code": record.language_code,
            "mode": mode.value,
            "poly_order": curve.poly_order,
            "n": curve.n,
        }
        if isinstance(scaling, SingleScaling):
            row.update(regime="single", hurst=scaling.hurst, hurst_small=None,
                       hurst_large=None, crossover_scale=None, rmse=scaling.rmse)
        else:
            row.update(regime="double", hurst=None, hurst_small=scaling.hurst_small,
                       hurst_large=scaling.hurst_large,
                       crossover_scale=scaling.crossover_scale, rmse=scaling.rmse)
        rows.append(row)
        curves.append((record.text_id, _mode_slug(mode), curve.scales, curve.values))
    return rows, curves, failures


def _map_records(worker, records, config: RunConfig):
    args = [(rec, config) for rec in records]
    if config.jobs == 1:
        return [worker(a) for a in args]
    with ProcessPoolExecutor(max_workers=config.jobs) as pool:
        return list(pool.map(worker, args))


# ---------------------------------------------------------------------------
# pipeline entry points (importable without the click wrapper)

def run_fit(manifest: Manifest, config: RunConfig) -> tuple[list[dict], list[dict]]:
    """One fit row per (text, mode); failures recorded, not raised."""
    records = sorted(manifest, key=lambda r: r.text_id)
    rows: list[dict] = []
    failures: list[dict] = []
    for text_rows, text_failures in _map_records(_fit_text, records, config):
        rows.extend(text_rows)
        failures.extend(text_failures)
    return rows, failures


def run_dfa(manifest: Manifest, config: RunConfig):
    """One DFA row per (text, mode in {stops, all}); plus raw curves."""
    if not _dfa_modes(config):
        raise ConfigError("dfa needs 'stops' or 'all' among the configured modes")
    records = sorted(manifest, key=lambda r: r.text_id)
    rows: list[dict] = []
    curves: list[tuple[str, str, np.ndarray, np.ndarray]] = []
    failures: list[dict] = []
    for text_rows, text_curves, text_failures in _map_records(_dfa_text, records, config):
        rows.extend(text_rows)
        curves.extend(text_curves)
        failures.extend(text_failures)
    return rows, curves, failures


def _fit_from_row(row: dict) -> FitResult:
    return FitResult(
        params=WeibullParams(float(row["p"]), float(row["beta"])),
        log_likelihood=float(row["log_likelihood"]),
        ff_rmse=float(row["ff_rmse"]),
        n=int(row["n"]),
        converged=row["converged"] in (True, "true"),
    )


def run_report(
    fit_rows: list[dict],
    dfa_rows: list[dict],
    manifest: Manifest,
    config: RunConfig,
    out: Path,
    *,
    render_figures: bool | None = None,
) -> list[str]:
    """Write the summary bundle; returns human-readable warnings."""
    if not fit_rows:
        raise ValueError("fit table is empty; nothing to report")
    if not dfa_rows:
        raise ValueError("dfa table is empty; nothing to report")
    if render_figures is None:
        render_figures = config.figures
    fingerprint = config.fingerprint()
    warnings: list[str] = []

    summary_mode = (
        PunctMode.ALL_MARKS if PunctMode.ALL_MARKS in config.modes else config.modes[0]
    )
    smode = summary_mode.value
    fit_by_id = {row["text_id"]: row for row in fit_rows if row["mode"] == smode}

    series_cache: dict[str, object] = {}

    def series_for(record):
        if record.text_id not in series_cache:
            tokens = _tokens_for(record, config)
            series_cache[record.text_id] = extract_intervals(
                tokens, summary_mode, text_id=record.text_id
            )
        return series_cache[record.text_id]

    # language groups over original texts
    originals: dict[str, list] = {}
    for record in sorted(manifest, key=lambda r: r.text_id):
        if record.group == "original" and record.text_id in fit_by_id:
            originals.setdefault(record.language_code, []).append(record)

    summaries = {}
    lang_points = {}
    lang_isolines = {}
    haz_par = {}
    haz_emp = {}
    reliability = {}
    iso_rows: list[dict] = []
    hp_rows: list[dict] = []
    he_rows: list[dict] = []
    for code in sorted(originals):
        records = originals[code]
        if len(records) < 2:
            warnings.append(f"language {code!r}: only {len(records)} text(s); skipped")
            continue
        fits = [_fit_from_row(fit_by_id[r.text_id]) for r in records]
        series_list = [series_for(r) for r in records]
        rel = reliability_bound(series_list)
        summary = summarize_language(code, fits, reliability_k=rel)
        summaries[code] = summary
        lang_points[code] = np.array([[f.params.p, f.params.beta] for f in fits])
        reliability[code] = rel

        par = average_hazard_parametric(fits, config.hazard_k)
        haz_par[code] = par
        for k in range(1, par.k_max + 1):
            hp_rows.append(
                {"language_code": code, "k": k, "h": par.values[k - 1],
                 "p_mean": par.params.p, "beta_mean": par.params.beta}
            )
        k_emp = max(1, math.floor(rel))
        emp = average_hazard_empirical(
            [empirical_hazard(s, k_emp) for s in series_list], k_emp
        )
        haz_emp[code] = emp
        for k in range(1, emp.k_max + 1):
            he_rows.append(
                {"language_code": code, "k": k, "h": emp.values[k - 1],
                 "n_texts": len(series_list)}
            )

        target = expected_value(WeibullParams(summary.mean_p, summary.mean_beta))
        try:
            points = isoline(target, np.linspace(0.02, 0.98, config.isoline_points))
        except IsolineError as exc:
            warnings.append(f"language {code!r}: {exc}")
        else:
            lang_isolines[code] = points
            for q in points:
                iso_rows.append(
                    {"language_code": code, "p": q.p, "beta": q.beta, "expected": target}
                )

    # Hurst scatter over texts scaling uniformly in both modes
    singles: dict[str, dict[str, float]] = {}
    for row in dfa_rows:
        if row["regime"] == "single":
            singles.setdefault(row["text_id"], {})[row["mode"]] = float(row["hurst"])
    pairs = [
        (text_id, vals[PunctMode.STOPS_ONLY.value], vals[PunctMode.ALL_MARKS.value])
        for text_id, vals in sorted(singles.items())
        if PunctMode.STOPS_ONLY.value in vals and PunctMode.ALL_MARKS.value in vals
    ]
    scatter = None
    if len(pairs) >= 2:
        scatter = hurst_scatter_points([(h_s, h_a) for _, h_s, h_a in pairs])
    else:
        warnings.append(f"hurst scatter: only {len(pairs)} single-regime pair(s); skipped")

    # translation shifts grouped by target language
    shift_reports = []
    by_target: dict[str, list] = {}
    for orig_rec, trans_rec in manifest.translation_pairs():
        if orig_rec.text_id not in fit_by_id or trans_rec.text_id not in fit_by_id:
            warnings.append(
                f"translation pair {orig_rec.text_id!r} -> {trans_rec.text_id!r}: missing fits; skipped"
            )
            continue
        by_target.setdefault(trans_rec.language_code, []).append((orig_rec, trans_rec))
    for code in sorted(by_target):
        if code not in summaries:
            warnings.append(
                f"translation target {code!r} has no language summary; pairs skipped"
            )
            continue
        summary = summaries[code]
        report_pairs = []
        for orig_rec, trans_rec in by_target[code]:
            fo = _fit_from_row(fit_by_id[orig_rec.text_id])
            ft = _fit_from_row(fit_by_id[trans_rec.text_id])
            report_pairs.append((orig_rec.text_id, trans_rec.text_id, fo, ft))
        report = translation_shift([(fo, ft) for _, _, fo, ft in report_pairs], summary)
        record = report.to_record()
        for pair_record, (oid, tid, _, _) in zip(record["pairs"], report_pairs):
            pair_record["original_id"] = oid
            pair_record["translated_id"] = tid
        shift_reports.append(record)

    # rescaled plot data for every fitted text in the summary mode
    plot_rows: dict[str, object] = {}
    for record in sorted(manifest, key=lambda r: r.text_id):
        if record.text_id not in fit_by_id:
            continue
        fit = _fit_from_row(fit_by_id[record.text_id])
        try:
            rescaled = rescale_plot(weibull_plot(series_for(record), fit.params))
        except (PlotSupportError, ValueError) as exc:
            warnings.append(f"plot for {record.text_id!r}: {exc}")
            continue
        plot_rows[record.text_id] = rescaled

    # ---- write the bundle
    summary_obj = {
        "fingerprint": fingerprint,
        "summary_mode": smode,
        "percentile_rule": "nearest-rank, 95th",
        "distance_metric": "mahalanobis under target-language covariance (artifact convention)",
        "languages": [summaries[c].to_record() for c in sorted(summaries)],
        "hurst": scatter.to_record() if scatter is not None else None,
        "warnings": warnings,
    }
    _write_json(out / "summaries.json", summary_obj)
    _write_csv(out / "isolines.csv",
               ["language_code", "p", "beta", "expected", "fingerprint"], iso_rows, fingerprint)
    _write_csv(out / "hazard_parametric.csv",
               ["language_code", "k", "h", "p_mean", "beta_mean", "fingerprint"], hp_rows, fingerprint)
    _write_csv(out / "hazard_empirical.csv",
               ["language_code", "k", "h", "n_texts", "fingerprint"], he_rows, fingerprint)
    if scatter is not None:
        _write_csv(
            out / "hurst_scatter.csv",
            ["text_id", "h_stops", "h_all", "fingerprint"],
            [{"text_id": t, "h_stops": hs, "h_all": ha} for t, hs, ha in pairs],
            fingerprint,
        )
    if shift_reports:
        _write_json(out / "translation_shift.json",
                    {"fingerprint": fingerprint, "reports": shift_reports})
    for text_id in sorted(plot_rows):
        path = _fresh(out / "plots" / f"{text_id}__{_mode_slug(summary_mode)}.csv")
        path.write_text(plot_to_csv(plot_rows[text_id]), encoding="utf-8")

    if render_figures:
        figdir = out / "figures"
        if lang_points:
            figmod.save_params_scatter(
                lang_points, [summaries[c] for c in sorted(summaries)], lang_isolines,
                _fresh(figdir / "params_scatter.png"),
            )
        if haz_par or haz_emp:
            figmod.save_hazard_curves(
                haz_par, haz_emp, reliability, _fresh(figdir / "hazard_curves.png")
            )
        if plot_rows:
            figmod.save_rescaled_plots(plot_rows, _fresh(figdir / "rescaled_plots.png"))
        if scatter is not None:
            figmod.save_hurst_scatter(scatter, _fresh(figdir / "hurst_scatter.png"))
        if shift_reports:
            arrows: dict[str, list] = {}
            for report in shift_reports:
                code = report["target_language"]
                rows = []
                for pair in report["pairs"]:
                    orig = fit_by_id[pair["original_id"]]
                    trans = fit_by_id[pair["translated_id"]]
                    rows.append(
                        (float(orig["p"]), float(orig["beta"]),
                         float(trans["p"]), float(trans["beta"]))
                    )
                arrows[code] = rows
            figmod.save_translation_shift(
                arrows, summaries, _fresh(figdir / "translation_shift.png")
            )
    return warnings


# ---------------------------------------------------------------------------
# click wiring

def _build_config(config_path, modes, jobs, seed) -> RunConfig:
    try:
        config = parse_config_file(config_path) if config_path else RunConfig()
        if modes:
            config = config.replace(
                modes=tuple(PunctMode.from_string(m) for m in modes.split(","))
            )
        if jobs is not None:
            config = config.replace(jobs=jobs)
        if seed is not None:
            config = config.replace(seed=seed)
        return config
    except (ConfigError, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc


def _load_manifest_checked(path) -> Manifest:
    try:
        return load_manifest(path)
    except ManifestError as exc:
        raise click.ClickException(str(exc)) from exc


def _finish(ctx, failures: int) -> None:
    if failures:
        click.echo(f"{failures} per-text failure(s) recorded in failures.csv", err=True)
        ctx.exit(1)


_shared_options = [
    click.option("--manifest", "manifest_path", required=True,
                 type=click.Path(exists=True, dir_okay=False), help="JSONL text manifest."),
    click.option("--config", "config_path", default=None,
                 type=click.Path(exists=True, dir_okay=False), help="key = value settings file."),
    click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
                 help="Output directory (files must not already exist)."),
    click.option("--modes", default=None,
                 help="Comma-separated subset of: stops, stops+commas, all."),
    click.option("--jobs", type=int, default=None, help="Worker processes (default 1)."),
    click.option("--seed", type=int, default=None, help="Seed recorded in the config fingerprint."),
]


def _with_shared_options(fn):
    for option in reversed(_shared_options):
        fn = option(fn)
    return fn


@click.group()
@click.version_option(package_name="interpunct")
def main() -> None:
    """Inter-punctuation interval statistics over a corpus manifest."""


@main.command("fit")
@_with_shared_options
@click.pass_context
def fit_cmd(ctx, manifest_path, config_path, out_dir, modes, jobs, seed) -> None:
    """Extract intervals and fit the interval model per text and mode."""
    config = _build_config(config_path, modes, jobs, seed)
    manifest = _load_manifest_checked(manifest_path)
    rows, failures = run_fit(manifest, config)
    out = Path(out_dir)
    _write_csv(out / "fits.csv", FIT_FIELDS, rows, config.fingerprint())
    if failures:
        _write_csv(out / "failures.csv", FAILURE_FIELDS, failures, config.fingerprint())
    click.echo(f"fit: {len(rows)} row(s) -> {out / 'fits.csv'}")
    _finish(ctx, len(failures))


@main.command("dfa")
@_with_shared_options
@click.pass_context
def dfa_cmd(ctx, manifest_path, config_path, out_dir, modes, jobs, seed) -> None:
    """Fluctuation analysis per text (stops and all-marks modes)."""
    config = _build_config(config_path, modes, jobs, seed)
    manifest = _load_manifest_checked(manifest_path)
    try:
        rows, curves, failures = run_dfa(manifest, config)
    except ConfigError as exc:
        raise click.ClickException(str(exc)) from exc
    out = Path(out_dir)
    _write_csv(out / "dfa.csv", DFA_FIELDS, rows, config.fingerprint())
    for text_id, slug, scales, values in curves:
        lines = ["s,f,fingerprint"]
        for s, f in zip(scales, values):
            lines.append(f"{int(s)},{_fmt(f)},{config.fingerprint()}")
        path = _fresh(out / "curves" / f"{text_id}__{slug}.csv")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    if failures:
        _write_csv(out / "failures.csv", FAILURE_FIELDS, failures, config.fingerprint())
    click.echo(f"dfa: {len(rows)} row(s) -> {out / 'dfa.csv'}")
    _finish(ctx, len(failures))


def _read_table(path: Path) -> list[dict]:
    import csv

    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


@main.command("report")
@_with_shared_options
@click.option("--fits", "fits_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="fits.csv from a fit run.")
@click.option("--dfa", "dfa_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="dfa.csv from a dfa run.")
@click.option("--figures/--no-figures", "render_figures", default=None,
              help="Render PNG figures next to the data (default: config).")
@click.pass_context
def report_cmd(ctx, manifest_path, config_path, out_dir, modes, jobs, seed,
               fits_path, dfa_path, render_figures) -> None:
    """Aggregate fit and DFA tables into the cross-language bundle."""
    config = _build_config(config_path, modes, jobs, seed)
    manifest = _load_manifest_checked(manifest_path)
    fit_rows = _read_table(Path(fits_path))
    dfa_rows = _read_table(Path(dfa_path))
    for label, rows in (("fits", fit_rows), ("dfa", dfa_rows)):
        stale = {r["fingerprint"] for r in rows} - {config.fingerprint()}
        if stale:
            click.echo(
                f"warning: {label} table was produced under different settings "
                f"({', '.join(sorted(stale))})", err=True,
            )
    try:
        warnings = run_report(
            fit_rows, dfa_rows, manifest, config, Path(out_dir),
            render_figures=render_figures,
        )
    except (ValueError, IngestionError, TextTooShortError) as exc:
        raise click.ClickException(str(exc)) from exc
    for message in warnings:
        click.echo(f"warning: {message}", err=True)
    click.echo(f"report -> {out_dir}")


@main.command("sample")
@click.option("--p", "p_value", type=float, required=True, help="Hazard at k = 1.")
@click.option("--beta", type=float, required=True, help="Hazard shape parameter.")
@click.option("--n", type=int, required=True, help="Number of draws.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_file", required=True, type=click.Path(dir_okay=False),
              help="CSV file to create.")
def sample_cmd(p_value, beta, n, seed, out_file) -> None:
    """Draw a synthetic interval series from the model."""
    try:
        params = WeibullParams(p_value, beta)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    values = sample(params, n, seed)
    lines = [f"# p={params.p!r} beta={params.beta!r} n={n} seed={seed}", "value"]
    lines.extend(str(int(v)) for v in values)
    _fresh(Path(out_file)).write_text("\n".join(lines) + "\n", encoding="utf-8")
    click.echo(f"sample: {n} value(s) -> {out_file}")


if __name__ == "__main__":
    main()
