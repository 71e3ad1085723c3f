"""
Command-line front end.

    gridheadroom ingest RAW --mapping MAP --out canonical.csv
    gridheadroom run --dataset canonical.csv --preset neso2030
    gridheadroom hist --band-width 5 --format csv --out fig2.csv
    gridheadroom sweep --wm 1,1.65,3.3,4.95
    gridheadroom lull --window-start 2017-01-16 --window-end 2017-01-25
    gridheadroom report --out bundle/

Exit codes: 0 success, 2 data error, 3 configuration error,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import os
import sys
from pathlib import Path

from . import analysis, composite, dataset, histogram, scenario
from .dataset import ConfigurationError, DataQualityError
from .export import csv_text, fmt, json_text, write_text
from .scenario import ScenarioError

EXIT_OK, EXIT_DATA, EXIT_CONFIG, EXIT_INVARIANT = 0, 2, 3, 4
DATA_ENV = "GRIDHEADROOM_DATA"
DEFAULT_DATASET_NAME = "uk2017.csv"

NESO_TABLE2 = {"emissions_mt_pa": 5.2, "mean_excess_gw": 5.48}


class InvariantViolation(RuntimeError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gridheadroom", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ingest = sub.add_parser("ingest", help="clean raw telemetry into a canonical dataset")
    ingest.add_argument("raw", help="raw delimited telemetry file")
    ingest.add_argument("--mapping", required=True, help="column mapping file")
    ingest.add_argument("--out", required=True, help="canonical CSV to write")

    def common(p, fmt_default):
        p.add_argument("--dataset", help=f"canonical dataset (default ${DATA_ENV}/{DEFAULT_DATASET_NAME})")
        p.add_argument("--format", choices=("csv", "json"), default=fmt_default)
        p.add_argument("--out", help="output path (stdout if omitted)")

    def scen(p, wm_list=False):
        p.add_argument("--preset", choices=sorted(scenario.PRESETS))
        p.add_argument("--scenario-file")
        p.add_argument("--hdrm", type=float)
        if wm_list:
            p.add_argument("--wm", dest="wm_list", type=_floats, default=[],
                           help="comma-separated wind multipliers")
            p.set_defaults(wm=None)
        else:
            p.add_argument("--wm", type=float)
        p.add_argument("--sm", type=float)
        p.add_argument("--emission-intensity", type=float)
        p.add_argument("--workers", type=int, default=1)

    def lull_opts(p):
        p.add_argument("--window-start")
        p.add_argument("--window-end")
        p.add_argument("--threshold", type=float, default=analysis.DEFAULT_LULL_THRESHOLD)
        p.add_argument("--min-days", type=int, default=analysis.DEFAULT_LULL_MIN_DAYS)

    common(sub.add_parser("summary", help="dataset statistics and seasonal factors"), "json")

    p = sub.add_parser("run", help="composite model annual summary (csv: weekly emissions)")
    common(p, "json"); scen(p)

    p = sub.add_parser("hist", help="histogram model (csv: band plot-data)")
    common(p, "csv"); scen(p)
    p.add_argument("--band-width", type=float, default=histogram.DEFAULT_BAND_WIDTH)

    p = sub.add_parser("sweep", help="emissions against wind multiplier")
    common(p, "csv"); scen(p, wm_list=True)

    p = sub.add_parser("lull", help="gas backfill through a wind lull")
    common(p, "csv"); scen(p); lull_opts(p)

    p = sub.add_parser("report", help="all plot-data and tables in one directory")
    p.add_argument("--dataset")
    p.add_argument("--out", required=True, help="output directory")
    scen(p, wm_list=True); lull_opts(p)
    p.add_argument("--band-width", type=float, default=histogram.DEFAULT_BAND_WIDTH)
    return parser


def resolve_dataset_path(arg: str | None) -> Path:
    env = os.environ.get(DATA_ENV)
    if arg is None:
        if not env:
            raise DataQualityError(f"no --dataset given and ${DATA_ENV} is not set")
        return Path(env) / DEFAULT_DATASET_NAME
    path = Path(arg)
    if not path.exists() and env and not path.is_absolute():
        candidate = Path(env) / path
        if candidate.exists():
            return candidate
    return path


def resolve_scenario(args, ds: dataset.YearDataset) -> scenario.Scenario:
    base = scenario.base_means(ds)
    s = scenario.PRESETS[args.preset or "neso2030"](base)
    if args.scenario_file:
        s = scenario.load_scenario(args.scenario_file, s)
    overrides = {"hdrm_annual": args.hdrm, "wm": args.wm, "sm": args.sm,
                 "emission_intensity": args.emission_intensity}
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if overrides:
        s = scenario.scenario_from_mapping(overrides, s)
    return s


def check_summary(summary: composite.AnnualSummary) -> None:
    lhs = summary.mean_available
    rhs = summary.mean_accommodated + summary.mean_excess
    if not math.isclose(lhs, rhs, rel_tol=1e-9, abs_tol=1e-12) or summary.mean_gas < 0:
        raise InvariantViolation(f"annual balance broken: available {lhs} != {rhs}")


def _load(args):
    ds = dataset.read_canonical(resolve_dataset_path(args.dataset))
    return ds, dataset.seasonal_factors(ds)


def _window(args, ds, s, f, summary) -> analysis.LullWindow:
    if args.window_start or args.window_end:
        if not (args.window_start and args.window_end):
            raise ScenarioError("--window-start and --window-end must be given together")
        try:
            start = dataset.parse_timestamp(args.window_start)
            end = dataset.parse_timestamp(args.window_end)
        except ValueError as exc:
            raise ScenarioError(f"bad window timestamp: {exc}") from None
        return analysis.LullWindow(start, end)
    return analysis.default_lull_window(ds, s, f, summary, args.threshold, args.min_days)


def cmd_ingest(args) -> int:
    mapping = dataset.load_mapping(args.mapping)
    try:
        with open(args.raw, newline="", encoding="utf-8") as fh:
            records, rejects = dataset.parse_raw(fh, mapping)
    except OSError as exc:
        raise DataQualityError(f"cannot read {args.raw}: {exc}") from exc
    ds = dataset.clean_resample(records, rejected_rows=len(rejects))
    dataset.write_canonical(ds, args.out)
    means = ds.means()
    print(f"records read: {len(records)}  rejected: {len(rejects)}  "
          f"intervals: {ds.interval_count}  synthesized: {ds.synthesized_fraction:.4%}")
    print("means (GW): " + "  ".join(f"{k} {fmt(v)}" for k, v in means.items()))
    return EXIT_OK


def cmd_summary(args) -> int:
    ds, f = _load(args)
    means = ds.means()
    info = {
        "year_label": ds.year_label,
        "start": dataset.format_timestamp(ds.start),
        "interval_count": ds.interval_count,
        **{f"mean_{k}_gw": v for k, v in means.items()},
        "mean_headroom_gw": means["demand"] - means["nuclear"],
    }
    if args.format == "json":
        write_text(json_text({**info, "seasonal_factors": list(f.factor)}), args.out)
    else:
        write_text(csv_text(("week", "seasonal_factor"),
                            ((i + 1, x) for i, x in enumerate(f.factor))), args.out)
    print(f"{ds.year_label}: {ds.interval_count} intervals, wind {fmt(means['wind'])} GW, "
          f"solar {fmt(means['solar'])} GW", file=sys.stderr)
    return EXIT_OK


def cmd_run(args) -> int:
    ds, f = _load(args)
    s = resolve_scenario(args, ds)
    summary = composite.run_year(ds, s, f, workers=args.workers)
    check_summary(summary)
    if args.format == "json":
        write_text(json_text(summary.to_json()), args.out)
    else:
        write_text(csv_text(("week", "emissions_mt"), composite.weekly_emissions_rows(summary)),
                   args.out)
    print(f"{s.label}: emissions {fmt(summary.emissions)} Mt pa, "
          f"excess {fmt(summary.mean_excess)} GW", file=sys.stderr)
    return EXIT_OK


def cmd_hist(args) -> int:
    ds, _ = _load(args)
    s = resolve_scenario(args, ds)
    if not args.band_width > 0:
        raise ScenarioError("--band-width must be positive")
    h = histogram.build_histogram(ds, s, args.band_width)
    result = histogram.histogram_summary(h, s)
    if args.format == "csv":
        write_text(csv_text(("band_center_gw", "available_gw", "accommodated_gw"),
                            histogram.histogram_rows(h, s.hdrm_annual)), args.out)
    else:
        write_text(json_text({**result.to_json(), "band_width_gw": h.band_width}), args.out)
    print(f"{s.label}: histogram emissions {fmt(result.emissions)} Mt pa, "
          f"excess {fmt(result.mean_excess)} GW", file=sys.stderr)
    return EXIT_OK


def _sweep_rows(points):
    return [(p.wm, p.wind_mean, p.emissions, p.mean_excess) for p in points]


SWEEP_HEADER = ("wm", "wind_gw", "emissions_mt_pa", "excess_gw")


def cmd_sweep(args) -> int:
    ds, f = _load(args)
    s = resolve_scenario(args, ds)
    wm_list = args.wm_list or list(analysis.DEFAULT_SWEEP)
    points = analysis.sweep_wind(ds, s, f, wm_list, workers=args.workers)
    if args.format == "csv":
        write_text(csv_text(SWEEP_HEADER, _sweep_rows(points)), args.out)
    else:
        segs = analysis.segments(points, s)
        write_text(json_text({
            "points": [dict(zip(SWEEP_HEADER, r)) for r in _sweep_rows(points)],
            "segments": [{"from_wind_gw": g.from_wind, "to_wind_gw": g.to_wind,
                          "incremental_reduction_mt_pa_per_gw": g.incremental_reduction,
                          "unit_cost_multiple": g.unit_cost_multiple,
                          "excess_increase_gw": g.excess_increase} for g in segs],
        }), args.out)
    print(f"{len(points)} sweep points, emissions {fmt(points[0].emissions)} -> "
          f"{fmt(points[-1].emissions)} Mt pa", file=sys.stderr)
    return EXIT_OK


LULL_HEADER = ("timestamp_utc", "available_gw", "accommodated_gw", "gas_gw", "hdrm_gw")


def cmd_lull(args) -> int:
    ds, f = _load(args)
    s = resolve_scenario(args, ds)
    summary = composite.run_year(ds, s, f, workers=args.workers)
    window = _window(args, ds, s, f, summary)
    report = analysis.lull_report(ds, s, f, window, summary)
    if args.format == "csv":
        write_text(csv_text(LULL_HEADER, analysis.lull_rows(ds, s, f, window, summary)), args.out)
    else:
        write_text(json_text(report.to_json()), args.out)
    print(f"lull {dataset.format_timestamp(window.start)} .. {dataset.format_timestamp(window.end)}: "
          f"deficit {fmt(report.deficit)} GWh, peak gas {fmt(report.peak_gas)} GW", file=sys.stderr)
    return EXIT_OK


def cmd_report(args) -> int:
    ds, f = _load(args)
    s = resolve_scenario(args, ds)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    workers = args.workers

    summary = composite.run_year(ds, s, f, workers=workers)
    check_summary(summary)
    h = histogram.build_histogram(ds, s, args.band_width)
    hsum = histogram.histogram_summary(h, s)
    points = analysis.sweep_wind(ds, s, f, args.wm_list or list(analysis.DEFAULT_SWEEP), workers)
    t3 = analysis.table3(ds, s, f, workers=workers)
    window = _window(args, ds, s, f, summary)
    lull = analysis.lull_report(ds, s, f, window, summary)
    limit = analysis.economic_limit(points, s, 1.5) if len(points) >= 2 else None

    artifacts = [
        ("figure2_histogram.csv", "available and accommodated generation by band",
         csv_text(("band_center_gw", "available_gw", "accommodated_gw"),
                  histogram.histogram_rows(h, s.hdrm_annual))),
        ("figure4_weekly_emissions.csv", "weekly CO2 emissions, composite model",
         csv_text(("week", "emissions_mt"), composite.weekly_emissions_rows(summary))),
        ("figure5_sweep.csv", "annual emissions against wind multiplier",
         csv_text(SWEEP_HEADER, _sweep_rows(points))),
        ("figure7_lull.csv", "gas backfill through the lull window",
         csv_text(LULL_HEADER, analysis.lull_rows(ds, s, f, window, summary))),
        ("table2.json", "composite vs histogram model predictions",
         json_text({"composite": summary.to_json(), "histogram": hsum.to_json(),
                    "reference_neso": NESO_TABLE2})),
        ("table3.json", "incremental decarbonisation and unit-cost multiples",
         json_text({"no_curtailment_rate_mt_pa_per_gw": analysis.no_curtailment_rate(s),
                    "points": t3,
                    "economic_limit_gw_at_1_5x": None if limit is None else limit.wind_mean})),
        ("storage_comparison.json", "gas storage days by country",
         json_text(analysis.storage_comparison().to_json())),
    ]
    entries = []
    for name, description, text in artifacts:
        write_text(text, out / name)
        entries.append({"file": name, "description": description,
                        "sha256": hashlib.sha256(text.encode()).hexdigest()})
    manifest = {
        "scenario": {"label": s.label, "hdrm_annual": s.hdrm_annual, "wm": s.wm, "sm": s.sm,
                     "emission_intensity": s.emission_intensity},
        "dataset": {"year_label": ds.year_label, "interval_count": ds.interval_count},
        "lull_report": {**lull.to_json(),
                        "storage_days_of_150_gwh": analysis.storage_days(
                            analysis.ESO_STORAGE_2035_GWH, lull.mean_gas) if lull.mean_gas > 0 else None},
        "artifacts": entries,
    }
    write_text(json_text(manifest), out / "manifest.json")
    print(f"wrote {len(entries)} artifacts to {out}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {"ingest": cmd_ingest, "summary": cmd_summary, "run": cmd_run, "hist": cmd_hist,
            "sweep": cmd_sweep, "lull": cmd_lull, "report": cmd_report}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except DataQualityError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ConfigurationError as exc:
        # A broken mapping makes the raw data unreadable.
        code = EXIT_DATA if args.command == "ingest" else EXIT_CONFIG
        print(f"configuration error: {exc}", file=sys.stderr)
        return code
    except (ScenarioError, analysis.AnalysisError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvariantViolation, AssertionError) as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
