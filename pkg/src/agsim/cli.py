"""Command line: ``agsim run | sweep | place | hist``.

Exit codes: 0 success, 2 usage, 3 scenario parse error, 4 invalid
configuration, 5 runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import results
from .errors import ConfigurationError, ScenarioParseError
from .geom import Box
from .placement import SearchRegion, reposition_experiment
from .scenario_file import load, parse_seeds
from .simcore import available_engines, run_batch, throughput_histogram

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3, 4, 5

log = logging.getLogger("agsim")


class UsageError(Exception):
    pass


def _write(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _seeds(args, file_seeds):
    if args.seed is not None and args.seeds is not None:
        raise UsageError("give either --seed or --seeds, not both")
    if args.seed is not None:
        return (args.seed,)
    if args.seeds is not None:
        try:
            return parse_seeds(args.seeds)
        except ValueError as exc:
            raise UsageError(f"--seeds: {exc}") from exc
    return file_seeds


def _float_list(text: str, flag: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from exc
    if not vals:
        raise UsageError(f"{flag} needs at least one value")
    return vals


def _run_blocks(sf, seeds, frequencies, args):
    rows, intervals = [], []
    for f in frequencies:
        sc = sf.scenario.with_frequency(f)
        batch = run_batch(sc, seeds, jobs=args.jobs, engine=args.engine)
        for seed, rep in zip(batch.seeds, batch.reports):
            rows.append(results.report_row(sf.name, seed, f, rep))
            intervals += results.interval_rows(sf.name, seed, f, rep, sc.sample_interval_s)
        log.info("%s @ %.4g Hz: mean throughput %.4f Mb/s over %d runs", sf.name, f,
                 batch.aggregate.throughput_bps.mean / 1e6, len(seeds))
    _write(results.render_csv(results.with_aggregates(rows)), args.out)
    if args.intervals_out:
        intervals.sort(key=lambda r: (r["frequency_hz"], r["seed"], r["interval_start_s"]))
        _write(results.render_csv(intervals, results.INTERVALS_HEADER), args.intervals_out)


def cmd_run(args) -> None:
    sf = load(args.scenario)
    _run_blocks(sf, _seeds(args, sf.seeds), [sf.scenario.radio.frequency_hz], args)


def cmd_sweep(args) -> None:
    freqs = _float_list(args.frequencies, "--frequencies")
    sf = load(args.scenario)
    _run_blocks(sf, _seeds(args, sf.seeds), freqs, args)


def _region(args) -> SearchRegion:
    x0, x1, y0, y1 = _float_list(args.region, "--region") if args.region else (-50, 50, -50, 50)
    try:
        bounds = Box.from_bounds(x0, x1, y0, y1, args.altitude_min, args.altitude_max)
    except ValueError as exc:
        raise ConfigurationError(f"search region: {exc}") from exc
    region = SearchRegion(bounds, args.step, args.altitude_min, args.altitude_max)
    region.validate()
    return region


def cmd_place(args) -> None:
    sf = load(args.scenario)
    seeds = _seeds(args, sf.seeds)
    outcome = reposition_experiment(sf.scenario, _region(args), seeds, jobs=args.jobs, engine=args.engine)
    p = outcome.placement
    print(f"position: {p.position.x!r}, {p.position.y!r}, {p.position.z!r}", file=sys.stderr)
    print(f"predicted_path_loss_db: {p.predicted_path_loss_db!r}  los_clear: {str(p.los_clear).lower()}  "
          f"candidates: {p.candidates_evaluated}", file=sys.stderr)
    if outcome.already_clear:
        print("note: line of sight was already clear at the original position", file=sys.stderr)
    header = ("phase", "uav_x", "uav_y", "uav_z", "los_clear") + results.METRIC_COLUMNS
    rows = []
    for phase, pos, agg, clear in (
        ("before", sf.scenario.uav_pos, outcome.before, outcome.already_clear),
        ("after", p.position, outcome.after, p.los_clear),
    ):
        rows.append({
            "phase": phase, "uav_x": pos.x, "uav_y": pos.y, "uav_z": pos.z, "los_clear": clear,
            "throughput_bps": agg.throughput_bps.mean, "pdr": agg.pdr.mean,
            "loss_ratio": agg.loss_ratio.mean, "mean_delay_s": agg.mean_delay_s.mean,
            "delivered": agg.delivered_count.mean, "generated": agg.generated_count.mean,
        })
    _write(results.render_csv(rows, header), args.out)


def cmd_hist(args) -> None:
    if args.bins < 1:
        raise UsageError("--bins must be >= 1")
    try:
        text = Path(args.results_csv).read_text(encoding="utf-8")
        rows = results.parse_csv(text)
    except OSError as exc:
        raise ScenarioParseError(f"cannot read {args.results_csv}: {exc.strerror}") from exc
    except (ValueError, KeyError) as exc:
        raise ScenarioParseError(f"{args.results_csv}: not a results CSV ({exc})") from exc
    samples = [float(r["throughput_bps"]) for r in rows if r.get("seed") != results.AGG_SEED]
    if not samples:
        raise ConfigurationError("no throughput samples in input")
    upper = args.upper if args.upper is not None else max(samples)
    if upper <= 0:
        upper = 1.0
    bins = throughput_histogram(samples, upper, args.bins)
    rows = [{"bin_lower": lo, "bin_upper": hi, "count": n} for lo, hi, n in bins]
    _write(results.render_csv(rows, results.HIST_HEADER), args.out)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="agsim", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def sim_opts(p):
        p.add_argument("scenario", help="scenario .cfg path, or the name of a bundled scenario")
        p.add_argument("--seed", type=int)
        p.add_argument("--seeds", help="e.g. 1..10 or 1,2,5")
        p.add_argument("--out", default="-")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--engine", choices=available_engines())

    p = sub.add_parser("run", help="run a scenario for a set of seeds")
    sim_opts(p)
    p.add_argument("--intervals-out", help="also write per-interval throughput samples")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run a scenario at several carrier frequencies")
    sim_opts(p)
    p.add_argument("--frequencies", required=True, help="comma separated, Hz (e.g. 5e9,10e9)")
    p.add_argument("--intervals-out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("place", help="search a LoS-clear UAV position and compare before/after")
    sim_opts(p)
    p.add_argument("--region", help="x_min,x_max,y_min,y_max in meters (default -50,50,-50,50)")
    p.add_argument("--altitude-min", type=float, default=10.0)
    p.add_argument("--altitude-max", type=float, default=10.0)
    p.add_argument("--step", type=float, default=1.0)
    p.set_defaults(func=cmd_place)

    p = sub.add_parser("hist", help="histogram of throughput samples in a CSV")
    p.add_argument("results_csv")
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--upper", type=float, help="upper edge in bit/s (default: max sample)")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_hist)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        print(f"agsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScenarioParseError as exc:
        print(f"agsim: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConfigurationError as exc:
        print(f"agsim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - any other failure is a runtime error for the exit code
        log.debug("runtime failure", exc_info=True)
        print(f"agsim: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
