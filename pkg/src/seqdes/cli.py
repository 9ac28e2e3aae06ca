"""Command-line front end.

Subcommands: simulate, fit, sequential, anneal, frequencies, serve,
replay.  Exit codes: 0 success, 1 runtime failure, 2 usage error.  All
outputs are deterministic for a fixed seed; summaries print as text or,
with --json, as a single canonical JSON object on stdout.
"""
from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

from .bayes import (
    MHConfig,
    PriorSpec,
    mh_sample,
    posterior_summary,
    posterior_to_csv,
)
from .criteria import Criterion, selection_frequencies, table_to_csv
from .growth import (
    DEFAULT_SEASON,
    DEFAULT_START,
    Dataset,
    GrowthParams,
    SCENARIOS,
    TimeGrid,
    dataset_from_csv,
    dataset_from_json,
    dataset_to_csv,
    dataset_to_json,
    scenario,
    simulate_counts,
)
from .jsonio import canonical_dumps, canonical_dump, jsonl_append
from .optimize import (
    AnnealConfig,
    SimulatedSource,
    exhaustive_minimum,
    replicate_scenario,
    simulated_annealing,
)
from .seeds import Stream
from .session import replay as replay_log
from .api import ENV_ADDR, ENV_DATA_DIR, create_app


class CliError(Exception):
    """Runtime failure; maps to exit code 1."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def _emit(args, payload: dict, text: str) -> None:
    if getattr(args, "json", False):
        print(canonical_dumps(payload))
    else:
        print(text)


def _params_from_args(args) -> GrowthParams:
    if args.scenario:
        return scenario(args.scenario, n0=args.n0)
    if args.r is None:
        raise CliError("usage", "either --scenario or --r is required")
    return GrowthParams(r=args.r, K=args.k, n0=args.n0)


def _priors_from_args(args) -> PriorSpec:
    return PriorSpec(
        r_mean=args.r_mean,
        r_var=args.r_var,
        k_mean=args.k_mean,
        k_var=args.k_var,
        parameterization=args.prior_parameterization,
    )


def _mh_from_args(args) -> MHConfig:
    return MHConfig(kept=args.kept, burn_in=args.burn_in, thin=args.thin)


def _load_dataset(path: str):
    p = Path(path)
    if not p.exists():
        raise CliError("io-error", f"dataset file {path} does not exist")
    try:
        if p.suffix == ".json":
            return dataset_from_json(p)
        return dataset_from_csv(p)
    except (ValueError, KeyError, OSError) as exc:
        raise CliError("parse-error", f"could not read dataset {path}: {exc}") from exc


def _write_dataset(data, path: Path) -> None:
    if path.suffix == ".json":
        dataset_to_json(data, path)
    else:
        dataset_to_csv(data, path)


def _add_prior_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--r-mean", type=float, default=1.0)
    p.add_argument("--r-var", type=float, default=10.0)
    p.add_argument("--k-mean", type=float, default=2000.0)
    p.add_argument("--k-var", type=float, default=0.1)
    p.add_argument(
        "--prior-parameterization",
        choices=("mean-var", "mean-logvar", "log-precision"),
        default="mean-var",
    )


def _add_mh_flags(p: argparse.ArgumentParser, kept: int = 10_000, burn: int = 2_000) -> None:
    p.add_argument("--kept", type=int, default=kept)
    p.add_argument("--burn-in", type=int, default=burn)
    p.add_argument("--thin", type=int, default=1)


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument("--scenario", choices=sorted(SCENARIOS))
    group.add_argument("--r", type=float)
    p.add_argument("--k", type=float, default=2000.0)
    p.add_argument("--n0", type=float, default=DEFAULT_START)


def cmd_simulate(args) -> int:
    params = _params_from_args(args)
    grid = TimeGrid.full(args.days)
    data = simulate_counts(params, grid, args.seed)
    out = Path(args.out)
    _write_dataset(data, out)
    _emit(
        args,
        {"rows": len(data), "out": str(out), "r": params.r, "K": params.K, "n0": params.n0},
        f"wrote {len(data)} daily counts to {out}",
    )
    return 0


def cmd_fit(args) -> int:
    data = _load_dataset(args.data)
    post = mh_sample(
        data,
        _priors_from_args(args),
        _mh_from_args(args),
        n0=args.n0,
        seed=args.seed,
        seed_path=(Stream.FIT, len(data)),
    )
    summary = posterior_summary(post)
    if args.out_draws:
        posterior_to_csv(post, args.out_draws)
    if args.out_summary:
        canonical_dump(summary, args.out_summary)
    _emit(
        args,
        summary,
        "posterior mean r={:.6g} K={:.6g} acceptance={:.3f} kept={}".format(
            summary["mean"]["r"],
            summary["mean"]["K"],
            summary["acceptance_rate"],
            summary["n_kept"],
        ),
    )
    return 0


def _write_bundle(bundle, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    dataset_to_csv(bundle.dataset, out_dir / "dataset.csv")
    with open(out_dir / "design.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "day"])
        for i, day in enumerate(bundle.design.days):
            writer.writerow([i, day])
    trace_path = out_dir / "trace.jsonl"
    trace_path.write_text("")
    for rec in bundle.trace:
        jsonl_append(trace_path, rec.to_dict())
    with open(out_dir / "band.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["day", "lower", "median", "upper"])
        band = bundle.band
        for d, lo, mid, hi in zip(band.days, band.lower, band.median, band.upper):
            writer.writerow([d, repr(lo), repr(mid), repr(hi)])
    with open(out_dir / "curve.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["day", "mean"])
        for d, v in zip(band.days, bundle.truth):
            writer.writerow([d, repr(v)])
    canonical_dump(bundle.to_dict(), out_dir / "bundle.json")


def _run_cell(scenario_name, kind, args, seed) -> tuple[str, Path]:
    criterion = Criterion(kind, draws=args.draws, refit=args.refit)
    bundle = replicate_scenario(
        scenario_name,
        criterion,
        args.mode,
        seed,
        budget=args.budget,
        window=args.window,
        season=args.season,
        initial_days=tuple(int(d) for d in args.initial_days.split(",")),
        mh=_mh_from_args(args),
        priors=_priors_from_args(args),
        n0=args.n0,
    )
    cell = f"{scenario_name}-{criterion.kind}-{args.mode}-seed{seed}"
    out_dir = Path(args.out_dir) / cell
    _write_bundle(bundle, out_dir)
    return cell, out_dir


def cmd_sequential(args) -> int:
    if args.grid:
        try:
            scen_part, crit_part = args.grid.split(":")
            scenarios = [s.strip() for s in scen_part.split(",") if s.strip()]
            kinds = [c.strip() for c in crit_part.split(",") if c.strip()]
        except ValueError:
            raise CliError("usage", "grid must look like 'normal,fast:I,A'")
        cells = []
        for s in scenarios:
            if s not in SCENARIOS:
                raise CliError("usage", f"unknown scenario {s!r} in grid")
            for kind in kinds:
                cell, out_dir = _run_cell(s, kind, args, args.seed)
                cells.append({"cell": cell, "out": str(out_dir)})
        _emit(args, {"cells": cells}, "\n".join(c["cell"] + " -> " + c["out"] for c in cells))
        return 0
    if not args.scenario:
        raise CliError("usage", "either --scenario or --grid is required")
    cell, out_dir = _run_cell(args.scenario, args.criterion, args, args.seed)
    bundle_path = out_dir / "bundle.json"
    _emit(
        args,
        {"cell": cell, "out": str(out_dir), "bundle": str(bundle_path)},
        f"{cell}: artifacts in {out_dir}",
    )
    return 0


def cmd_anneal(args) -> int:
    params = _params_from_args(args)
    grid = TimeGrid.full(args.space)
    data = simulate_counts(params, grid, args.seed)
    cfg = AnnealConfig(
        size=args.size,
        iterations=args.iterations,
        t0=args.t0,
        alpha=args.alpha,
        criterion=Criterion(args.criterion),
        mh=_mh_from_args(args),
        priors=_priors_from_args(args),
        n0=args.n0,
        seed=args.seed,
    )
    result = simulated_annealing(data, cfg)
    payload = {
        "best_design": list(result.best.days),
        "best_energy": result.best_energy,
        "initial_design": list(result.initial.days),
        "t0": result.t0,
        "iterations": args.iterations,
        "energy_evaluations": result.evaluations,
    }
    lines = [
        f"annealed design {list(result.best.days)} energy {result.best_energy:.6g}",
    ]
    if args.oracle:
        best, best_energy, _ = exhaustive_minimum(data, cfg)
        payload["exhaustive_design"] = list(best.days)
        payload["exhaustive_energy"] = best_energy
        lines.append(f"exhaustive design {list(best.days)} energy {best_energy:.6g}")
        gap = (result.best_energy - best_energy) / best_energy if best_energy else 0.0
        payload["relative_gap"] = gap
        lines.append(f"relative gap {gap:.4%}")
    if args.out:
        canonical_dump(payload, args.out)
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_frequencies(args) -> int:
    params = scenario(args.scenario, n0=args.n0)
    source = SimulatedSource(params, args.seed)
    initial_days = tuple(int(d) for d in args.initial_days.split(","))
    data = Dataset(())
    for day in initial_days:
        data = data.append(day, source.count(day))
    priors = _priors_from_args(args)
    post = mh_sample(
        data,
        priors,
        _mh_from_args(args),
        n0=args.n0,
        seed=args.seed,
        seed_path=(Stream.FIT, len(data)),
    )
    window = tuple(range(data.last_day() + 1, data.last_day() + 1 + args.window))
    table = selection_frequencies(
        args.kind,
        post,
        data,
        window,
        n0=args.n0,
        priors=priors,
        replicates=args.replicates,
        draws=args.draws,
        refit=args.refit,
        seed=args.seed,
        pred_days=tuple(range(1, args.season + 1)),
    )
    if args.out:
        table_to_csv(table, args.out)
    rows = table.to_rows()
    text = "\n".join(
        f"day {row['day']:>3}  score {row['score']:.6g}  p {row['probability']:.3f}"
        for row in rows
    )
    _emit(args, {"window": list(table.days), "rows": rows}, text)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    addr = args.addr or os.environ.get(ENV_ADDR, "127.0.0.1:8000")
    try:
        host, port_text = addr.rsplit(":", 1)
        port = int(port_text)
    except ValueError:
        raise CliError("usage", f"address must look like host:port, got {addr!r}")
    app = create_app(data_dir=args.data_dir, latency_budget=args.latency_budget)
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0


def cmd_replay(args) -> int:
    path = Path(args.log)
    if not path.exists():
        raise CliError("io-error", f"log file {path} does not exist")
    try:
        state = replay_log(path)
    except Exception as exc:
        raise CliError("parse-error", f"could not replay {path}: {exc}") from exc
    snapshot = state.to_dict()
    if args.out:
        canonical_dump(snapshot, args.out)
    print(canonical_dumps(snapshot))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqdes",
        description="Sequential Bayesian design of population-sampling schedules",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw Poisson counts around a logistic mean curve")
    _add_model_flags(p)
    p.add_argument("--days", type=int, default=DEFAULT_SEASON)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output path (.csv or .json)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="sample the posterior for an observed dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--n0", type=float, default=DEFAULT_START)
    _add_prior_flags(p)
    _add_mh_flags(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-draws")
    p.add_argument("--out-summary")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("sequential", help="run the forward sequential design loop")
    p.add_argument("--scenario", choices=sorted(SCENARIOS))
    p.add_argument("--criterion", default="I")
    p.add_argument("--grid", help="batch cells, e.g. 'normal,fast:I,A'")
    p.add_argument("--mode", choices=("sequential", "anneal"), default="sequential")
    p.add_argument("--budget", type=int, default=10)
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--season", type=int, default=DEFAULT_SEASON)
    p.add_argument("--initial-days", default="1,2,3")
    p.add_argument("--n0", type=float, default=DEFAULT_START)
    p.add_argument("--draws", type=int, default=200, help="predictive draws per utility score")
    p.add_argument("--refit", choices=("importance", "full-mh"), default="importance")
    _add_prior_flags(p)
    _add_mh_flags(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", default="runs")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_sequential)

    p = sub.add_parser("anneal", help="subset-selection annealing over a simulated season")
    _add_model_flags(p)
    p.add_argument("--space", type=int, default=DEFAULT_SEASON, help="season length")
    p.add_argument("--size", type=int, required=True, help="design size")
    p.add_argument("--iterations", type=int, default=2000)
    p.add_argument("--alpha", type=float, default=0.95)
    p.add_argument("--t0", type=float)
    p.add_argument("--criterion", default="A")
    p.add_argument("--oracle", action="store_true", help="also enumerate the exact optimum")
    _add_prior_flags(p)
    _add_mh_flags(p, kept=2000, burn=500)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_anneal)

    p = sub.add_parser("frequencies", help="selection frequencies over a candidate window")
    p.add_argument("--scenario", choices=sorted(SCENARIOS), required=True)
    p.add_argument("--kind", default="UI")
    p.add_argument("--replicates", type=int, default=500)
    p.add_argument("--draws", type=int, default=200)
    p.add_argument("--refit", choices=("importance", "full-mh"), default="importance")
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--initial-days", default="1,2,3")
    p.add_argument("--season", type=int, default=DEFAULT_SEASON)
    p.add_argument("--n0", type=float, default=DEFAULT_START)
    _add_prior_flags(p)
    _add_mh_flags(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_frequencies)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--addr", help=f"host:port (default env {ENV_ADDR} or 127.0.0.1:8000)")
    p.add_argument("--data-dir", help=f"session log directory (default env {ENV_DATA_DIR})")
    p.add_argument("--latency-budget", type=float, default=2.0)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("replay", help="rebuild a session snapshot from its event log")
    p.add_argument("--log", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_replay)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", None) is not None and args.seed < 0:
        parser.error("seed must be non-negative")
    try:
        return args.func(args)
    except CliError as exc:
        if exc.code == "usage":
            parser.error(str(exc))
        print(canonical_dumps({"code": exc.code, "message": str(exc)}), file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(canonical_dumps({"code": "runtime-error", "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
