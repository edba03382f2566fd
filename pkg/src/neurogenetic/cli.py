"""Command-line front end: ``neurogenetic {train,predict,sweep,bench,normalize}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import data, harness
from .errors import ConfigError, ContractError, DataError, InvariantError, NeuroGeneticError
from .ga import GaConfig, TrainingResult, evolve
from .mlp import Topology, sse, weights_from_csv

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_range(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b, got {text!r}") from None
    return a, b


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_ga_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("GA parameters (override --config)")
    g.add_argument("--config", type=Path, help="JSON file with GaConfig fields")
    g.add_argument("--pop", type=int, dest="population_size")
    g.add_argument("--gens", type=int, dest="max_generations")
    g.add_argument("--pc", type=float, dest="crossover_prob")
    g.add_argument("--pm", type=float, dest="mutation_prob")
    g.add_argument("--range", type=_parse_range, dest="init_range", metavar="A:B")
    g.add_argument("--protect", type=int, choices=(2, 3), dest="protected_msb_count")
    g.add_argument("--elite", type=int, dest="elite_count")
    g.add_argument("--target-sse", type=float, dest="target_sse")
    g.add_argument("--seed", type=int, dest="rng_seed")


_GA_FIELDS = (
    "population_size", "max_generations", "crossover_prob", "mutation_prob", "init_range",
    "protected_msb_count", "elite_count", "target_sse", "rng_seed",
)  # fmt: skip


def _ga_config(args, base: GaConfig | None = None) -> GaConfig:
    values = (base or GaConfig()).to_dict()
    if args.config is not None:
        try:
            values.update(json.loads(args.config.read_text()))
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.config}: invalid JSON: {exc}") from None
    for name in _GA_FIELDS:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    return GaConfig.from_dict(values)


def _seeded(cfg: GaConfig) -> GaConfig:
    if cfg.rng_seed is None:
        cfg = cfg.with_seed()
        print(f"seed: {cfg.rng_seed}", file=sys.stderr)
    return cfg


def _topology(args) -> Topology:
    return Topology.parse(args.topology, args.activation)


def _load_dataset(args) -> data.Dataset:
    return data.load_dataset(args.dataset) if args.dataset else data.load_calibration()


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


# -- subcommands ------------------------------------------------------------


def cmd_train(args) -> int:
    cfg = _seeded(_ga_config(args))
    topology = _topology(args)
    patterns = data.build_patterns(_load_dataset(args))
    test = []
    if args.train_fraction is not None:
        patterns, test = data.split(patterns, args.train_fraction, args.split_seed)
    result = evolve(cfg, topology, patterns)
    doc = result.to_dict()
    if test:
        doc["train_patterns"] = len(patterns)
        doc["test_sse"] = sse(topology, result.best_weights, test)
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    print(
        f"{result.terminated_by.value}: best SSE {result.best_sse:.6g} "
        f"after {result.generations_run} generations",
        file=sys.stderr,
    )
    return EXIT_OK


def _load_weights(args) -> tuple[Topology, np.ndarray]:
    text = args.weights.read_text(encoding="utf-8")
    if args.weights.suffix == ".json" or text.lstrip().startswith("{"):
        result = TrainingResult.from_dict(json.loads(text))
        return result.topology, result.best_weights
    return _topology(args), weights_from_csv(text)


def cmd_predict(args) -> int:
    topology, weights = _load_weights(args)
    ctx = _load_dataset(args).context
    if args.raw:
        inputs = data.normalize_field_responses(args.input, ctx)
    else:
        inputs = np.asarray(args.input, dtype=np.float64)
        if np.any(inputs < 0):
            raise DataError("normalized inputs must be nonnegative")
    limits = None
    if args.limits is None:
        warnings.warn("no --limits file given; alarms omitted")
    elif not args.limits.exists():
        warnings.warn(f"limits file {args.limits} not found; alarms omitted")
    else:
        limits = data.load_limits(args.limits)
    report = harness.predict(topology, weights, inputs, ctx, limits)
    print(harness.render_table(report))
    if args.json is not None:
        args.json.write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
    if report.any_alarm:
        alarmed = ", ".join(r.name for r in report.readings if r.alarm)
        print(f"ALARM: safety limit exceeded for {alarmed}")
    return EXIT_OK


_PARAM_ALIASES = {
    "hidden": harness.SweptParameter.HIDDEN_NODES,
    "pop": harness.SweptParameter.POPULATION_SIZE,
    "gens": harness.SweptParameter.GENERATIONS,
    "pc": harness.SweptParameter.CROSSOVER_PROB,
    "pm": harness.SweptParameter.MUTATION_PROB,
    "range": harness.SweptParameter.INIT_RANGE,
}


def cmd_sweep(args) -> int:
    parameter = _PARAM_ALIASES[args.param]
    baseline = _ga_config(args, harness.sweep_baseline(parameter))
    values = args.values or harness.DEFAULT_SWEEP_VALUES[parameter]
    spec = harness.SweepSpec(
        swept_parameter=parameter,
        values=values,
        baseline=baseline,
        topology=_topology(args),
        repetitions=args.reps,
        seed_base=args.seed_base,
    )
    rows = harness.run_sweep(spec, data.build_patterns(_load_dataset(args)), workers=args.workers)
    _emit(harness.sweep_csv(spec, rows), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    base = _ga_config(args)
    records = harness.bench(
        args.t_values,
        args.m_values,
        _topology(args),
        data.build_patterns(_load_dataset(args)),
        base=base,
        seed=base.rng_seed or 0,
        repeats=args.repeats,
    )
    _emit(harness.bench_csv(records), args.out)
    print(f"log-log slope of wall time vs t*m: {harness.fit_loglog_slope(records):.3f}", file=sys.stderr)
    return EXIT_OK


def cmd_normalize(args) -> int:
    d = _load_dataset(args)
    _emit(data.normalized_csv(d), args.out)
    print(f"c_max={d.context.c_max:g} r_max={d.context.r_max:g}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="neurogenetic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, ga=True):
        p.add_argument("--dataset", type=Path, help="sensor CSV (default: bundled calibration samples)")
        p.add_argument("--topology", default="5-3-5")
        p.add_argument("--activation", default="tanh", choices=("tanh", "logistic"),
                       help="hidden-layer activation")  # fmt: skip
        p.add_argument("--out", type=Path)
        if ga:
            _add_ga_flags(p)

    p = sub.add_parser("train", help="train network weights with the GA")
    common(p)
    p.add_argument("--train-fraction", type=float, help="hold out a seeded test split")
    p.add_argument("--split-seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="report ppm and alarms for one response vector")
    common(p, ga=False)
    p.add_argument("--weights", type=Path, required=True, help="train JSON or CSV weight line")
    p.add_argument("--input", type=_parse_floats, required=True, help="5 comma-separated responses")
    p.add_argument("--raw", action="store_true", help="inputs are raw Rs/R0 ratios")
    p.add_argument("--limits", type=Path, help="gas,limit_ppm CSV")
    p.add_argument("--json", type=Path, help="also write the report as JSON")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("sweep", help="repeat training across one parameter's values")
    common(p)
    p.add_argument("--param", choices=sorted(_PARAM_ALIASES), required=True)
    p.add_argument("--values", type=_parse_floats)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bench", help="time runs over a t x m grid")
    common(p)
    p.add_argument("--t-values", type=_parse_ints, default=[250, 500, 1000])
    p.add_argument("--m-values", type=_parse_ints, default=[25, 50, 100])
    p.add_argument("--repeats", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("normalize", help="write the normalized dataset as CSV")
    common(p, ga=False)
    p.set_defaults(func=cmd_normalize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ContractError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (InvariantError, NeuroGeneticError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
