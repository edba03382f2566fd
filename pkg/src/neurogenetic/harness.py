"""Experiment drivers: detection reports, parameter sweeps and scaling benchmarks."""

from __future__ import annotations

import csv
import enum
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .data import GAS_NAMES, NormalizationContext, clamp_unit, denormalize
from .errors import ConfigError, NeuroGeneticError
from .ga import GaConfig, evolve
from .mlp import Pattern, Topology, as_topology, forward


# -- detection report -------------------------------------------------------


@dataclass(frozen=True)
class GasReading:
    name: str
    normalized_input: float
    normalized_output: float
    ppm: float
    safety_limit_ppm: float | None = None

    @property
    def alarm(self) -> bool | None:
        if self.safety_limit_ppm is None:
            return None
        return self.ppm > self.safety_limit_ppm


@dataclass(frozen=True)
class DetectionReport:
    readings: tuple[GasReading, ...]

    @property
    def any_alarm(self) -> bool:
        return any(r.alarm for r in self.readings)

    def to_dict(self) -> dict:
        return {
            "readings": [
                {
                    "gas": r.name,
                    "normalized_input": r.normalized_input,
                    "normalized_output": r.normalized_output,
                    "ppm": r.ppm,
                    "safety_limit_ppm": r.safety_limit_ppm,
                    "alarm": r.alarm,
                }
                for r in self.readings
            ],
            "any_alarm": self.any_alarm,
        }


def build_report(inputs, outputs, ctx: NormalizationContext, limits=None) -> DetectionReport:
    """Turn normalized network outputs into per-gas ppm readings."""
    limits = limits or {}
    readings = []
    for name, x, y in zip(GAS_NAMES, inputs, outputs):
        readings.append(
            GasReading(
                name=name,
                normalized_input=float(x),
                normalized_output=float(y),
                ppm=float(denormalize(float(y), ctx)),
                safety_limit_ppm=limits.get(name),
            )
        )
    return DetectionReport(tuple(readings))


def predict(topology, weights, inputs, ctx: NormalizationContext, limits=None) -> DetectionReport:
    """Run the trained network on one normalized response vector."""
    topology = as_topology(topology)
    x = clamp_unit(inputs, what="input response")
    outputs = forward(topology, weights, x)
    return build_report(x, outputs, ctx, limits)


def format_ppm(ppm: float) -> str:
    """Zero-padded integer ppm, e.g. ``0080``."""
    return f"{int(round(ppm)):04d}"


def render_table(report: DetectionReport, output_digits: int = 3) -> str:
    """Plain-text table: node, input, network output, ppm (+ limit/alarm)."""
    with_limits = any(r.safety_limit_ppm is not None for r in report.readings)
    header = ["node", "gas", "normalized i/p", "n/w actual o/p", "system o/p (ppm)"]
    if with_limits:
        header += ["limit (ppm)", "alarm"]
    rows = [header]
    for k, r in enumerate(report.readings, start=1):
        row = [
            str(k),
            r.name,
            f"{r.normalized_input:.3f}",
            f"{r.normalized_output:.{output_digits}f}",
            format_ppm(r.ppm),
        ]
        if with_limits:
            limit = "-" if r.safety_limit_ppm is None else f"{r.safety_limit_ppm:g}"
            alarm = "-" if r.alarm is None else ("ALARM" if r.alarm else "ok")
            row += [limit, alarm]
        rows.append(row)
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


# -- parameter sweeps -------------------------------------------------------


class SweptParameter(str, enum.Enum):
    HIDDEN_NODES = "HiddenNodes"
    POPULATION_SIZE = "PopulationSize"
    GENERATIONS = "Generations"
    CROSSOVER_PROB = "CrossoverProb"
    MUTATION_PROB = "MutationProb"
    INIT_RANGE = "InitRange"


# Reference settings for each sweep; sweeps always run the full budget.
_SWEEP_BASELINES = {
    SweptParameter.HIDDEN_NODES: dict(crossover_prob=0.7, mutation_prob=0.05),
    SweptParameter.POPULATION_SIZE: dict(crossover_prob=0.7, mutation_prob=0.05),
    SweptParameter.GENERATIONS: dict(crossover_prob=0.7, mutation_prob=0.05),
    SweptParameter.CROSSOVER_PROB: dict(crossover_prob=0.8, mutation_prob=0.05),
    SweptParameter.MUTATION_PROB: dict(crossover_prob=0.8, mutation_prob=0.02),
    SweptParameter.INIT_RANGE: dict(crossover_prob=0.8, mutation_prob=0.03),
}

DEFAULT_SWEEP_VALUES = {
    SweptParameter.HIDDEN_NODES: [2, 3, 4, 5, 6, 7, 8, 9, 10],
    SweptParameter.POPULATION_SIZE: [10, 20, 30, 40, 50, 60, 70, 80, 90, 100],
    SweptParameter.GENERATIONS: [100, 200, 300, 400, 500, 600, 700, 800, 900, 1000],
    SweptParameter.CROSSOVER_PROB: [0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
    SweptParameter.MUTATION_PROB: [0.01, 0.02, 0.03, 0.04, 0.05],
    SweptParameter.INIT_RANGE: [0.5, 1.0, 1.5, 2.0, 2.5, 3.0],
}


_INTEGER_PARAMETERS = frozenset(
    {SweptParameter.HIDDEN_NODES, SweptParameter.POPULATION_SIZE, SweptParameter.GENERATIONS}
)


def sweep_baseline(parameter: SweptParameter | str) -> GaConfig:
    parameter = SweptParameter(parameter)
    return GaConfig(
        population_size=100,
        max_generations=1000,
        init_range=(-1.5, 1.5),
        target_sse=0.0,
        elite_count=1,
        **_SWEEP_BASELINES[parameter],
    )


@dataclass(frozen=True)
class SweepSpec:
    swept_parameter: SweptParameter
    values: tuple
    baseline: GaConfig
    topology: Topology = Topology((5, 3, 5))
    repetitions: int = 10
    seed_base: int = 0

    def __post_init__(self):
        object.__setattr__(self, "swept_parameter", SweptParameter(self.swept_parameter))
        kind = int if self.swept_parameter in _INTEGER_PARAMETERS else float
        object.__setattr__(self, "values", tuple(kind(v) for v in self.values))
        object.__setattr__(self, "topology", as_topology(self.topology))
        if not self.values:
            raise ConfigError("a sweep needs at least one value")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be positive")
        for v in self.values:
            self.configure(v, self.seed_base)

    def configure(self, value, seed: int) -> tuple[GaConfig, Topology]:
        """Baseline with ``value`` applied and the given seed; validates the value."""
        p, cfg, topo = self.swept_parameter, self.baseline, self.topology
        if p is SweptParameter.HIDDEN_NODES:
            topo = Topology((topo.n_inputs, int(value), topo.n_outputs), topo.hidden_activation)
        elif p is SweptParameter.POPULATION_SIZE:
            cfg = replace(cfg, population_size=int(value))
        elif p is SweptParameter.GENERATIONS:
            cfg = replace(cfg, max_generations=int(value))
        elif p is SweptParameter.CROSSOVER_PROB:
            cfg = replace(cfg, crossover_prob=float(value))
        elif p is SweptParameter.MUTATION_PROB:
            cfg = replace(cfg, mutation_prob=float(value))
        elif p is SweptParameter.INIT_RANGE:
            if not float(value) > 0:
                raise ConfigError("init range half-width must be positive")
            cfg = replace(cfg, init_range=(-float(value), float(value)))
        return replace(cfg, rng_seed=int(seed)), topo


@dataclass(frozen=True)
class SweepRow:
    value: object
    mean_sse: float
    std_sse: float
    min_sse: float
    max_sse: float
    runs: int


class SweepRunError(NeuroGeneticError):
    def __init__(self, value, seed, cause):
        super().__init__(f"sweep run failed at value={value!r} seed={seed}: {cause}")
        self.value, self.seed = value, seed


def _run_one(task):
    value, seed, cfg, topo, patterns = task
    try:
        return evolve(cfg, topo, patterns).best_sse
    except Exception as exc:  # noqa: BLE001 - reported with its seed
        raise SweepRunError(value, seed, exc) from exc


def run_sweep(spec: SweepSpec, patterns: Sequence[Pattern], workers: int = 1) -> list[SweepRow]:
    """Mean/std/min/max of the final best SSE over seeded repetitions, per value."""
    tasks = []
    for value in spec.values:
        for seed in range(spec.seed_base, spec.seed_base + spec.repetitions):
            cfg, topo = spec.configure(value, seed)
            tasks.append((value, seed, cfg, topo, list(patterns)))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            finals = list(pool.map(_run_one, tasks))
    else:
        finals = [_run_one(t) for t in tasks]

    rows = []
    finals = np.array(finals).reshape(len(spec.values), spec.repetitions)
    for value, runs in zip(spec.values, finals):
        rows.append(
            SweepRow(
                value=value,
                mean_sse=float(runs.mean()),
                std_sse=float(runs.std()),
                min_sse=float(runs.min()),
                max_sse=float(runs.max()),
                runs=spec.repetitions,
            )
        )
    return rows


def sweep_csv(spec: SweepSpec, rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([spec.swept_parameter.value, "mean_sse", "std_sse", "min_sse", "max_sse", "runs"])
    for r in rows:
        w.writerow([r.value, repr(r.mean_sse), repr(r.std_sse), repr(r.min_sse), repr(r.max_sse), r.runs])
    return buf.getvalue()


# -- scaling benchmark ------------------------------------------------------


@dataclass(frozen=True)
class BenchRecord:
    t: int
    m: int
    n: int
    wall_time: float
    evaluations_count: int


def bench(
    t_values: Sequence[int],
    m_values: Sequence[int],
    topology,
    patterns: Sequence[Pattern],
    base: GaConfig | None = None,
    seed: int = 0,
    repeats: int = 1,
) -> list[BenchRecord]:
    """Time full-budget runs over a grid of generation counts and population sizes.

    Each cell keeps the fastest of ``repeats`` runs to damp scheduler noise.
    """
    topology = as_topology(topology)
    base = base or GaConfig()
    records = []
    for t in t_values:
        for m in m_values:
            cfg = replace(base, max_generations=int(t), population_size=int(m),
                          target_sse=0.0, rng_seed=seed)  # fmt: skip
            best_time = np.inf
            for _ in range(max(1, repeats)):
                start = time.perf_counter()
                result = evolve(cfg, topology, patterns)
                best_time = min(best_time, time.perf_counter() - start)
            records.append(
                BenchRecord(
                    t=result.generations_run,
                    m=int(m),
                    n=topology.weight_count,
                    wall_time=float(best_time),
                    evaluations_count=result.evaluations,
                )
            )
    return records


def fit_loglog_slope(records: Sequence[BenchRecord]) -> float:
    """Least-squares slope of log(wall time) against log(t * m)."""
    x = np.log([r.t * r.m for r in records])
    y = np.log([r.wall_time for r in records])
    return float(np.polyfit(x, y, 1)[0])


def bench_csv(records: Sequence[BenchRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "m", "n", "wall_time", "evaluations_count"])
    for r in records:
        w.writerow([r.t, r.m, r.n, f"{r.wall_time:.6f}", r.evaluations_count])
    return buf.getvalue()
