"""Genetic algorithm over bit-encoded weight chromosomes.

A chromosome is a ``uint32`` array with one binary32 gene per network weight.
Populations are ``(m, N)`` arrays.  Selection is fitness proportionate on
``1 / (1 + SSE)``; crossover and mutation act gene by gene on the
unprotected low-order bits only.
"""

from __future__ import annotations

import enum
import json
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np

from . import float_codec as fc
from .errors import ConfigError, ContractError, InvariantError
from .mlp import Pattern, Topology, as_topology, patterns_to_arrays, population_sse


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 100
    max_generations: int = 1000
    crossover_prob: float = 0.8
    mutation_prob: float = 0.02
    init_range: tuple[float, float] = (-1.5, 1.5)
    protected_msb_count: int = 3
    target_sse: float = 0.01
    elite_count: int = 1
    rng_seed: int | None = None

    def __post_init__(self):
        a, b = (float(v) for v in self.init_range)
        object.__setattr__(self, "init_range", (a, b))
        if int(self.population_size) < 2:
            raise ConfigError("population_size must be at least 2")
        if int(self.max_generations) < 1:
            raise ConfigError("max_generations must be at least 1")
        for name in ("crossover_prob", "mutation_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {p}")
        if not (np.isfinite(a) and np.isfinite(b) and a < b):
            raise ConfigError(f"init_range must satisfy a < b, got [{a}, {b}]")
        if self.protected_msb_count not in (2, 3):
            raise ConfigError("protected_msb_count must be 2 or 3")
        if not self.target_sse >= 0.0:
            raise ConfigError("target_sse must be nonnegative")
        if not 0 <= int(self.elite_count) < int(self.population_size):
            raise ConfigError("elite_count must satisfy 0 <= elite_count < population_size")
        if self.rng_seed is not None and not 0 <= int(self.rng_seed) < 2**64:
            raise ConfigError("rng_seed must be a 64-bit unsigned integer")

    @property
    def policy(self) -> fc.ProtectionPolicy:
        return fc.ProtectionPolicy(self.protected_msb_count)

    def with_seed(self) -> "GaConfig":
        """Return a copy with a concrete seed, drawing one from entropy if unset."""
        if self.rng_seed is not None:
            return self
        seed = int(np.random.SeedSequence().entropy) % 2**64
        return replace(self, rng_seed=seed)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["init_range"] = list(self.init_range)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GaConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        if "init_range" in d:
            d["init_range"] = tuple(d["init_range"])
        return cls(**d)


class Termination(str, enum.Enum):
    TARGET_REACHED = "TargetReached"
    GENERATION_BUDGET = "GenerationBudget"


@dataclass
class TrainingResult:
    best_chromosome: np.ndarray
    best_sse: float
    sse_history: list[float]
    generations_run: int
    terminated_by: Termination
    config: GaConfig
    topology: Topology
    evaluations: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def best_weights(self) -> np.ndarray:
        return fc.decode_genes(self.best_chromosome)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "topology": str(self.topology),
            "hidden_activation": self.topology.hidden_activation,
            "terminated_by": self.terminated_by.value,
            "generations_run": self.generations_run,
            "evaluations": self.evaluations,
            "best_sse": self.best_sse,
            "sse_history": list(self.sse_history),
            "best_weights": [float(w) for w in self.best_weights],
            "best_genes_hex": [fc.gene_hex(g) for g in self.best_chromosome],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "TrainingResult":
        genes = np.array([int(h, 16) for h in d["best_genes_hex"]], dtype=np.uint32)
        return cls(
            best_chromosome=genes,
            best_sse=float(d["best_sse"]),
            sse_history=[float(v) for v in d["sse_history"]],
            generations_run=int(d["generations_run"]),
            terminated_by=Termination(d["terminated_by"]),
            config=GaConfig.from_dict(d["config"]),
            topology=Topology.parse(d["topology"], d.get("hidden_activation", "tanh")),
            evaluations=int(d.get("evaluations", 0)),
        )


def init_population(cfg: GaConfig, n_genes: int, rng=None) -> np.ndarray:
    """``m`` chromosomes with genes drawn uniformly from ``cfg.init_range``."""
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    a, b = cfg.init_range
    values = rng.uniform(a, b, size=(cfg.population_size, int(n_genes)))
    return fc.encode_genes(values)


def selection_score(sse):
    """Map SSE (lower is better) to a selection score in (0, 1]."""
    sse = np.asarray(sse, dtype=np.float64)
    if np.any(sse < 0) or np.any(np.isnan(sse)):
        raise ContractError("SSE must be nonnegative")
    score = 1.0 / (1.0 + sse)
    return float(score) if score.ndim == 0 else score


class RouletteWheel:
    """Fitness proportionate selection over a fixed set of positive scores.

    Individuals are ranked by descending score (ties keep their original
    order) and a uniform draw ``R`` in [0, 1) picks the first whose
    accumulated normalized score exceeds ``R``.
    """

    def __init__(self, scores):
        scores = np.asarray(scores, dtype=np.float64)
        if scores.ndim != 1 or scores.size == 0:
            raise ContractError("scores must be a nonempty 1-D sequence")
        if not np.all(np.isfinite(scores)) or np.any(scores <= 0):
            raise ContractError("scores must be finite and strictly positive")
        self.order = np.argsort(-scores, kind="stable")
        self.cumulative = np.cumsum(scores[self.order] / scores.sum())

    def select(self, rng, size=None):
        r = rng.random(size)
        pos = np.searchsorted(self.cumulative, r, side="right")
        # float rounding can leave the last accumulated value just below 1
        pos = np.minimum(pos, self.order.size - 1)
        picked = self.order[pos]
        return int(picked) if size is None else picked


def fps_select(scores, rng, size=None):
    """Index (or ``size`` indices) chosen with probability score_k / sum(scores)."""
    return RouletteWheel(scores).select(rng, size)


def _as_genes(c) -> np.ndarray:
    return np.asarray(c, dtype=np.uint32)


_EXPONENT_BITS = np.uint32(fc.EXPONENT_MASK << fc.EXPONENT_SHIFT)
_ZERO, _ONE = np.uint32(0), np.uint32(1)


def _check_offspring(child):
    if ((child & _EXPONENT_BITS) == _EXPONENT_BITS).any():
        raise InvariantError("genetic operator produced a NaN/Inf gene")


def crossover(pa, pb, p_c: float, policy=3, rng=None):
    """Composite single-point crossover.

    Each gene position crosses independently with probability ``p_c``: a cut
    index ``j`` is drawn uniformly from the mutable bits and bits ``0..j`` are
    swapped between the two children.  Parents are left untouched.
    """
    pa, pb = _as_genes(pa), _as_genes(pb)
    if pa.shape != pb.shape:
        raise ContractError(f"parent shapes differ: {pa.shape} vs {pb.shape}")
    n_bits = fc.as_policy(policy).mutable_bit_count
    crosses = rng.random(pa.shape) < p_c
    cut = rng.integers(0, n_bits, size=pa.shape, dtype=np.uint32)
    masks = ((np.uint32(2) << cut) - _ONE) * crosses
    diff = (pa ^ pb) & masks
    ca, cb = pa ^ diff, pb ^ diff
    _check_offspring(ca)
    _check_offspring(cb)
    return ca, cb


def mutate(c, p_m: float, policy=3, rng=None) -> np.ndarray:
    """With probability ``p_m`` per gene, flip one uniformly chosen mutable bit."""
    c = _as_genes(c)
    n_bits = fc.as_policy(policy).mutable_bit_count
    flips = rng.random(c.shape) < p_m
    bit = rng.integers(0, n_bits, size=c.shape, dtype=np.uint32)
    out = c ^ ((_ONE << bit) * flips)
    _check_offspring(out)
    return out


def next_generation(population: np.ndarray, sse_values, cfg: GaConfig, rng) -> np.ndarray:
    """Elites first, then children of FPS-selected pairs until ``m`` exist.

    If ``m - elite_count`` is odd the second child of the last pair is dropped.
    """
    m, n_elite = cfg.population_size, cfg.elite_count
    order = np.argsort(sse_values, kind="stable")
    wheel = RouletteWheel(selection_score(sse_values))
    policy = cfg.policy
    out = np.empty_like(population)
    out[:n_elite] = population[order[:n_elite]]
    k = n_elite
    while k < m:
        ia, ib = wheel.select(rng, 2)
        ca, cb = crossover(population[ia], population[ib], cfg.crossover_prob, policy, rng)
        out[k] = mutate(ca, cfg.mutation_prob, policy, rng)
        if k + 1 < m:
            out[k + 1] = mutate(cb, cfg.mutation_prob, policy, rng)
        k += 2
    return out


def _closure_bound(cfg: GaConfig) -> float | None:
    # three frozen MSBs keep |w| < 2 forever once every initial gene is below 2
    a, b = cfg.init_range
    if cfg.protected_msb_count == 3 and max(abs(a), abs(b)) < 2.0:
        return 2.0
    return None


def evolve(cfg: GaConfig, topology, patterns: Sequence[Pattern]) -> TrainingResult:
    """Train network weights with the GA until the SSE target or generation budget."""
    cfg = cfg.with_seed()
    topology = as_topology(topology)
    inputs, targets = patterns_to_arrays(patterns, topology)
    rng = np.random.default_rng(cfg.rng_seed)
    bound = _closure_bound(cfg)

    def evaluate(pop):
        weights = fc.decode_genes(pop)
        if bound is not None and np.max(np.abs(weights)) >= bound:
            raise InvariantError("a weight escaped the |w| < 2 closure bound")
        return population_sse(topology, weights, inputs, targets)

    population = init_population(cfg, topology.weight_count, rng)
    scores = evaluate(population)
    evaluations = cfg.population_size
    best_idx = int(np.argmin(scores))
    best_sse = float(scores[best_idx])
    best = population[best_idx].copy()
    history = [best_sse]
    generation = 0

    while True:
        if history[-1] <= cfg.target_sse:
            reason = Termination.TARGET_REACHED
            break
        if generation == cfg.max_generations:
            reason = Termination.GENERATION_BUDGET
            break
        population = next_generation(population, scores, cfg, rng)
        generation += 1
        scores = evaluate(population)
        evaluations += cfg.population_size
        gen_idx = int(np.argmin(scores))
        history.append(float(scores[gen_idx]))
        if history[-1] < best_sse:
            best_sse = history[-1]
            best = population[gen_idx].copy()

    return TrainingResult(
        best_chromosome=best,
        best_sse=best_sse,
        sse_history=history,
        generations_run=generation,
        terminated_by=reason,
        config=cfg,
        topology=topology,
        evaluations=evaluations,
    )
