import json
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from neurogenetic import float_codec as fc
from neurogenetic.errors import ConfigError, ContractError, InvariantError
from neurogenetic.ga import (
    GaConfig,
    RouletteWheel,
    Termination,
    TrainingResult,
    crossover,
    evolve,
    fps_select,
    init_population,
    mutate,
    next_generation,
    selection_score,
)

from oracles import bits_differing

SMALL = GaConfig(population_size=20, max_generations=40, target_sse=0.0, rng_seed=7)


# -- config -----------------------------------------------------------------


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(population_size=1),
        dict(max_generations=0),
        dict(crossover_prob=1.5),
        dict(mutation_prob=-0.1),
        dict(init_range=(0.0, 0.0)),
        dict(init_range=(1.0, -1.0)),
        dict(protected_msb_count=1),
        dict(target_sse=-1.0),
        dict(elite_count=100),
        dict(rng_seed=-1),
    ],
)
def test_config_rejects(kwargs):
    with pytest.raises(ConfigError):
        GaConfig(**kwargs)


def test_config_dict_round_trip():
    cfg = GaConfig(population_size=30, init_range=(-0.5, 0.5), rng_seed=3)
    assert GaConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg
    with pytest.raises(ConfigError):
        GaConfig.from_dict({"popsize": 3})


def test_with_seed_draws_once():
    cfg = GaConfig().with_seed()
    assert cfg.rng_seed is not None and cfg.with_seed() is cfg


# -- initialisation -----------------------------------------------------------


def test_init_population_range_and_shape():
    cfg = GaConfig(rng_seed=1)
    pop = init_population(cfg, 38)
    assert pop.shape == (100, 38) and pop.dtype == np.uint32
    w = fc.decode_genes(pop)
    assert np.all((w >= -1.5) & (w <= 1.5))


def test_init_population_deterministic():
    cfg = GaConfig(rng_seed=99)
    assert init_population(cfg, 38).tobytes() == init_population(cfg, 38).tobytes()
    other = init_population(replace(cfg, rng_seed=100), 38)
    assert other.tobytes() != init_population(cfg, 38).tobytes()


# -- selection ----------------------------------------------------------------


def test_selection_score_examples():
    assert selection_score(0.0) == 1.0
    assert selection_score(1.0) == 0.5
    with pytest.raises(ContractError):
        selection_score(-0.1)


def test_selection_score_strictly_decreasing(rng):
    a, b = rng.uniform(0, 100, 1000), rng.uniform(0, 100, 1000)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    keep = lo < hi
    assert np.all(selection_score(lo[keep]) > selection_score(hi[keep]))
    s = selection_score(rng.uniform(0, 1e6, 1000))
    assert np.all((s > 0) & (s <= 1))


def test_fps_single_individual(rng):
    assert all(fps_select([0.3], rng) == 0 for _ in range(50))


@pytest.mark.parametrize(
    "scores, expected", [([3, 1], [0.75, 0.25]), ([1, 1, 1, 1], [0.25] * 4), ([1, 3], [0.25, 0.75])]
)
def test_fps_frequencies(scores, expected, rng):
    picks = fps_select(scores, rng, size=100_000)
    freq = np.bincount(picks, minlength=len(scores)) / picks.size
    np.testing.assert_allclose(freq, expected, atol=0.01)


def test_fps_chi_square(rng):
    scores = np.array([5.0, 1.0, 2.0, 0.5, 1.5])
    picks = fps_select(scores, rng, size=100_000)
    observed = np.bincount(picks, minlength=5)
    expected = scores / scores.sum() * picks.size
    chi2 = float(np.sum((observed - expected) ** 2 / expected))
    assert chi2 < 18.47  # 99.9th percentile, 4 degrees of freedom


def test_wheel_sorts_descending_with_stable_ties():
    wheel = RouletteWheel([1.0, 3.0, 1.0, 3.0])
    assert list(wheel.order) == [1, 3, 0, 2]
    np.testing.assert_allclose(wheel.cumulative, [0.375, 0.75, 0.875, 1.0])


class _FixedDraw:
    def __init__(self, r):
        self.r = r

    def random(self, size=None):
        return self.r if size is None else np.full(size, self.r)


@pytest.mark.parametrize("r, picked", [(0.0, 1), (0.374, 1), (0.375, 3), (0.8, 0), (0.99999, 2)])
def test_wheel_first_accumulated_above_draw(r, picked):
    assert RouletteWheel([1.0, 3.0, 1.0, 3.0]).select(_FixedDraw(r)) == picked


@pytest.mark.parametrize("bad", [[], [1.0, 0.0], [1.0, -2.0], [np.nan]])
def test_fps_rejects_bad_scores(bad, rng):
    with pytest.raises(ContractError):
        fps_select(bad, rng)


# -- crossover / mutation -----------------------------------------------------


def _parents(rng, n=38):
    return fc.encode_genes(rng.uniform(-1.5, 1.5, n)), fc.encode_genes(rng.uniform(-1.5, 1.5, n))


def test_crossover_pc_zero_copies(rng):
    pa, pb = _parents(rng)
    ca, cb = crossover(pa, pb, 0.0, 3, rng)
    assert ca.tobytes() == pa.tobytes() and cb.tobytes() == pb.tobytes()


def test_crossover_identical_parents(rng):
    pa, _ = _parents(rng)
    ca, cb = crossover(pa, pa.copy(), 1.0, 3, rng)
    assert ca.tobytes() == pa.tobytes() and cb.tobytes() == pa.tobytes()


def test_crossover_leaves_parents_untouched(rng):
    pa, pb = _parents(rng)
    a0, b0 = pa.copy(), pb.copy()
    crossover(pa, pb, 1.0, 3, rng)
    assert pa.tobytes() == a0.tobytes() and pb.tobytes() == b0.tobytes()


@pytest.mark.parametrize("protect", [2, 3])
def test_crossover_swaps_low_segment_only(protect, rng):
    pa, pb = _parents(rng, 2000)
    ca, cb = crossover(pa, pb, 1.0, protect, rng)
    # children conserve the bits of the pair at every position
    assert np.all((ca ^ cb) == (pa ^ pb))
    top = np.uint32(~fc.ProtectionPolicy(protect).mask & 0xFFFFFFFF)
    assert np.all((ca & top) == (pa & top)) and np.all((cb & top) == (pb & top))
    # each child gene is a's high part joined with b's low part at a single cut
    for a, b, c in zip(pa[:200], pb[:200], ca[:200]):
        a, b, c = int(a), int(b), int(c)
        assert any(
            c == (a & ~((2 << j) - 1)) | (b & ((2 << j) - 1))
            for j in fc.mutable_bit_indices(protect)
        )


def test_crossover_cut_point_uniform(rng):
    # alternate-bit parents reveal the cut index directly
    n = 60_000
    pa = np.zeros(n, dtype=np.uint32)
    pb = np.full(n, 0x1FFFFFFF, dtype=np.uint32)
    ca, _ = crossover(pa, pb, 1.0, 3, rng)
    cuts = np.log2(ca.astype(np.float64) + 1).round().astype(int) - 1
    freq = np.bincount(cuts, minlength=29) / n
    np.testing.assert_allclose(freq, 1 / 29, atol=0.004)


def test_crossover_shape_mismatch(rng):
    with pytest.raises(ContractError):
        crossover(np.zeros(3, np.uint32), np.zeros(4, np.uint32), 0.5, 3, rng)


def test_crossover_rate(rng):
    pa, pb = np.zeros(50_000, np.uint32), np.full(50_000, 0x1FFFFFFF, np.uint32)
    ca, _ = crossover(pa, pb, 0.8, 3, rng)
    assert np.mean(ca != 0) == pytest.approx(0.8, abs=0.01)


def test_mutate_pm_zero_identity(rng):
    c, _ = _parents(rng)
    assert mutate(c, 0.0, 3, rng).tobytes() == c.tobytes()


@pytest.mark.parametrize("protect", [2, 3])
def test_mutate_pm_one_single_flip_in_range(protect, rng):
    c, _ = _parents(rng, 500)
    out = mutate(c, 1.0, protect, rng)
    allowed = set(fc.mutable_bit_indices(protect))
    for before, after in zip(c, out):
        diff = bits_differing(int(before), int(after))
        assert len(diff) == 1 and diff[0] in allowed


def test_mutate_rate(rng):
    c = np.zeros(100_000, np.uint32)
    assert np.mean(mutate(c, 0.02, 3, rng) != 0) == pytest.approx(0.02, abs=0.002)


@given(st.integers(0, 2**32 - 1))
def test_operator_detects_corrupt_gene(seed):
    rng = np.random.default_rng(seed)
    nan_gene = np.array([0x7FC00000], dtype=np.uint32)
    with pytest.raises(InvariantError):
        mutate(nan_gene, 0.0, 3, rng)


def test_operators_keep_genes_finite_and_below_two(rng):
    pop = fc.encode_genes(rng.uniform(-1.5, 1.5, (400, 38)))
    for _ in range(20):
        a, b = pop[rng.integers(0, 400, 200)], pop[rng.integers(0, 400, 200)]
        ca, cb = crossover(a, b, 0.8, 3, rng)
        pop = np.concatenate([mutate(ca, 0.5, 3, rng), mutate(cb, 0.5, 3, rng)])
        assert np.all(np.abs(fc.decode_genes(pop)) < 2.0)


# -- generational loop ----------------------------------------------------------


@pytest.mark.parametrize("m, elite", [(10, 1), (10, 0), (11, 1), (7, 3), (2, 1)])
def test_next_generation_size_and_elites(m, elite, rng):
    cfg = GaConfig(population_size=m, elite_count=elite)
    pop = fc.encode_genes(rng.uniform(-1, 1, (m, 6)))
    sse_values = rng.uniform(0, 1, m)
    new = next_generation(pop, sse_values, cfg, rng)
    assert new.shape == pop.shape
    order = np.argsort(sse_values, kind="stable")
    assert new[:elite].tobytes() == pop[order[:elite]].tobytes()


def test_immediate_termination(patterns):
    r = evolve(replace(SMALL, target_sse=1e9), [5, 3, 5], patterns)
    assert r.generations_run == 0 and len(r.sse_history) == 1
    assert r.terminated_by is Termination.TARGET_REACHED


def test_budget_termination_and_history(patterns):
    r = evolve(SMALL, [5, 3, 5], patterns)
    assert r.terminated_by is Termination.GENERATION_BUDGET
    assert r.generations_run == 40 and len(r.sse_history) == 41
    assert r.best_sse == min(r.sse_history)
    assert r.evaluations == 20 * 41


def test_elitism_monotone(patterns):
    r = evolve(SMALL, [5, 3, 5], patterns)
    assert np.all(np.diff(r.sse_history) <= 0)


def test_no_elitism_running_min(patterns):
    r = evolve(replace(SMALL, elite_count=0), [5, 3, 5], patterns)
    running = np.minimum.accumulate(r.sse_history)
    assert np.all(np.diff(running) <= 0)
    assert r.best_sse == running[-1]


def test_best_chromosome_reproduces_best_sse(patterns):
    from neurogenetic.mlp import sse

    r = evolve(SMALL, [5, 3, 5], patterns)
    assert sse([5, 3, 5], r.best_weights, patterns) == pytest.approx(r.best_sse, rel=1e-12)


def test_evolve_improves(patterns):
    r = evolve(replace(SMALL, max_generations=100), [5, 3, 5], patterns)
    assert r.best_sse < 0.5 * r.sse_history[0]


def test_evolve_reproducible(patterns):
    a = evolve(SMALL, [5, 3, 5], patterns)
    b = evolve(SMALL, [5, 3, 5], patterns)
    assert a.to_json() == b.to_json()
    c = evolve(replace(SMALL, rng_seed=8), [5, 3, 5], patterns)
    assert c.to_json() != a.to_json()


def test_target_reached_stops_early(patterns):
    r0 = evolve(SMALL, [5, 3, 5], patterns)
    target = r0.sse_history[10]
    r = evolve(replace(SMALL, target_sse=target), [5, 3, 5], patterns)
    assert r.terminated_by is Termination.TARGET_REACHED
    assert r.generations_run <= 10 and r.best_sse <= target


def test_closure_violation_detected(patterns, monkeypatch):
    import neurogenetic.ga as ga

    def escape(population, sse_values, cfg, rng):
        out = population.copy()
        out[0, 0] = fc.encode_gene(3.0)
        return out

    monkeypatch.setattr(ga, "next_generation", escape)
    with pytest.raises(InvariantError):
        evolve(SMALL, [5, 3, 5], patterns)


def test_result_json_round_trip(patterns):
    r = evolve(SMALL, [5, 3, 5], patterns)
    doc = json.loads(r.to_json())
    assert set(doc) >= {"config", "sse_history", "best_weights", "best_genes_hex"}
    assert all(len(h) == 8 and h == h.upper() for h in doc["best_genes_hex"])
    back = TrainingResult.from_dict(doc)
    assert back.to_json() == r.to_json()
    np.testing.assert_array_equal(back.best_weights, doc["best_weights"])
