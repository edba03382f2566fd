"""Train a 5-3-5 network on the bundled calibration samples.

Run: python3 demos/02_train_network.py
"""

import numpy as np

from neurogenetic import GaConfig, evolve, sse
from neurogenetic.data import build_patterns, load_calibration, split

dataset = load_calibration()
print(f"{len(dataset)} samples, c_max={dataset.context.c_max:g} ppm, r_max={dataset.context.r_max:g}")

patterns = build_patterns(dataset)
print("first pattern input :", np.round(patterns[0].input, 4))
print("first pattern target:", patterns[0].target)

# A fixed seed makes the whole run reproducible bit for bit.
cfg = GaConfig(population_size=100, max_generations=1000, crossover_prob=0.8, mutation_prob=0.02,
               target_sse=0.01, rng_seed=7)  # fmt: skip
result = evolve(cfg, "5-3-5", patterns)
print(f"{result.terminated_by.value} after {result.generations_run} generations, best SSE {result.best_sse:.4f}")
for g in (0, 10, 100, len(result.sse_history) - 1):
    print(f"  generation {g:4d}: best SSE {result.sse_history[g]:.4f}")

# Hold out two samples to see how the network does on data it never saw.
train, test = split(patterns, 0.8, rng_seed=0)
held = evolve(cfg, "5-3-5", train)
print(f"train SSE {held.best_sse:.4f} on {len(train)}, test SSE {sse('5-3-5', held.best_weights, test):.4f} on {len(test)}")

# The result serializes to JSON with the weights as decimals and as hex genes.
print(result.to_json()[:300], "...")
