"""Average final SSE as one GA parameter varies.

Run: python3 demos/04_parameter_sweep.py   (about a minute)
"""

from dataclasses import replace

from neurogenetic import harness
from neurogenetic.data import build_patterns, load_calibration
from neurogenetic.harness import SweepSpec, SweptParameter

patterns = build_patterns(load_calibration())

# Each sweep starts from a reference configuration and always runs the full
# generation budget. A shorter budget keeps the demo quick.
baseline = replace(harness.sweep_baseline(SweptParameter.POPULATION_SIZE), max_generations=300)
spec = SweepSpec(SweptParameter.POPULATION_SIZE, [10, 30, 100], baseline, repetitions=5)
rows = harness.run_sweep(spec, patterns)
print(harness.sweep_csv(spec, rows))

# Hidden-layer width is swept the same way.
baseline = replace(harness.sweep_baseline(SweptParameter.HIDDEN_NODES), max_generations=300)
spec = SweepSpec(SweptParameter.HIDDEN_NODES, [2, 3, 5], baseline, repetitions=5)
print(harness.sweep_csv(spec, harness.run_sweep(spec, patterns)))
