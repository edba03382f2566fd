"""From a sensor reading to per-gas ppm values and alarms.

Run: python3 demos/03_detection_report.py
"""

from neurogenetic import GaConfig, evolve, harness
from neurogenetic.data import (
    build_patterns,
    fixture_path,
    load_calibration,
    load_limits,
    load_worked_detection,
    normalize_field_responses,
)

# The worked example: network outputs times c_max give the printed ppm.
dataset = load_calibration()
inputs, outputs, printed = load_worked_detection()
report = harness.build_report(inputs, outputs, dataset.context)
print(harness.render_table(report))
print("expected:", " ".join(printed))
print()

# The bundled limits are placeholders; replace them before trusting alarms.
limits = load_limits(fixture_path("safety_limits_sample.csv"))

# Train a network, then feed it a raw field reading (Rs/R0 ratios).
result = evolve(GaConfig(rng_seed=3), "5-3-5", build_patterns(dataset))
raw = [0.1715, 0.1798, 0.0883, 0.0705, 0.3000]
x = normalize_field_responses(raw, dataset.context)
report = harness.predict(result.topology, result.best_weights, x, dataset.context, limits)
print(harness.render_table(report))
print("any alarm:", report.any_alarm)
