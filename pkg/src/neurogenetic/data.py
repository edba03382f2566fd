"""Gas-sensor samples: CSV I/O, global-max normalization, patterns and splits.

Concentrations and responses are each scaled by a single global maximum
(over every sample and every gas), and network outputs map back to ppm by
multiplying with the concentration maximum.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError
from .mlp import Pattern

GAS_NAMES = ("NH3", "CO", "H2S", "NO2", "CH4")
CSV_HEADER = (
    "nh3_ppm", "co_ppm", "h2s_ppm", "no2_ppm", "ch4_ppm",
    "nh3_r", "co_r", "h2s_r", "no2_r", "ch4_r",
)  # fmt: skip
N_GASES = len(GAS_NAMES)


@dataclass(frozen=True)
class RawSample:
    """Known mixture (ppm) and the array's change ratios Rs/R0, in gas order."""

    concentrations_ppm: tuple[float, ...]
    responses: tuple[float, ...]

    def __post_init__(self):
        conc = tuple(float(v) for v in self.concentrations_ppm)
        resp = tuple(float(v) for v in self.responses)
        if len(conc) != N_GASES or len(resp) != N_GASES:
            raise DataError(f"a sample needs {N_GASES} concentrations and {N_GASES} responses")
        if not all(math.isfinite(v) and v >= 0 for v in conc + resp):
            raise DataError("sample values must be finite and nonnegative")
        object.__setattr__(self, "concentrations_ppm", conc)
        object.__setattr__(self, "responses", resp)


@dataclass(frozen=True)
class NormalizationContext:
    c_max: float
    r_max: float

    def __post_init__(self):
        if not (self.c_max > 0 and self.r_max > 0):
            raise DataError("c_max and r_max must be positive")

    @classmethod
    def from_samples(cls, samples: Sequence[RawSample]) -> "NormalizationContext":
        if not samples:
            raise DataError("cannot derive maxima from an empty sample list")
        return cls(
            c_max=max(max(s.concentrations_ppm) for s in samples),
            r_max=max(max(s.responses) for s in samples),
        )


@dataclass(frozen=True)
class Dataset:
    samples: tuple[RawSample, ...]
    context: NormalizationContext | None = None
    gas_names: tuple[str, ...] = field(default=GAS_NAMES)

    def __post_init__(self):
        samples = tuple(self.samples)
        object.__setattr__(self, "samples", samples)
        if len(self.gas_names) != N_GASES:
            raise DataError(f"expected {N_GASES} gas names")
        if not samples:
            if self.context is None:
                object.__setattr__(self, "context", None)
            return
        actual = NormalizationContext.from_samples(samples)
        if self.context is None:
            object.__setattr__(self, "context", actual)
        elif self.context != actual:
            raise DataError(f"context {self.context} does not match sample maxima {actual}")

    def __len__(self):
        return len(self.samples)

    def concentrations(self) -> np.ndarray:
        return np.array([s.concentrations_ppm for s in self.samples], dtype=np.float64)

    def responses(self) -> np.ndarray:
        return np.array([s.responses for s in self.samples], dtype=np.float64)


def normalize_concentration(c: float, ctx: NormalizationContext) -> float:
    if not 0 <= c <= ctx.c_max:
        raise DataError(f"concentration {c} outside [0, {ctx.c_max}]")
    return c / ctx.c_max


def normalize_response(r: float, ctx: NormalizationContext) -> float:
    if not 0 <= r <= ctx.r_max:
        raise DataError(f"response {r} outside [0, {ctx.r_max}]")
    return r / ctx.r_max


def normalize_field_responses(responses, ctx: NormalizationContext) -> np.ndarray:
    """Normalize deployment-time responses, clamping anything above ``r_max``."""
    r = np.asarray(responses, dtype=np.float64)
    if np.any(r < 0) or not np.all(np.isfinite(r)):
        raise DataError("responses must be finite and nonnegative")
    return clamp_unit(r / ctx.r_max, what="normalized response")


def clamp_unit(values, what="value") -> np.ndarray:
    """Clamp normalized inputs above 1.0, warning once per call."""
    v = np.asarray(values, dtype=np.float64)
    if np.any(v > 1.0):
        warnings.warn(f"{what} above 1.0 clamped (beyond the training maximum)", stacklevel=2)
        v = np.minimum(v, 1.0)
    return v


def denormalize(network_output, ctx: NormalizationContext):
    """Network output (normalized) to ppm."""
    return network_output * ctx.c_max


def normalized_table(d: Dataset) -> np.ndarray:
    """``(n, 10)`` array: normalized concentrations then normalized responses."""
    if not d.samples:
        return np.empty((0, 2 * N_GASES))
    return np.hstack([d.concentrations() / d.context.c_max, d.responses() / d.context.r_max])


def build_patterns(d: Dataset) -> list[Pattern]:
    """One pattern per sample: normalized responses in, normalized mixture out."""
    return [
        Pattern(
            input=[normalize_response(r, d.context) for r in s.responses],
            target=[normalize_concentration(c, d.context) for c in s.concentrations_ppm],
        )
        for s in d.samples
    ]


def split(patterns: Sequence, train_fraction: float, rng_seed: int):
    """Seeded shuffle, then the first ``ceil(fraction * n)`` patterns go to training.

    The training share is capped at ``n - 1`` so the test list is never empty.
    """
    n = len(patterns)
    if n < 2:
        raise DataError("need at least 2 patterns to split")
    if not 0 < train_fraction < 1:
        raise DataError("train_fraction must lie strictly between 0 and 1")
    # the epsilon keeps 0.8 * 10 from rounding up to 9
    n_train = min(max(math.ceil(train_fraction * n - 1e-9), 1), n - 1)
    order = np.random.default_rng(rng_seed).permutation(n)
    train = [patterns[i] for i in order[:n_train]]
    test = [patterns[i] for i in order[n_train:]]
    return train, test


def _read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            yield lineno, row


def load_dataset(path) -> Dataset:
    rows = _read_rows(path)
    try:
        lineno, header = next(rows)
    except StopIteration:
        raise DataError(f"{path}: empty file") from None
    if tuple(h.strip() for h in header) != CSV_HEADER:
        raise DataError(f"{path}:{lineno}: unexpected header {header}")
    samples = []
    for lineno, row in rows:
        if len(row) != len(CSV_HEADER):
            raise DataError(
                f"{path}: row {lineno} has {len(row)} columns, expected {len(CSV_HEADER)}"
            )
        try:
            values = [float(v) for v in row]
        except ValueError as exc:
            raise DataError(f"{path}: row {lineno}: {exc}") from None
        if any(v < 0 or not math.isfinite(v) for v in values):
            raise DataError(f"{path}: row {lineno}: values must be finite and nonnegative")
        samples.append(RawSample(values[:N_GASES], values[N_GASES:]))
    return Dataset(tuple(samples))


def _fmt(v: float) -> str:
    return repr(float(v))


def save_dataset(d: Dataset, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for s in d.samples:
            writer.writerow([_fmt(v) for v in s.concentrations_ppm + s.responses])


def normalized_csv(d: Dataset) -> str:
    lines = [",".join(CSV_HEADER)]
    lines += [",".join(_fmt(v) for v in row) for row in normalized_table(d)]
    return "\n".join(lines) + "\n"


def save_normalized(d: Dataset, path) -> None:
    Path(path).write_text(normalized_csv(d), encoding="utf-8")


def fixture_path(name: str) -> Path:
    """Filesystem path of a bundled fixture file."""
    return Path(str(resources.files("neurogenetic") / "fixtures" / name))


def load_calibration() -> Dataset:
    return load_dataset(fixture_path("calibration_samples.csv"))


def load_calibration_normalized() -> np.ndarray:
    rows = list(_read_rows(fixture_path("calibration_normalized.csv")))[1:]
    return np.array([[float(v) for v in row] for _, row in rows])


def load_worked_detection():
    """The worked detection example: (inputs, network outputs, printed ppm strings)."""
    rows = list(_read_rows(fixture_path("worked_detection.csv")))[1:]
    inputs = np.array([float(r[1]) for _, r in rows])
    outputs = np.array([float(r[2]) for _, r in rows])
    printed = [r[3] for _, r in rows]
    return inputs, outputs, printed


def load_limits(path) -> dict[str, float]:
    """Read a ``gas,limit_ppm`` CSV; ``#`` lines are comments."""
    rows = _read_rows(path)
    try:
        lineno, header = next(rows)
    except StopIteration:
        raise DataError(f"{path}: empty limits file") from None
    if [h.strip() for h in header] != ["gas", "limit_ppm"]:
        raise DataError(f"{path}:{lineno}: expected header gas,limit_ppm")
    limits = {}
    for lineno, row in rows:
        if len(row) != 2:
            raise DataError(f"{path}: row {lineno} needs 2 columns")
        gas = row[0].strip()
        if gas not in GAS_NAMES:
            raise DataError(f"{path}: row {lineno}: unknown gas {gas!r}")
        try:
            limits[gas] = float(row[1])
        except ValueError as exc:
            raise DataError(f"{path}: row {lineno}: {exc}") from None
    return limits
