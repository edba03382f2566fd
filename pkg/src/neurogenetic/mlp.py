"""Fixed-topology feedforward network and its sum-of-squared-error objective.

Weights are held as one flat vector.  The ordering is layer by layer; within
a layer the weights are grouped per destination neuron, each group holding
``fan_in`` input weights followed by the neuron's bias weight.

Output neurons use the logistic sigmoid, so outputs lie in (0, 1).  Hidden
neurons default to tanh: the GA's bit-protection keeps every weight below 2
in magnitude, and with logistic hidden units (slope at most 1/4) such bounded
weights cannot fit the gas patterns well.  ``hidden_activation="logistic"``
is available for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import expit

from .errors import ConfigError, ContractError


HIDDEN_ACTIVATIONS = {"tanh": np.tanh, "logistic": expit}


@dataclass(frozen=True)
class Topology:
    layer_sizes: tuple[int, ...]
    hidden_activation: str = "tanh"

    def __post_init__(self):
        if self.hidden_activation not in HIDDEN_ACTIVATIONS:
            raise ConfigError(
                f"hidden_activation must be one of {sorted(HIDDEN_ACTIVATIONS)}, "
                f"got {self.hidden_activation!r}"
            )
        sizes = tuple(int(s) for s in self.layer_sizes)
        if len(sizes) < 2:
            raise ConfigError("a topology needs at least an input and an output layer")
        if any(s < 1 for s in sizes):
            raise ConfigError(f"layer sizes must be positive, got {sizes}")
        object.__setattr__(self, "layer_sizes", sizes)

    @classmethod
    def parse(cls, text: str, hidden_activation: str = "tanh") -> "Topology":
        """Parse the ``5-3-5`` notation."""
        try:
            sizes = tuple(int(part) for part in text.strip().split("-"))
        except ValueError as exc:
            raise ConfigError(f"bad topology {text!r}; expected e.g. 5-3-5") from exc
        return cls(sizes, hidden_activation)

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_outputs(self) -> int:
        return self.layer_sizes[-1]

    @property
    def weight_count(self) -> int:
        return sum(
            (fan_in + 1) * fan_out
            for fan_in, fan_out in zip(self.layer_sizes[:-1], self.layer_sizes[1:])
        )

    def layer_slices(self):
        """Yield ``(slice, fan_in, fan_out, activation)`` per layer of the flat vector."""
        offset = 0
        hidden = HIDDEN_ACTIVATIONS[self.hidden_activation]
        n_layers = len(self.layer_sizes) - 1
        for k, (fan_in, fan_out) in enumerate(zip(self.layer_sizes[:-1], self.layer_sizes[1:])):
            size = (fan_in + 1) * fan_out
            act = expit if k == n_layers - 1 else hidden
            yield slice(offset, offset + size), fan_in, fan_out, act
            offset += size

    def __str__(self):
        return "-".join(str(s) for s in self.layer_sizes)


def as_topology(topology) -> Topology:
    if isinstance(topology, Topology):
        return topology
    if isinstance(topology, str):
        return Topology.parse(topology)
    return Topology(tuple(topology))


def weight_count(topology) -> int:
    """Total synaptic weights, biases included."""
    return as_topology(topology).weight_count


@dataclass(frozen=True)
class Pattern:
    """One supervised training pair; both vectors are normalized into [0, 1]."""

    input: tuple[float, ...]
    target: tuple[float, ...]

    def __post_init__(self):
        inp = tuple(float(v) for v in self.input)
        tgt = tuple(float(v) for v in self.target)
        for name, vec in (("input", inp), ("target", tgt)):
            if not all(0.0 <= v <= 1.0 for v in vec):
                raise ContractError(f"pattern {name} components must lie in [0, 1]: {vec}")
        object.__setattr__(self, "input", inp)
        object.__setattr__(self, "target", tgt)


def patterns_to_arrays(patterns: Sequence[Pattern], topology=None):
    """Stack patterns into ``(inputs, targets)`` arrays of shape ``(P, n)``."""
    if len(patterns) == 0:
        raise ContractError("pattern list is empty")
    inputs = np.array([p.input for p in patterns], dtype=np.float64)
    targets = np.array([p.target for p in patterns], dtype=np.float64)
    if topology is not None:
        topology = as_topology(topology)
        if inputs.shape[1] != topology.n_inputs or targets.shape[1] != topology.n_outputs:
            raise ContractError(
                f"patterns are {inputs.shape[1]}->{targets.shape[1]} but topology is {topology}"
            )
    return inputs, targets


def _check_weights(topology: Topology, weights) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.shape[-1] != topology.weight_count:
        raise ContractError(
            f"topology {topology} needs {topology.weight_count} weights, got {w.shape[-1]}"
        )
    if not np.all(np.isfinite(w)):
        raise ContractError("weights must be finite")
    return w


def forward(topology, weights, x) -> np.ndarray:
    """Network output for one input vector (or a ``(P, n_in)`` batch)."""
    topology = as_topology(topology)
    w = _check_weights(topology, weights)
    if w.ndim != 1:
        raise ContractError("forward takes a single weight vector; use population_outputs")
    a = np.asarray(x, dtype=np.float64)
    if a.shape[-1] != topology.n_inputs:
        raise ContractError(f"input has {a.shape[-1]} components, expected {topology.n_inputs}")
    for sl, fan_in, fan_out, act in topology.layer_slices():
        layer = w[sl].reshape(fan_out, fan_in + 1)
        a = act(a @ layer[:, :-1].T + layer[:, -1])
    return a


def population_outputs(topology, weight_matrix, inputs) -> np.ndarray:
    """Outputs of ``m`` networks on ``P`` inputs, shape ``(m, P, n_out)``."""
    topology = as_topology(topology)
    w = _check_weights(topology, weight_matrix)
    w = np.atleast_2d(w)
    m = w.shape[0]
    a = np.broadcast_to(np.asarray(inputs, dtype=np.float64), (m,) + np.shape(inputs))
    for sl, fan_in, fan_out, act in topology.layer_slices():
        layer = w[:, sl].reshape(m, fan_out, fan_in + 1)
        a = act(np.matmul(a, layer[:, :, :-1].transpose(0, 2, 1)) + layer[:, None, :, -1])
    return a


def sse_from_outputs(outputs, targets) -> float:
    """``1/2 * sum((O - t)^2)`` over every pattern and output node."""
    outputs = np.asarray(outputs, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if outputs.shape != targets.shape:
        raise ContractError(f"outputs {outputs.shape} and targets {targets.shape} differ")
    if outputs.size == 0:
        raise ContractError("no outputs to score")
    return 0.5 * float(np.sum((outputs - targets) ** 2))


def population_sse(topology, weight_matrix, inputs, targets) -> np.ndarray:
    """SSE of each row of ``weight_matrix`` over the given pattern arrays."""
    out = population_outputs(topology, weight_matrix, inputs)
    return 0.5 * np.sum((out - targets) ** 2, axis=(1, 2))


def sse(topology, weights, patterns: Sequence[Pattern]) -> float:
    """Half the summed squared residual over every pattern and output node."""
    topology = as_topology(topology)
    inputs, targets = patterns_to_arrays(patterns, topology)
    return sse_from_outputs(forward(topology, weights, inputs), targets)


# Checkpoint format: one CSV line of shortest round-trip decimals.


def weights_to_csv(weights) -> str:
    return ",".join(repr(float(v)) for v in weights)


def weights_from_csv(line: str) -> np.ndarray:
    parts = [p.strip() for p in line.strip().split(",") if p.strip()]
    try:
        values = np.array([float(p) for p in parts], dtype=np.float64)
    except ValueError as exc:
        raise ContractError(f"bad weight line: {exc}") from exc
    if not all(math.isfinite(v) for v in values):
        raise ContractError("weight line contains non-finite values")
    return values
