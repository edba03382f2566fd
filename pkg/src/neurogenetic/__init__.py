"""Neuro-genetic training of small feedforward networks for gas-mixture detection.

Weights are encoded as IEEE-754 binary32 genes and evolved by a genetic
algorithm whose bit operators leave the top bits of every gene untouched.
"""

from .errors import (
    CodecError,
    ConfigError,
    ContractError,
    DataError,
    InvariantError,
    NeuroGeneticError,
)
from .float_codec import ProtectionPolicy, decode_gene, encode_gene, mutable_bit_indices
from .ga import (
    GaConfig,
    RouletteWheel,
    Termination,
    TrainingResult,
    crossover,
    evolve,
    fps_select,
    init_population,
    mutate,
    selection_score,
)
from .mlp import Pattern, Topology, forward, sse, weight_count
from .data import (
    Dataset,
    NormalizationContext,
    RawSample,
    build_patterns,
    denormalize,
    load_dataset,
    load_calibration,
    normalize_concentration,
    normalize_response,
    save_dataset,
    split,
)

__version__ = "0.1.0"
