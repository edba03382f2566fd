"""Exception hierarchy shared by all modules."""


class NeuroGeneticError(Exception):
    """Base class for every error raised by this package."""


class CodecError(NeuroGeneticError, ValueError):
    """A value cannot be encoded, or a gene pattern decodes to NaN/Inf."""


class ContractError(NeuroGeneticError, ValueError):
    """Arguments violate an operation's preconditions (shapes, ranges, ...)."""


class ConfigError(ContractError):
    """Invalid GA, topology or sweep configuration."""


class DataError(NeuroGeneticError, ValueError):
    """Malformed or out-of-range sensor data."""


class InvariantError(NeuroGeneticError, RuntimeError):
    """An internal invariant was violated; indicates a bug, not bad input."""
