"""Bit-level IEEE-754 binary32 codec for synaptic-weight genes.

A gene is the 32-bit pattern of one weight: sign at bit 31, an 8-bit biased
exponent at bits 30-23 and a 23-bit mantissa at bits 22-0.  Bit index 0 is
the least significant bit.

Genetic operators only touch the low ``32 - protected_msb_count`` bits.  With
the top three bits frozen, a gene whose exponent field starts below 128 can
never reach the all-ones exponent that encodes NaN/Inf.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .errors import CodecError

SIGN_SHIFT = 31
EXPONENT_SHIFT = 23
EXPONENT_MASK = 0xFF
MANTISSA_MASK = 0x7FFFFF
EXPONENT_BIAS = 127
GENE_BITS = 32

_PACK = struct.Struct("<f")
_UNPACK_U32 = struct.Struct("<I")


@dataclass(frozen=True)
class ProtectionPolicy:
    """How many most-significant bits are excluded from crossover/mutation."""

    protected_msb_count: int = 3

    def __post_init__(self):
        if self.protected_msb_count not in (2, 3):
            raise CodecError(
                f"protected_msb_count must be 2 or 3, got {self.protected_msb_count!r}"
            )

    @property
    def mutable_bit_count(self) -> int:
        return GENE_BITS - self.protected_msb_count

    @property
    def mask(self) -> int:
        """Bit mask selecting the mutable range."""
        return (1 << self.mutable_bit_count) - 1


def as_policy(policy: ProtectionPolicy | int) -> ProtectionPolicy:
    if isinstance(policy, ProtectionPolicy):
        return policy
    return ProtectionPolicy(int(policy))


def mutable_bit_indices(policy: ProtectionPolicy | int = 3) -> range:
    """Indices of the bits genetic operators may touch, LSB = 0."""
    return range(as_policy(policy).mutable_bit_count)


def encode_gene(value: float) -> int:
    """Return the binary32 bit pattern of ``value`` as a Python int.

    Doubles that are not exactly representable are rounded to the nearest
    binary32 value.  Raises :class:`CodecError` for NaN, infinities and for
    magnitudes that overflow binary32.
    """
    value = float(value)
    if not math.isfinite(value):
        raise CodecError(f"cannot encode non-finite value {value!r}")
    try:
        packed = _PACK.pack(value)
    except OverflowError as exc:
        raise CodecError(f"{value!r} overflows binary32") from exc
    return _UNPACK_U32.unpack(packed)[0]


def decode_gene(bits: int) -> float:
    """Return the real value of a 32-bit gene pattern.

    Raises :class:`CodecError` if the exponent field is 255 (NaN/Inf), which
    signals a corrupted gene.
    """
    bits = int(bits)
    if not 0 <= bits <= 0xFFFFFFFF:
        raise CodecError(f"gene pattern out of 32-bit range: {bits:#x}")
    if (bits >> EXPONENT_SHIFT) & EXPONENT_MASK == EXPONENT_MASK:
        raise CodecError(f"gene {gene_hex(bits)} decodes to NaN/Inf")
    return _PACK.unpack(_UNPACK_U32.pack(bits))[0]


def split_fields(bits: int) -> tuple[int, int, int]:
    """Split a pattern into ``(sign, exponent, mantissa)`` fields."""
    bits = int(bits)
    return (
        bits >> SIGN_SHIFT,
        (bits >> EXPONENT_SHIFT) & EXPONENT_MASK,
        bits & MANTISSA_MASK,
    )


def join_fields(sign: int, exponent: int, mantissa: int) -> int:
    return (sign << SIGN_SHIFT) | (exponent << EXPONENT_SHIFT) | mantissa


def gene_hex(bits: int) -> str:
    """Debug rendering: 8 uppercase hex digits."""
    return f"{int(bits):08X}"


# Vectorised variants used by the GA on whole populations.


def encode_genes(values) -> np.ndarray:
    """Encode an array of reals into a ``uint32`` array of gene patterns."""
    values = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise CodecError("cannot encode non-finite values")
    with np.errstate(over="ignore"):
        single = values.astype(np.float32)
    if not np.all(np.isfinite(single)):
        raise CodecError("values overflow binary32")
    return single.view(np.uint32)


def exponent_fields(genes) -> np.ndarray:
    genes = np.asarray(genes, dtype=np.uint32)
    return (genes >> np.uint32(EXPONENT_SHIFT)) & np.uint32(EXPONENT_MASK)


def check_finite(genes) -> None:
    """Raise :class:`CodecError` if any pattern has an all-ones exponent."""
    bad = exponent_fields(genes) == EXPONENT_MASK
    if np.any(bad):
        first = np.asarray(genes, dtype=np.uint32)[bad].flat[0]
        raise CodecError(
            f"{int(np.count_nonzero(bad))} gene(s) decode to NaN/Inf, e.g. {gene_hex(first)}"
        )


def decode_genes(genes) -> np.ndarray:
    """Decode a ``uint32`` array of patterns into float64 weights."""
    genes = np.ascontiguousarray(genes, dtype=np.uint32)
    check_finite(genes)
    return genes.view(np.float32).astype(np.float64)
