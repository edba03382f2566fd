"""Weights as 32-bit genes, and why the top bits stay frozen.

Run: python3 demos/01_gene_codec.py
"""

import numpy as np

from neurogenetic import float_codec as fc
from neurogenetic.ga import crossover, mutate

# A weight is stored as its binary32 bit pattern.
for w in (0.75, -1.25, 1.5):
    bits = fc.encode_gene(w)
    sign, exponent, mantissa = fc.split_fields(bits)
    print(f"{w:+.4f} -> {fc.gene_hex(bits)}  sign={sign} exponent={exponent} mantissa={mantissa:#08x}")

# Operators only touch the low bits. With three protected MSBs that is bits 0..28.
print("mutable bits (3 protected):", fc.mutable_bit_indices(3))
print("mutable bits (2 protected):", fc.mutable_bit_indices(2))

# Flipping an unprotected exponent bit of 1.5 can at most push it towards 2,
# since bit 30 (the exponent MSB) is zero for every |w| < 2 and never changes.
rng = np.random.default_rng(0)
genes = fc.encode_genes(rng.uniform(-1.5, 1.5, 100_000))
for _ in range(20):
    a, b = crossover(genes, genes[rng.permutation(genes.size)], 0.8, 3, rng)
    genes = mutate(a, 0.5, 3, rng)
values = fc.decode_genes(genes)
print(f"after 20 rounds: all finite={np.isfinite(values).all()}, max |w|={np.abs(values).max():.6f}")

# Without that protection a single flip of bit 30 turns 1.5 into NaN.
unsafe = fc.encode_gene(1.5) | (1 << 30)
print(f"1.5 with bit 30 set -> exponent field {fc.split_fields(unsafe)[1]} (255 means NaN/Inf)")
