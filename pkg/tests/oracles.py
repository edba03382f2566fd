"""Independent reference implementations used only by the tests.

Nothing here imports the package's numeric code, so agreement with these
oracles is a genuine cross-check rather than a tautology.
"""

import math
from fractions import Fraction


def reference_decode(bits: int) -> float:
    """Decode a binary32 pattern with plain integer/Fraction arithmetic.

    Normal numbers: (-1)^S * 2^(E-127) * 1.M; subnormals: (-1)^S * 2^-126 * 0.M.
    """
    sign = (bits >> 31) & 1
    exponent = (bits >> 23) & 0xFF
    mantissa = bits & 0x7FFFFF
    if exponent == 0xFF:
        raise ValueError("NaN/Inf pattern")
    if exponent == 0:
        magnitude = Fraction(mantissa, 1 << 23) * Fraction(1, 1 << 126)
    else:
        significand = 1 + Fraction(mantissa, 1 << 23)
        shift = exponent - 127
        scale = Fraction(1 << shift) if shift >= 0 else Fraction(1, 1 << -shift)
        magnitude = significand * scale
    value = float(magnitude)
    return -value if sign else value


def logistic(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-x))


def loop_forward(layer_sizes, weights, x, hidden="tanh"):
    """Per-neuron loop forward pass following the flat weight-ordering contract."""
    act_hidden = math.tanh if hidden == "tanh" else logistic
    a = [float(v) for v in x]
    k = 0
    n_layers = len(layer_sizes) - 1
    for layer in range(n_layers):
        fan_in, fan_out = layer_sizes[layer], layer_sizes[layer + 1]
        act = logistic if layer == n_layers - 1 else act_hidden
        nxt = []
        for _ in range(fan_out):
            total = 0.0
            for i in range(fan_in):
                total += weights[k] * a[i]
                k += 1
            total += weights[k]  # bias, last in the neuron's group
            k += 1
            nxt.append(act(total))
        a = nxt
    assert k == len(weights)
    return a


def loop_sse(layer_sizes, weights, inputs, targets, hidden="tanh"):
    total = 0.0
    for x, t in zip(inputs, targets):
        out = loop_forward(layer_sizes, weights, x, hidden)
        total += sum((o - ti) ** 2 for o, ti in zip(out, t))
    return 0.5 * total


def bits_differing(a: int, b: int) -> list[int]:
    diff = a ^ b
    return [i for i in range(32) if diff >> i & 1]
