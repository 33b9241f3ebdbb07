"""Deterministic dyadic-rational approximations of log2 and sqrt.

Parameter formulas in the sparsification pipeline evaluate logarithms and
square roots as rationals with denominator 2^PRECISION_BITS, computed with
integer arithmetic only.  The values feed floors, mins and sampling
probabilities, so a platform-independent fixed rounding is all that is
required.
"""

from __future__ import annotations

import math
from fractions import Fraction

PRECISION_BITS = 20
_MANTISSA_BITS = 64


def log2_dyadic(x: Fraction | int, bits: int = PRECISION_BITS) -> Fraction:
    """floor(log2(x) * 2^bits) / 2^bits for x > 0."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("log2 needs a positive argument")
    num, den = x.numerator, x.denominator
    ipart = num.bit_length() - den.bit_length()
    # Adjust so that 2^ipart <= x < 2^(ipart + 1).
    if ipart >= 0:
        if num < (den << ipart):
            ipart -= 1
    else:
        if (num << -ipart) < den:
            ipart -= 1
    # Fixed-point mantissa of x / 2^ipart in [1, 2).
    if ipart >= 0:
        mant = (num << _MANTISSA_BITS) // (den << ipart)
    else:
        mant = ((num << -ipart) << _MANTISSA_BITS) // den
    frac = 0
    one = 1 << _MANTISSA_BITS
    for _ in range(bits):
        mant = (mant * mant) >> _MANTISSA_BITS
        frac <<= 1
        if mant >= (one << 1):
            mant >>= 1
            frac |= 1
    return Fraction((ipart << bits) + frac, 1 << bits)


def sqrt_dyadic(x: Fraction | int, bits: int = PRECISION_BITS) -> Fraction:
    """floor(sqrt(x) * 2^bits) / 2^bits for x >= 0."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("sqrt needs a non-negative argument")
    num, den = x.numerator, x.denominator
    root = math.isqrt(num * den << (2 * bits)) // den
    return Fraction(root, 1 << bits)


def log2_pos(x: Fraction | int, bits: int = PRECISION_BITS) -> Fraction:
    """log2 clamped below at 1; used where a zero log would degenerate."""
    return max(Fraction(1), log2_dyadic(x, bits))


def loglog2_clamped(q: int, bits: int = PRECISION_BITS) -> Fraction:
    """max(1, log2(log2(q))); q = 2 or 3 would otherwise give <= 0."""
    inner = log2_dyadic(q, bits)
    if inner <= 1:
        return Fraction(1)
    return max(Fraction(1), log2_dyadic(inner, bits))
