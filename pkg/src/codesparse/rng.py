"""Seeded splitmix64 randomness with exact rational Bernoulli draws.

Every randomized routine in the package consumes one of these generators.
The contract is: same seed, same draw sequence, on every platform.  Child
generators are derived by hashing (seed, tag) so recursive branches stay
independent and reproducible.
"""

from __future__ import annotations

import math
from fractions import Fraction

_U64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def _mix(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _U64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _U64
    return z ^ (z >> 31)


def derive_seed(seed: int, *tags: int | str) -> int:
    """Hash a parent seed with branch tags into a child seed."""
    acc = _mix(seed & _U64)
    for tag in tags:
        if isinstance(tag, str):
            h = _FNV_OFFSET
            for byte in tag.encode("utf-8"):
                h = ((h ^ byte) * _FNV_PRIME) & _U64
        else:
            h = tag & _U64
        acc = _mix((acc ^ h) & _U64)
    return acc


def dyadic_prob(p: Fraction, bits: int = 64) -> Fraction:
    """Round a probability down to a dyadic rational in (0, 1].

    Sampling uses the rounded value as the true probability, so weights
    1/p stay exact rationals and the estimator stays exactly unbiased.
    """
    if p >= 1:
        return Fraction(1)
    if p <= 0:
        raise ValueError("probability must be positive")
    num = (p.numerator << bits) // p.denominator
    if num == 0:
        num = 1
    return Fraction(num, 1 << bits)


class SplitMix64:
    """The splitmix64 sequence; deterministic for a fixed 64-bit seed."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _U64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _U64
        return _mix(self._state)

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n), unbiased via rejection."""
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        limit = (_U64 + 1) - ((_U64 + 1) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def bernoulli(self, p: Fraction) -> bool:
        """Exact Bernoulli draw for p with a power-of-two denominator.

        For other rationals the threshold is floor(p * 2^64); callers that
        need exactness should pass probabilities through dyadic_prob first.
        """
        if p >= 1:
            return True
        threshold = (p.numerator << 64) // p.denominator
        return self.next_u64() < threshold

    def uniform53(self) -> float:
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def binomial(self, m: int, p: Fraction) -> int:
        """Number of successes among m independent Bernoulli(p) draws.

        Small m sums exact Bernoulli draws.  Large m uses an inverse
        transform walked outward from the mode with lgamma log-pmf terms;
        that path is deterministic for a fixed platform libm.
        """
        if m < 0:
            raise ValueError("m must be >= 0")
        if m == 0 or p <= 0:
            return 0
        if p >= 1:
            return m
        if m <= 1024:
            threshold = (p.numerator << 64) // p.denominator
            return sum(1 for _ in range(m) if self.next_u64() < threshold)
        pf = p.numerator / p.denominator
        log_p = math.log(pf)
        log_q = math.log1p(-pf)
        lg_m1 = math.lgamma(m + 1)

        def log_pmf(j: int) -> float:
            return lg_m1 - math.lgamma(j + 1) - math.lgamma(m - j + 1) + j * log_p + (m - j) * log_q

        u = self.uniform53()
        mode = min(m, int((m + 1) * pf))
        acc = 0.0
        lo = hi = mode
        acc += math.exp(log_pmf(mode))
        if acc > u:
            return mode
        # Alternate outward from the mode; a fixed enumeration order of the
        # support keeps this a faithful categorical sampler.
        while lo > 0 or hi < m:
            if hi < m:
                hi += 1
                acc += math.exp(log_pmf(hi))
                if acc > u:
                    return hi
            if lo > 0:
                lo -= 1
                acc += math.exp(log_pmf(lo))
                if acc > u:
                    return lo
        return mode

    def spawn(self, *tags: int | str) -> "SplitMix64":
        return SplitMix64(derive_seed(self._state, *tags))
