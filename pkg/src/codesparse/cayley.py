"""Cayley graphs over F_2^k: spectra through codeword weights, and
spectral sparsification by sparsifying the generator code.

The Laplacian eigenvalue indexed by x equals twice the weighted weight of
the codeword G x, where the generators are the rows of G.  Both that
formula and the character sum are computed and compared exactly, so no
numerical eigensolver ever runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .codes import GeneratorMatrix, Sparsifier, as_weight
from .errors import BudgetExceeded, InternalInconsistency
from .field import PrimeField
from .sparsify import final_code_sparsify

_F2 = PrimeField(2)


@dataclass(frozen=True)
class CayleySpec:
    """Dimension k and a weighted set of distinct nonzero generators in
    F_2^k, each encoded as a k-bit integer mask (bit j is coordinate j)."""

    k: int
    generators: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        seen = set()
        norm = []
        for vec, w in self.generators:
            vec = int(vec)
            if not 0 < vec < (1 << self.k):
                raise ValueError(f"generator {vec} outside (0, 2^{self.k})")
            if vec in seen:
                raise ValueError(f"duplicate generator {vec}")
            seen.add(vec)
            norm.append((vec, as_weight(w)))
        object.__setattr__(self, "generators", tuple(norm))

    @property
    def n(self) -> int:
        return len(self.generators)


def generator_code(spec: CayleySpec) -> tuple[GeneratorMatrix, tuple[Fraction, ...]]:
    """Rows are the generators; coordinate weights are their edge weights."""
    rows = np.zeros((spec.n, spec.k), dtype=np.int64)
    for i, (vec, _) in enumerate(spec.generators):
        for j in range(spec.k):
            rows[i, j] = (vec >> j) & 1
    return GeneratorMatrix(_F2, rows), tuple(w for _, w in spec.generators)


def laplacian_spectrum(
    spec: CayleySpec, budget: int = 1 << 24
) -> list[Fraction]:
    """Eigenvalue of the Laplacian for each x in F_2^k, indexed by the
    integer value of x.

    Computed as 2 * weighted weight of the codeword for x, and checked
    exactly against the character sum over generators.
    """
    if (1 << spec.k) > budget:
        raise BudgetExceeded(f"2^{spec.k} eigenvalues exceed the budget {budget}")
    G, weights = generator_code(spec)
    out: list[Fraction] = []
    for x in range(1 << spec.k):
        codeword_weight = Fraction(0)
        character_sum = Fraction(0)
        for (vec, w) in spec.generators:
            parity = bin(vec & x).count("1") & 1
            if parity:
                codeword_weight += w
                character_sum += 2 * w
        lam = 2 * codeword_weight
        if lam != character_sum:
            raise InternalInconsistency("eigenvalue formulas disagree")
        out.append(lam)
    return out


def sparsify_cayley(
    spec: CayleySpec,
    epsilon: Fraction,
    seed: int,
    *,
    eta: Fraction | None = None,
    aggressive: bool = False,
    base_case_multiplier: Fraction = Fraction(100),
) -> CayleySpec:
    """Sparsify the generator code; retained coordinates become the new
    weighted generating set."""
    G, weights = generator_code(spec)
    sp = final_code_sparsify(
        G,
        weights,
        Fraction(epsilon),
        seed,
        eta=eta,
        aggressive=aggressive,
        base_case_multiplier=base_case_multiplier,
    )
    gens = tuple((spec.generators[i][0], w) for i, w in zip(sp.coords, sp.weights))
    return CayleySpec(spec.k, gens)


def spectrum_within(
    original: CayleySpec, sparsified: CayleySpec, epsilon: Fraction
) -> tuple[bool, Fraction]:
    """Whether every eigenvalue is preserved within (1 +/- eps), plus the
    maximum relative deviation; exact rationals throughout."""
    epsilon = Fraction(epsilon)
    lam_g = laplacian_spectrum(original)
    lam_h = laplacian_spectrum(sparsified)
    ok = True
    worst = Fraction(0)
    for a, b in zip(lam_g, lam_h):
        if a == 0:
            if b != 0:
                ok = False
            continue
        err = abs(b - a) / a
        worst = max(worst, err)
        if err > epsilon:
            ok = False
    return ok, worst
