"""Boolean CSP sparsification via affine predicates, plus the complete
classification of ternary Boolean predicates.

A predicate is affine over F_p when its unsatisfying assignments are
exactly the zeros of a_0 + sum a_i b_i mod p.  Affine instances reduce to
a code with one homogenizing column, where the satisfied weight of an
assignment x equals the weighted weight of the codeword for (1, x).  The
ternary classifier runs two exhaustive searches, for an affine projection
onto the two-variable AND and for an affine representation, and checks
that exactly one succeeds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .codes import GeneratorMatrix, Sparsifier, VerificationReport, as_weight
from .errors import (
    ArityTooLarge,
    BudgetExceeded,
    InternalInconsistency,
    MixedPrimes,
    NonAffinePredicate,
)
from .field import PrimeField
from .sparsify import final_code_sparsify

PROJECTION_TOKENS = ("0", "1", "x", "!x", "y", "!y")
_REPRESENTATION_PRIMES = (2, 3, 5, 7)


def assignment_index(bits: tuple[int, ...]) -> int:
    """Index of an assignment read as binary with the first input as the
    most significant bit."""
    idx = 0
    for b in bits:
        idx = (idx << 1) | (b & 1)
    return idx


@dataclass(frozen=True)
class Predicate:
    """An arity-r Boolean predicate as a 2^r-bit truth table mask; bit
    assignment_index(b) holds P(b)."""

    arity: int
    table: int

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError("arity must be at least 1")
        if not 0 <= self.table < (1 << (1 << self.arity)):
            raise ValueError("truth table does not fit the arity")

    @classmethod
    def from_string(cls, bits: str) -> "Predicate":
        size = len(bits)
        if size & (size - 1) or size < 2 or set(bits) - {"0", "1"}:
            raise ValueError(f"truth table string must be 2^r bits of 0/1, got {bits!r}")
        return cls(size.bit_length() - 1, int(bits, 2))

    def to_string(self) -> str:
        return format(self.table, f"0{1 << self.arity}b")

    def satisfied(self, bits: tuple[int, ...]) -> bool:
        if len(bits) != self.arity:
            raise ValueError(f"expected {self.arity} inputs")
        return bool((self.table >> assignment_index(bits)) & 1)

    def satisfying_assignments(self) -> tuple[int, ...]:
        return tuple(i for i in range(1 << self.arity) if (self.table >> i) & 1)

    def unsatisfying_assignments(self) -> tuple[int, ...]:
        return tuple(i for i in range(1 << self.arity) if not (self.table >> i) & 1)


@dataclass(frozen=True)
class AffinePredicate:
    """Coefficients (a_0, a_1, ..., a_r) over F_p; an assignment falsifies
    the predicate exactly when a_0 + sum a_i b_i = 0 mod p."""

    p: int
    coefficients: tuple[int, ...]

    def __post_init__(self):
        PrimeField(self.p)  # validates primality
        if len(self.coefficients) < 2:
            raise ValueError("need a_0 plus at least one variable coefficient")
        object.__setattr__(
            self, "coefficients", tuple(int(a) % self.p for a in self.coefficients)
        )

    @property
    def arity(self) -> int:
        return len(self.coefficients) - 1

    def satisfied(self, bits: tuple[int, ...]) -> bool:
        if len(bits) != self.arity:
            raise ValueError(f"expected {self.arity} inputs")
        total = self.coefficients[0]
        for a, b in zip(self.coefficients[1:], bits):
            total += a * (b & 1)
        return total % self.p != 0

    def as_predicate(self) -> Predicate:
        table = 0
        for bits in itertools.product((0, 1), repeat=self.arity):
            if self.satisfied(bits):
                table |= 1 << assignment_index(bits)
        return Predicate(self.arity, table)


@dataclass(frozen=True)
class Constraint:
    predicate: Predicate | AffinePredicate
    variables: tuple[int, ...]
    weight: Fraction = Fraction(1)

    def __post_init__(self):
        if len(self.variables) != self.predicate.arity:
            raise ValueError("variable tuple length must equal the predicate arity")
        object.__setattr__(self, "weight", as_weight(self.weight))
        object.__setattr__(self, "variables", tuple(int(v) for v in self.variables))


@dataclass(frozen=True)
class CSPInstance:
    k: int
    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        for c in self.constraints:
            if any(not 0 <= v < self.k for v in c.variables):
                raise ValueError("constraint variable outside the universe")

    @property
    def m(self) -> int:
        return len(self.constraints)

    def value(self, assignment: tuple[int, ...]) -> Fraction:
        total = Fraction(0)
        for c in self.constraints:
            bits = tuple(assignment[v] & 1 for v in c.variables)
            if c.predicate.satisfied(bits):
                total += c.weight
        return total


def affine_csp_to_code(
    instance: CSPInstance,
) -> tuple[GeneratorMatrix, tuple[Fraction, ...]]:
    """One row per constraint over F_p with k+1 columns; column 0 is the
    homogenizing variable carrying a_0, and coefficients of repeated
    variables add.  For Boolean x, the satisfied weight equals the
    weighted weight of the codeword for (1, x)."""
    primes = {
        c.predicate.p for c in instance.constraints if isinstance(c.predicate, AffinePredicate)
    }
    if any(not isinstance(c.predicate, AffinePredicate) for c in instance.constraints):
        raise NonAffinePredicate("all constraints must use affine predicates")
    if len(primes) != 1:
        raise MixedPrimes(f"constraints must share one prime, got {sorted(primes)}")
    p = primes.pop()
    field = PrimeField(p)
    rows = np.zeros((instance.m, instance.k + 1), dtype=np.int64)
    for j, c in enumerate(instance.constraints):
        coeffs = c.predicate.coefficients
        rows[j, 0] = coeffs[0]
        for a, v in zip(coeffs[1:], c.variables):
            rows[j, 1 + v] = (rows[j, 1 + v] + a) % p
    return GeneratorMatrix(field, rows), tuple(c.weight for c in instance.constraints)


def sparsify_affine_csp(
    instance: CSPInstance,
    epsilon: Fraction,
    seed: int,
    *,
    eta: Fraction | None = None,
    aggressive: bool = False,
    base_case_multiplier: Fraction = Fraction(100),
) -> CSPInstance:
    """Sparsify the affine reduction and map retained coordinates back to
    weighted constraints."""
    G, weights = affine_csp_to_code(instance)
    sp = final_code_sparsify(
        G,
        weights,
        Fraction(epsilon),
        seed,
        eta=eta,
        aggressive=aggressive,
        base_case_multiplier=base_case_multiplier,
    )
    kept = []
    for coord, w in zip(sp.coords, sp.weights):
        base = instance.constraints[coord]
        kept.append(Constraint(base.predicate, base.variables, w))
    return CSPInstance(instance.k, tuple(kept))


def verify_csp_sparsifier(
    original: CSPInstance,
    sparsified: CSPInstance,
    epsilon: Fraction,
    max_variables: int = 16,
) -> VerificationReport:
    """Exhaustive exact check of the satisfied weight over all Boolean
    assignments."""
    epsilon = Fraction(epsilon)
    k = original.k
    if k > max_variables:
        raise BudgetExceeded(f"{k} variables exceed the exhaustive budget {max_variables}")
    lo, hi = 1 - epsilon, 1 + epsilon
    passed, witness, best, checked = True, None, Fraction(0), 0
    for mask in range(1 << k):
        assignment = tuple((mask >> i) & 1 for i in range(k))
        checked += 1
        a = original.value(assignment)
        b = sparsified.value(assignment)
        if a == 0:
            ok = b == 0
        else:
            ok = lo * a <= b <= hi * a
            best = max(best, abs(b - a) / a)
        if not ok and passed:
            passed = False
            witness = assignment
    return VerificationReport(passed, epsilon, best, witness, checked)


# ---------------------------------------------------------------------------
# The ternary classification.


def _apply_projection(tokens: tuple[str, ...], x: int, y: int) -> tuple[int, ...]:
    values = {"0": 0, "1": 1, "x": x, "!x": 1 - x, "y": y, "!y": 1 - y}
    return tuple(values[t] for t in tokens)


def has_affine_projection_to_and(P: Predicate) -> tuple[str, ...] | None:
    """Exhaustive search for pi with P(pi(1), ..., pi(r)) = AND(x, y);
    each slot is a constant or a possibly negated fresh variable."""
    if P.arity > 8:
        raise ArityTooLarge("projection search is exhaustive up to arity 8")
    pairs = tuple(itertools.product((0, 1), repeat=2))
    for tokens in itertools.product(PROJECTION_TOKENS, repeat=P.arity):
        if all(
            P.satisfied(_apply_projection(tokens, x, y)) == bool(x and y)
            for x, y in pairs
        ):
            return tokens
    return None


def find_linear_representation(P: Predicate) -> AffinePredicate | None:
    """Search primes 2, 3, 5, 7 and all coefficient vectors for an affine
    form whose Boolean zero set equals the predicate's unsatisfying set."""
    if P.arity != 3:
        raise ArityTooLarge("representation search is specific to arity 3")
    unsat = set(P.unsatisfying_assignments())
    assignments = [
        (idx, tuple((idx >> (2 - t)) & 1 for t in range(3))) for idx in range(8)
    ]
    for p in _REPRESENTATION_PRIMES:
        for coeffs in itertools.product(range(p), repeat=4):
            zeros = {
                idx
                for idx, bits in assignments
                if (coeffs[0] + sum(a * b for a, b in zip(coeffs[1:], bits))) % p == 0
            }
            if zeros == unsat:
                return AffinePredicate(p, coeffs)
    return None


@dataclass(frozen=True)
class TernaryClassification:
    """Exactly one of the two fields is set: a linear representation for
    sparsifiable predicates, or a projection witness for the rest."""

    verdict: str  # "sparsifiable_linear" | "requires_quadratic"
    representation: AffinePredicate | None = None
    witness: tuple[str, ...] | None = None


def ternary_classify(P: Predicate) -> TernaryClassification:
    """Classify an arity-3 Boolean predicate.

    Projection-to-AND and affine representability are mutually exclusive
    and exhaustive over all 256 ternary predicates; hitting neither or
    both is an internal inconsistency, never silently resolved.
    """
    if P.arity != 3:
        raise ArityTooLarge("classification applies to arity-3 predicates")
    witness = has_affine_projection_to_and(P)
    representation = find_linear_representation(P)
    if witness is not None and representation is not None:
        raise InternalInconsistency(
            f"predicate {P.to_string()} both projects to AND and is affine"
        )
    if witness is None and representation is None:
        raise InternalInconsistency(
            f"predicate {P.to_string()} neither projects to AND nor is affine"
        )
    if witness is not None:
        return TernaryClassification("requires_quadratic", witness=witness)
    return TernaryClassification("sparsifiable_linear", representation=representation)
