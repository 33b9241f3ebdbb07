"""Exception types shared across the package."""

from __future__ import annotations


class CodesparseError(Exception):
    """Base class for every error raised by this package."""


class MixedFields(CodesparseError):
    """Two field elements from different prime fields were combined."""


class DivisionByZero(CodesparseError, ZeroDivisionError):
    """Multiplicative inverse of zero was requested."""


class DimensionMismatch(CodesparseError):
    """Vector or matrix shapes do not line up."""


class IndexOutOfRange(CodesparseError):
    """A coordinate index fell outside [0, n)."""


class BudgetExceeded(CodesparseError):
    """The instance is too large for exhaustive desk-scale processing."""


class ZeroCode(CodesparseError):
    """The operation needs a code with at least one nonzero codeword."""


class EmptyCode(CodesparseError):
    """The operation needs a code with at least one coordinate."""


class ZeroCoordinate(CodesparseError):
    """Contraction was attempted on an identically zero coordinate."""


class NotACodeword(CodesparseError):
    """The given vector is not in the span of the generator matrix."""


class WeightOutOfBand(CodesparseError):
    """A coordinate weight lies outside the expected weight band."""


class MixedPrimes(CodesparseError):
    """Affine constraints over different primes cannot share one code."""


class NonAffinePredicate(CodesparseError):
    """A truth-table predicate was used where an affine one is required."""


class ArityTooLarge(CodesparseError):
    """Predicate arity exceeds the exhaustive search limit."""


class HyperedgeTooLarge(CodesparseError):
    """A hyperedge has more members than the encoding field can absorb."""


class InternalInconsistency(CodesparseError):
    """Two mutually exclusive classifier branches (dis)agreed unexpectedly."""


class ParseError(CodesparseError):
    """Malformed input file, with a line/column diagnostic."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where = f" ({where})"
        super().__init__(f"{message}{where}")
