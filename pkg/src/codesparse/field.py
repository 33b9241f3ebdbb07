"""Exact arithmetic in prime fields F_p and prime selection utilities."""

from __future__ import annotations

from .errors import DivisionByZero, MixedFields

_MAX_PRIME = 1 << 31


def is_prime(p: int) -> bool:
    """Trial-division primality test, adequate for p < 2^31."""
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def smallest_prime_at_least(k: int) -> int:
    """Least prime q >= k; Bertrand's postulate bounds it by 2k."""
    if k < 2:
        raise ValueError("smallest_prime_at_least needs k >= 2")
    q = k
    while not is_prime(q):
        q += 1
    return q


class PrimeField:
    """The field F_p for a prime modulus p, verified at construction."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not isinstance(p, int) or not 2 <= p < _MAX_PRIME:
            raise ValueError(f"modulus must be an integer in [2, 2^31), got {p!r}")
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        object.__setattr__(self, "p", p)

    def __setattr__(self, name, value):
        raise AttributeError("PrimeField is immutable")

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"

    def element(self, value: int) -> "FieldElement":
        return FieldElement(value % self.p, self)

    # Integer-level operations; canonical representatives in [0, p).
    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise DivisionByZero(f"inverse of 0 in F_{self.p}")
        return pow(a, self.p - 2, self.p)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return pow(self.inv(a), -e, self.p)
        return pow(a, e, self.p)


class FieldElement:
    """A canonical representative in [0, p) tied to its PrimeField."""

    __slots__ = ("value", "field")

    def __init__(self, value: int, field: PrimeField):
        object.__setattr__(self, "value", value % field.p)
        object.__setattr__(self, "field", field)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise MixedFields(f"F_{self.field.p} vs F_{other.field.p}")
            return other
        if isinstance(other, int):
            return FieldElement(other, self.field)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        return FieldElement(self.field.add(self.value, other.value), self.field)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return FieldElement(self.field.sub(self.value, other.value), self.field)

    def __mul__(self, other):
        other = self._coerce(other)
        return FieldElement(self.field.mul(self.value, other.value), self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.field.neg(self.value), self.field)

    def inv(self) -> "FieldElement":
        return FieldElement(self.field.inv(self.value), self.field)

    def __pow__(self, e: int):
        return FieldElement(self.field.pow(self.value, e), self.field)

    def __eq__(self, other):
        if isinstance(other, int):
            return self.value == other % self.field.p
        return (
            isinstance(other, FieldElement)
            and other.field == self.field
            and other.value == self.value
        )

    def __hash__(self):
        return hash((self.field.p, self.value))

    def __repr__(self):
        return f"{self.value} (mod {self.field.p})"
