"""Linear codes as column-span generator matrices over prime fields.

A code is the column span of an n x k matrix G over F_p: codewords are Gx
for messages x in F_p^k.  Exhaustive routines enumerate one message per
distinct codeword (p^rank of them) and fail with BudgetExceeded beyond the
enumeration budget.  Weights are exact rationals end to end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    EmptyCode,
    IndexOutOfRange,
    ZeroCode,
)
from .field import PrimeField

DEFAULT_ENUM_BUDGET = 1 << 24
_CHUNK = 4096


def as_weight(value) -> Fraction:
    w = Fraction(value)
    if w <= 0:
        raise ValueError(f"weights must be positive, got {value}")
    return w


def unit_weights(n: int) -> tuple[Fraction, ...]:
    return (Fraction(1),) * n


def as_weights(values, n: int) -> tuple[Fraction, ...]:
    ws = tuple(as_weight(v) for v in values)
    if len(ws) != n:
        raise DimensionMismatch(f"expected {n} weights, got {len(ws)}")
    return ws


class GeneratorMatrix:
    """An n x k generator matrix over F_p; rows are coordinates."""

    __slots__ = ("field", "entries")

    def __init__(self, field: PrimeField, entries):
        arr = np.asarray(entries, dtype=np.int64)
        if arr.ndim != 2:
            raise DimensionMismatch("generator matrix must be two-dimensional")
        if arr.shape[1] < 1:
            raise DimensionMismatch("generator matrix needs at least one column")
        if arr.size and (arr.min() < 0 or arr.max() >= field.p):
            raise ValueError(f"entries must lie in [0, {field.p})")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "entries", arr)

    def __setattr__(self, name, value):
        raise AttributeError("GeneratorMatrix is immutable")

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def k(self) -> int:
        return self.entries.shape[1]

    @property
    def p(self) -> int:
        return self.field.p

    def __eq__(self, other):
        return (
            isinstance(other, GeneratorMatrix)
            and other.field == self.field
            and other.entries.shape == self.entries.shape
            and bool(np.array_equal(other.entries, self.entries))
        )

    def __hash__(self):
        return hash((self.field.p, self.entries.tobytes(), self.entries.shape))

    def __repr__(self):
        return f"GeneratorMatrix(p={self.p}, n={self.n}, k={self.k})"

    @classmethod
    def identity(cls, field: PrimeField, k: int) -> "GeneratorMatrix":
        return cls(field, np.eye(k, dtype=np.int64))

    @classmethod
    def from_rows(cls, field: PrimeField, rows: Sequence[Sequence[int]]) -> "GeneratorMatrix":
        return cls(field, np.array(rows, dtype=np.int64))

    def encode(self, x) -> np.ndarray:
        """Return the codeword Gx as a length-n vector."""
        vec = np.asarray(x, dtype=np.int64) % self.p
        if vec.shape != (self.k,):
            raise DimensionMismatch(f"message length {vec.shape} vs k={self.k}")
        return (self.entries @ vec) % self.p

    def puncture(self, coords) -> "GeneratorMatrix":
        """Restrict to the given coordinate set, preserving row order."""
        idx = sorted(set(int(c) for c in coords))
        for c in idx:
            if not 0 <= c < self.n:
                raise IndexOutOfRange(f"coordinate {c} outside [0, {self.n})")
        return GeneratorMatrix(self.field, self.entries[idx, :])

    def rank(self) -> int:
        return _rank(self.entries, self.p)

    def kernel_basis(self) -> list[np.ndarray]:
        """Basis of {x in F_p^k : Gx = 0}; rank + len(basis) = k."""
        return [b for b in _kernel(self.entries, self.p).T]

    def support(self) -> tuple[int, ...]:
        """Indices of coordinates that are not identically zero.

        A row of zeros is zero on every codeword, and a nonzero row takes a
        nonzero value on some column, hence on some codeword.
        """
        if self.n == 0:
            return ()
        nz = np.flatnonzero((self.entries != 0).any(axis=1))
        return tuple(int(i) for i in nz)

    def density(self) -> Fraction:
        """Dimension over support size; 0 for the empty code."""
        supp = len(self.support())
        if supp == 0:
            return Fraction(0)
        return Fraction(self.rank(), supp)

    def independent_columns(self) -> list[int]:
        return _independent_columns(self.entries, self.p)

    def column_reduced(self) -> "GeneratorMatrix":
        """Same span, independent columns only (rank-many of them)."""
        cols = self.independent_columns()
        if not cols:
            return GeneratorMatrix(self.field, np.zeros((self.n, 1), dtype=np.int64))
        return GeneratorMatrix(self.field, self.entries[:, cols])

    def distinct_codeword_count(self) -> int:
        return self.p ** self.rank()

    def check_budget(self, budget: int = DEFAULT_ENUM_BUDGET) -> int:
        count = self.distinct_codeword_count()
        if count > budget:
            raise BudgetExceeded(
                f"{count} distinct codewords exceed the enumeration budget {budget}"
            )
        return count

    def iter_codeword_chunks(
        self, budget: int = DEFAULT_ENUM_BUDGET, chunk: int = _CHUNK
    ) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        """Yield (messages (k, c), codewords (n, c)) covering each distinct
        codeword exactly once, in a fixed enumeration order."""
        self.check_budget(budget)
        cols = self.independent_columns()
        r = len(cols)
        total = self.p ** r
        base = self.entries[:, cols] if r else np.zeros((self.n, 0), dtype=np.int64)
        p = self.p
        for start in range(0, total, chunk):
            stop = min(start + chunk, total)
            idx = np.arange(start, stop, dtype=np.int64)
            y = np.zeros((r, stop - start), dtype=np.int64)
            rem = idx
            for j in range(r):
                y[j] = rem % p
                rem = rem // p
            msgs = np.zeros((self.k, stop - start), dtype=np.int64)
            msgs[cols, :] = y
            cws = (base @ y) % p if r else np.zeros((self.n, stop - start), dtype=np.int64)
            yield msgs, cws

    def enumerate_codewords(self, budget: int = DEFAULT_ENUM_BUDGET) -> Iterator[np.ndarray]:
        """Yield each distinct codeword exactly once (p^rank of them)."""
        for _, cws in self.iter_codeword_chunks(budget):
            for j in range(cws.shape[1]):
                yield cws[:, j].copy()

    def contains(self, vector) -> bool:
        """Whether the vector lies in the column span."""
        v = np.asarray(vector, dtype=np.int64) % self.p
        if v.shape != (self.n,):
            raise DimensionMismatch(f"vector length {v.shape} vs n={self.n}")
        return _solve(self.entries, self.p, v) is not None

    def solve(self, vector) -> np.ndarray | None:
        v = np.asarray(vector, dtype=np.int64) % self.p
        if v.shape != (self.n,):
            raise DimensionMismatch(f"vector length {v.shape} vs n={self.n}")
        return _solve(self.entries, self.p, v)

    def min_distance(self, budget: int = DEFAULT_ENUM_BUDGET) -> int:
        """Minimum Hamming weight over nonzero distinct codewords."""
        if self.rank() == 0:
            raise ZeroCode("the zero code has no nonzero codeword")
        best = None
        for _, cws in self.iter_codeword_chunks(budget):
            wts = (cws != 0).sum(axis=0)
            nz = wts[wts > 0]
            if nz.size:
                m = int(nz.min())
                best = m if best is None else min(best, m)
        return best


def weight(codeword, weights: Sequence[Fraction] | None = None):
    """Hamming weight, or the weighted sum over the support."""
    c = np.asarray(codeword)
    if weights is None:
        return int((c != 0).sum())
    if len(weights) != c.shape[0]:
        raise DimensionMismatch(f"{len(weights)} weights vs length {c.shape[0]}")
    total = Fraction(0)
    for i in np.flatnonzero(c != 0):
        total += weights[int(i)]
    return total


@dataclass(frozen=True)
class Sparsifier:
    """A coordinate subset with positive weights, sorted by coordinate."""

    coords: tuple[int, ...]
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coords) != len(self.weights):
            raise DimensionMismatch("coords and weights differ in length")
        for a, b in zip(self.coords, self.coords[1:]):
            if b <= a:
                raise ValueError("coordinates must be strictly increasing")
        for w in self.weights:
            if not isinstance(w, Fraction) or w <= 0:
                raise ValueError("weights must be positive Fractions")

    @classmethod
    def identity(cls, n: int) -> "Sparsifier":
        return cls(tuple(range(n)), unit_weights(n))

    @classmethod
    def from_pairs(cls, pairs) -> "Sparsifier":
        """Build from (coord, weight) pairs, merging duplicates by addition."""
        acc: dict[int, Fraction] = {}
        for c, w in pairs:
            acc[c] = acc.get(c, Fraction(0)) + Fraction(w)
        coords = tuple(sorted(acc))
        return cls(coords, tuple(acc[c] for c in coords))

    def __len__(self):
        return len(self.coords)

    def restrict(self, G: GeneratorMatrix) -> GeneratorMatrix:
        return G.puncture(self.coords)


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of an exhaustive (1 +/- eps) weight comparison."""

    passed: bool
    epsilon: Fraction
    max_relative_error: Fraction
    witness: tuple[int, ...] | None
    checked: int

    def __bool__(self):
        return self.passed


def _grouped(weights: Sequence[Fraction]) -> tuple[list[Fraction], list[np.ndarray]]:
    """Group coordinate indices by their exact weight value."""
    by_value: dict[Fraction, list[int]] = {}
    for i, w in enumerate(weights):
        by_value.setdefault(Fraction(w), []).append(i)
    values = sorted(by_value)
    return values, [np.array(by_value[v], dtype=np.int64) for v in values]


def _group_counts(cws: np.ndarray, groups: list[np.ndarray]) -> list[np.ndarray]:
    mask = cws != 0
    return [mask[idx, :].sum(axis=0, dtype=np.int64) for idx in groups]


def verify_sparsifier(
    G: GeneratorMatrix,
    base_weights: Sequence[Fraction] | None,
    sp: Sparsifier,
    epsilon: Fraction,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> VerificationReport:
    """Exhaustively check (1-eps) wt(v) <= wt_sp(v|_S) <= (1+eps) wt(v).

    Comparisons are exact rational arithmetic.  The report carries the
    maximum relative error over codewords of nonzero base weight and a
    witness message on the first failure.
    """
    epsilon = Fraction(epsilon)
    if base_weights is None:
        base_weights = unit_weights(G.n)
    else:
        base_weights = as_weights(base_weights, G.n)
    for c in sp.coords:
        if not 0 <= c < G.n:
            raise IndexOutOfRange(f"sparsifier coordinate {c} outside [0, {G.n})")

    b_vals, b_groups = _grouped(base_weights)
    s_vals, s_groups = _grouped(sp.weights)
    s_groups = [np.array([sp.coords[i] for i in idx], dtype=np.int64) for idx in s_groups]

    b_den = math.lcm(*(v.denominator for v in b_vals)) if b_vals else 1
    s_den = math.lcm(*(v.denominator for v in s_vals)) if s_vals else 1
    b_nums = [int(v * b_den) for v in b_vals]
    s_nums = [int(v * s_den) for v in s_vals]

    lo_num, lo_den = (1 - epsilon).numerator, (1 - epsilon).denominator
    hi_num, hi_den = (1 + epsilon).numerator, (1 + epsilon).denominator

    passed = True
    witness = None
    best_num, best_den = 0, 1  # running max of |ws - wb| / wb
    checked = 0

    for msgs, cws in G.iter_codeword_chunks(budget):
        cols = cws.shape[1]
        checked += cols
        bc = _group_counts(cws, b_groups)
        sc = _group_counts(cws, s_groups)
        for j in range(cols):
            wb = sum(num * int(cnt[j]) for num, cnt in zip(b_nums, bc))  # * 1/b_den
            ws = sum(num * int(cnt[j]) for num, cnt in zip(s_nums, sc))  # * 1/s_den
            # Scale both to the common denominator b_den * s_den.
            wb_scaled = wb * s_den
            ws_scaled = ws * b_den
            if wb == 0:
                ok = ws == 0
            else:
                ok = (
                    lo_num * wb_scaled <= lo_den * ws_scaled
                    and hi_den * ws_scaled <= hi_num * wb_scaled
                )
                err_num = abs(ws_scaled - wb_scaled)
                if err_num * best_den > best_num * wb_scaled:
                    best_num, best_den = err_num, wb_scaled
            if not ok and passed:
                passed = False
                witness = tuple(int(v) for v in msgs[:, j])
    max_err = Fraction(best_num, best_den) if best_num else Fraction(0)
    return VerificationReport(passed, epsilon, max_err, witness, checked)


def duplication_counts(weights: Sequence[Fraction], epsilon: Fraction) -> list[int]:
    """Copies per coordinate for the weighted-to-unweighted conversion:
    floor(100 w_i / (eps * w_min))."""
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not weights:
        raise EmptyCode("cannot unweight a code with no coordinates")
    ws = [as_weight(w) for w in weights]
    w_min = min(ws)
    return [int(Fraction(100) * w / (epsilon * w_min)) for w in ws]


def weighted_to_unweighted(
    G: GeneratorMatrix,
    weights: Sequence[Fraction],
    epsilon: Fraction,
    materialize_budget: int = 1 << 22,
) -> tuple[GeneratorMatrix, Fraction]:
    """Duplicate coordinate i floor(100 w_i / (eps w_min)) times.

    Returns the duplicated-row matrix and the global scale w_min * eps/100;
    scaled duplicated weights reconstruct every codeword's weighted weight
    within (1 +/- eps/100).
    """
    if G.n == 0:
        raise EmptyCode("cannot unweight a code with no coordinates")
    weights = as_weights(weights, G.n)
    counts = duplication_counts(weights, epsilon)
    total = sum(counts)
    if total > materialize_budget:
        raise BudgetExceeded(f"{total} duplicated rows exceed {materialize_budget}")
    rows = np.repeat(G.entries, counts, axis=0)
    scale = min(weights) * Fraction(epsilon) / 100
    return GeneratorMatrix(G.field, rows), scale


def coordinate_min_weights(
    G: GeneratorMatrix,
    copies: np.ndarray | None = None,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> np.ndarray:
    """Per coordinate, the minimum codeword weight among codewords nonzero
    there; -1 for identically zero coordinates.  With copies given, weights
    count each coordinate with its multiplicity."""
    if copies is None:
        copies = np.ones(G.n, dtype=np.int64)
    mins = np.full(G.n, -1, dtype=np.int64)
    for _, cws in G.iter_codeword_chunks(budget):
        mask = cws != 0
        wts = copies @ mask  # (c,) multiplicity-weighted Hamming weights
        big = np.where(mask, wts[np.newaxis, :], np.iinfo(np.int64).max)
        chunk_min = big.min(axis=1)
        seen = mask.any(axis=1)
        upd = seen & ((mins == -1) | (chunk_min < mins))
        mins[upd] = chunk_min[upd]
    return mins


# ---------------------------------------------------------------------------
# Gaussian elimination over F_p (row echelon on copies, int64 arithmetic).


def _rref(mat: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    m = mat.copy() % p
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivot = None
        for i in range(r, rows):
            if m[i, c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        if pivot != r:
            m[[r, pivot]] = m[[pivot, r]]
        inv = pow(int(m[r, c]), p - 2, p)
        m[r] = (m[r] * inv) % p
        nz = np.flatnonzero(m[:, c])
        nz = nz[nz != r]
        if nz.size:
            m[nz] = (m[nz] - np.outer(m[nz, c], m[r])) % p
        pivots.append(c)
        r += 1
    return m, pivots


def _rank(mat: np.ndarray, p: int) -> int:
    if mat.size == 0:
        return 0
    return len(_rref(mat, p)[1])


def _kernel(mat: np.ndarray, p: int) -> np.ndarray:
    """Columns form a basis of the right kernel {x : mat @ x = 0 mod p}."""
    rows, cols = mat.shape
    if rows == 0:
        return np.eye(cols, dtype=np.int64)
    rref, pivots = _rref(mat, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for j, fc in enumerate(free):
        basis[fc, j] = 1
        for r, pc in enumerate(pivots):
            basis[pc, j] = (-rref[r, fc]) % p
    return basis


def _independent_columns(mat: np.ndarray, p: int) -> list[int]:
    """Greedy leftmost maximal independent column set (the RREF pivots of
    the transpose scan)."""
    rows, cols = mat.shape
    if rows == 0:
        return []
    work = (mat.T.copy()) % p  # candidate vectors as rows
    chosen: list[int] = []
    basis: list[np.ndarray] = []
    pivot_pos: list[int] = []
    for c in range(cols):
        v = work[c].copy()
        for b, pos in zip(basis, pivot_pos):
            if v[pos] != 0:
                v = (v - v[pos] * b) % p
        nz = np.flatnonzero(v)
        if nz.size:
            pos = int(nz[0])
            inv = pow(int(v[pos]), p - 2, p)
            basis.append((v * inv) % p)
            pivot_pos.append(pos)
            chosen.append(c)
    return chosen


def _solve(mat: np.ndarray, p: int, b: np.ndarray) -> np.ndarray | None:
    """One solution x of mat @ x = b mod p, or None if inconsistent."""
    rows, cols = mat.shape
    aug = np.concatenate([mat, b.reshape(-1, 1)], axis=1) % p
    rref, pivots = _rref(aug, p)
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for r, c in enumerate(pivots):
        x[c] = rref[r, cols]
    return x
