"""Hypergraph cuts encoded as a code over a prime q in [n, 2n].

Each hyperedge becomes a row with ones on all members but the largest,
which receives q - |e| + 1, so the row sums to zero mod q.  A 0/1 message
zeroes the row exactly when the hyperedge is monochromatic, hence codeword
weights are hypergraph cut sizes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .codes import DEFAULT_ENUM_BUDGET, GeneratorMatrix, Sparsifier, VerificationReport, as_weight
from .counting import CountingBoundReport, code_decomposition, subcode_within
from .errors import BudgetExceeded, HyperedgeTooLarge
from .field import PrimeField, smallest_prime_at_least
from .sparsify import final_code_sparsify


@dataclass(frozen=True)
class Hypergraph:
    n_vertices: int
    hyperedges: tuple[tuple[int, ...], ...]
    weights: tuple[Fraction, ...] = ()

    def __post_init__(self):
        edges = []
        for e in self.hyperedges:
            members = tuple(sorted(set(int(v) for v in e)))
            if len(members) < 2:
                raise ValueError(f"hyperedge {e} needs at least two distinct vertices")
            if members[0] < 0 or members[-1] >= self.n_vertices:
                raise ValueError(f"hyperedge {e} outside vertex range")
            edges.append(members)
        object.__setattr__(self, "hyperedges", tuple(edges))
        if self.weights:
            ws = tuple(as_weight(w) for w in self.weights)
            if len(ws) != len(edges):
                raise ValueError("weights must match hyperedges")
            object.__setattr__(self, "weights", ws)
        else:
            object.__setattr__(self, "weights", tuple(Fraction(1) for _ in edges))

    @property
    def m(self) -> int:
        return len(self.hyperedges)

    def cut_edges(self, side) -> tuple[int, ...]:
        side_set = set(side)
        out = []
        for i, e in enumerate(self.hyperedges):
            inside = sum(1 for v in e if v in side_set)
            if 0 < inside < len(e):
                out.append(i)
        return tuple(out)

    def cut_value(self, side) -> Fraction:
        return sum((self.weights[i] for i in self.cut_edges(side)), Fraction(0))


def hypergraph_code(h: Hypergraph) -> tuple[GeneratorMatrix, int]:
    """The cut-encoding generator matrix and its prime modulus q, the
    smallest prime at least the vertex count."""
    q = smallest_prime_at_least(max(h.n_vertices, 2))
    field = PrimeField(q)
    rows = np.zeros((h.m, h.n_vertices), dtype=np.int64)
    for i, e in enumerate(h.hyperedges):
        if len(e) > q:
            raise HyperedgeTooLarge(f"hyperedge of size {len(e)} over F_{q}")
        for v in e[:-1]:
            rows[i, v] = 1
        rows[i, e[-1]] = q - len(e) + 1
    return GeneratorMatrix(field, rows), q


def sparsify_hypergraph(
    h: Hypergraph,
    epsilon: Fraction,
    seed: int,
    *,
    eta: Fraction | None = None,
    aggressive: bool = False,
    base_case_multiplier: Fraction = Fraction(100),
) -> Hypergraph:
    """Sparsify the cut encoding and map retained coordinates back to
    weighted hyperedges."""
    G, _ = hypergraph_code(h)
    sp = final_code_sparsify(
        G,
        h.weights,
        Fraction(epsilon),
        seed,
        eta=eta,
        aggressive=aggressive,
        base_case_multiplier=base_case_multiplier,
    )
    return Hypergraph(
        h.n_vertices,
        tuple(h.hyperedges[i] for i in sp.coords),
        tuple(sp.weights),
    )


def verify_hypergraph_sparsifier(
    h: Hypergraph, hh: Hypergraph, epsilon: Fraction, max_vertices: int = 16
) -> VerificationReport:
    """Exhaustive exact check of all 2^(n-1) cuts."""
    epsilon = Fraction(epsilon)
    n = h.n_vertices
    if n > max_vertices:
        raise BudgetExceeded(f"{n} vertices exceed the exhaustive cut budget {max_vertices}")
    lo, hi = 1 - epsilon, 1 + epsilon
    passed, witness, best, checked = True, None, Fraction(0), 0
    for mask in range(1 << (n - 1)):
        side = [0] + [v for v in range(1, n) if (mask >> (v - 1)) & 1]
        if len(side) == n:
            continue
        checked += 1
        gv = h.cut_value(side)
        hv = hh.cut_value(side)
        if gv == 0:
            ok = hv == 0
        else:
            ok = lo * gv <= hv <= hi * gv
            err = abs(hv - gv) / gv
            best = max(best, err)
        if not ok and passed:
            passed = False
            witness = tuple(side)
    return VerificationReport(passed, epsilon, best, witness, checked)


@dataclass(frozen=True)
class HypergraphCutCountReport:
    """Distinct cut edge-sets by size against the (2n)^(2 alpha) bound."""

    d: Fraction
    per_alpha: tuple[tuple[int, int, int, bool], ...]  # (alpha, observed, bound, ok)

    @property
    def passed(self) -> bool:
        return all(ok for _, _, _, ok in self.per_alpha)


def count_distinct_cuts(h: Hypergraph, max_vertices: int = 14) -> list[int]:
    """Sorted sizes of distinct cut edge-sets (deduplicated; the empty cut
    is excluded)."""
    if h.n_vertices > max_vertices:
        raise BudgetExceeded(
            f"{h.n_vertices} vertices exceed the cut enumeration budget {max_vertices}"
        )
    seen: set[tuple[int, ...]] = set()
    n = h.n_vertices
    for mask in range(1, 1 << (n - 1)):
        side = [0] + [v for v in range(1, n) if (mask >> (v - 1)) & 1]
        edges = h.cut_edges(side)
        if edges:
            seen.add(edges)
    return sorted(len(s) for s in seen)


def _peel_light_codewords(G: GeneratorMatrix, d: int) -> tuple[int, ...]:
    """Coordinates covered by codewords of weight at most d, peeled
    greedily.

    A codeword of weight at most d exists exactly when some row subset T
    with |T| <= d carries a nonzero subcode, so the search runs over
    subsets and never enumerates the message space.  Each peel removes at
    most d coordinates and drops the residual rank, so at most rank * d
    coordinates are removed in total.
    """
    removed: set[int] = set()
    while True:
        alive = [i for i in range(G.n) if i not in removed]
        live = GeneratorMatrix(G.field, G.entries[alive, :])
        found = None
        for size in range(1, d + 1):
            for T in itertools.combinations(range(len(alive)), size):
                sub = subcode_within(live, T)
                if sub.rank() > 0:
                    found = sub.support()
                    break
            if found is not None:
                break
        if found is None:
            return tuple(sorted(removed))
        for local in found:
            removed.add(alive[local])


def hypergraph_decomposition(
    h: Hypergraph, d: int, max_vertices: int = 14, budget: int = DEFAULT_ENUM_BUDGET
) -> tuple[tuple[int, ...], Hypergraph, HypergraphCutCountReport, CountingBoundReport | None]:
    """Remove at most n*d hyperedges so the remainder has at most
    (2n)^(2 alpha) distinct cuts of size <= alpha*d for every alpha.

    Returns (removed hyperedge ids, residual hypergraph, the cut-count
    report on the residual, and the codeword-count report when the message
    space is small enough to enumerate).  For larger fields the removal
    set comes from a subset-kernel peel of all codewords of weight at most
    d, and the residual guarantee is certified by the cut-count report
    alone.
    """
    if d < 1:
        raise ValueError("d must be at least 1")
    G, q = hypergraph_code(h)
    code_report: CountingBoundReport | None = None
    if G.distinct_codeword_count() <= budget:
        S, _, code_report = code_decomposition(G, d)
    else:
        S = _peel_light_codewords(G, d)
    removed = tuple(sorted(S))
    keep = [i for i in range(h.m) if i not in set(removed)]
    residual = Hypergraph(
        h.n_vertices,
        tuple(h.hyperedges[i] for i in keep),
        tuple(h.weights[i] for i in keep),
    )
    sizes = count_distinct_cuts(residual, max_vertices)
    n = h.n_vertices
    lines = []
    for alpha in range(1, n + 1):
        observed = sum(1 for s in sizes if s <= alpha * d)
        bound = (2 * n) ** (2 * alpha)
        lines.append((alpha, observed, bound, observed <= bound))
    return removed, residual, HypergraphCutCountReport(Fraction(d), tuple(lines)), code_report
