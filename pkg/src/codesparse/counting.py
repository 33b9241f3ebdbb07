"""Contraction on coordinates, the codeword-counting bound, and the
decomposition that peels a small coordinate set so the bound holds on the
rest.

Contraction zeroes a chosen coordinate by column elimination and drops one
column; the residual span is exactly the codewords vanishing there.  The
counting bound says a code with no subcode of density > 1/d has at most
q^alpha * C(k, alpha) codewords of weight <= alpha*d, and the decomposition
materializes the either/or: whenever the bound fails, an exact search
produces a dense subcode whose support is removed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .codes import DEFAULT_ENUM_BUDGET, GeneratorMatrix, _kernel, _solve
from .errors import BudgetExceeded, InternalInconsistency, NotACodeword, ZeroCoordinate
from .rng import SplitMix64, derive_seed

DEFAULT_NODE_BUDGET = 200_000


@dataclass(frozen=True)
class ContractionTrace:
    """Record of one contraction run: the coordinates contracted on, in
    order, and the surviving generator matrix."""

    chosen_coordinates: tuple[int, ...]
    final_matrix: GeneratorMatrix
    seed: int


@dataclass(frozen=True)
class AlphaLine:
    alpha: int
    observed: int
    bound: int
    ok: bool


@dataclass(frozen=True)
class CountingBoundReport:
    d: Fraction
    column_count: int
    per_alpha: tuple[AlphaLine, ...]

    @property
    def passed(self) -> bool:
        return all(line.ok for line in self.per_alpha)

    def first_failure(self) -> AlphaLine | None:
        for line in self.per_alpha:
            if not line.ok:
                return line
        return None


def contract_step(G: GeneratorMatrix, j: int) -> GeneratorMatrix:
    """Contract on coordinate j: eliminate against the first column that is
    nonzero at j, then remove that column.

    The span of the result is exactly {c in span(G) : c_j = 0}.
    """
    p = G.p
    row = G.entries[j]
    nz = np.flatnonzero(row)
    if nz.size == 0:
        raise ZeroCoordinate(f"coordinate {j} is identically zero")
    a = int(nz[0])
    others = nz[1:]
    m = G.entries.copy()
    if others.size:
        inv_a = pow(int(row[a]), p - 2, p)
        coeffs = (-(row[others] * inv_a)) % p
        m[:, others] = (m[:, others] + np.outer(m[:, a], coeffs)) % p
    m = np.delete(m, a, axis=1)
    if m.shape[1] == 0:
        m = np.zeros((G.n, 1), dtype=np.int64)
    return GeneratorMatrix(G.field, m)


def contract(G: GeneratorMatrix, alpha: int, seed: int) -> ContractionTrace:
    """Contract on uniformly random nonzero coordinates until at most alpha
    columns remain or the support empties.  Deterministic given seed."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    rng = SplitMix64(derive_seed(seed, "contract"))
    cur = G
    chosen: list[int] = []
    while cur.k >= alpha + 1:
        support = np.flatnonzero((cur.entries != 0).any(axis=1))
        if support.size == 0:
            break
        j = int(support[rng.randrange(support.size)])
        cur = contract_step(cur, j)
        chosen.append(j)
    return ContractionTrace(tuple(chosen), cur, seed)


def survival_experiment(
    G: GeneratorMatrix, c, alpha: int, trials: int, seed: int
) -> Fraction:
    """Empirical probability that codeword c survives contraction down to
    dimension alpha, over independent seeded runs.

    The generator is column-reduced first so column count equals dimension
    throughout, matching the contraction analysis.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    c = np.asarray(c, dtype=np.int64) % G.p
    reduced = G.column_reduced()
    if _solve(reduced.entries, G.p, c) is None:
        raise NotACodeword("the target vector is not in the span")
    hits = 0
    for t in range(trials):
        trace = contract(reduced, alpha, derive_seed(seed, "trial", t))
        if _solve(trace.final_matrix.entries, G.p, c) is not None:
            hits += 1
    return Fraction(hits, trials)


def codeword_weight_array(
    G: GeneratorMatrix,
    copies: np.ndarray | None = None,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> np.ndarray:
    """Integer weights of every distinct codeword, multiplicity-aware."""
    if copies is None:
        copies = np.ones(G.n, dtype=np.int64)
    parts = []
    for _, cws in G.iter_codeword_chunks(budget):
        parts.append(copies @ (cws != 0))
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def check_counting_bound(
    G: GeneratorMatrix,
    d,
    copies: np.ndarray | None = None,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> CountingBoundReport:
    """Count distinct nonzero codewords of weight <= alpha*d against the
    bound q^alpha * C(k, alpha) for every alpha in 1..k (k = column count)."""
    d = Fraction(d)
    if d <= 0:
        raise ValueError("d must be positive")
    wts = codeword_weight_array(G, copies, budget)
    wts = wts[wts > 0]
    wts.sort()
    k = G.k
    q = G.p
    lines = []
    for alpha in range(1, k + 1):
        cutoff = alpha * d
        # Integer weights, so weight <= cutoff iff weight <= floor(cutoff).
        observed = int(np.searchsorted(wts, int(cutoff), side="right"))
        bound = q**alpha * math.comb(k, alpha)
        lines.append(AlphaLine(alpha, observed, bound, observed <= bound))
    return CountingBoundReport(d, k, tuple(lines))


def subcode_within(G: GeneratorMatrix, T) -> GeneratorMatrix:
    """Generator of {c in span(G) : supp(c) is contained in T}.

    Computed as G restricted to the kernel of the rows outside T; its
    dimension is rank(G) - rank(G restricted to the complement of T).
    """
    t_set = set(int(i) for i in T)
    outside = [i for i in range(G.n) if i not in t_set]
    ker = _kernel(G.entries[outside, :], G.p)
    if ker.shape[1] == 0:
        return GeneratorMatrix(G.field, np.zeros((G.n, 1), dtype=np.int64))
    return GeneratorMatrix(G.field, (G.entries @ ker) % G.p)


def densest_subcode_exact(
    G: GeneratorMatrix,
    node_budget: int = DEFAULT_NODE_BUDGET,
    copies: np.ndarray | None = None,
    within: tuple[int, ...] | None = None,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> tuple[tuple[int, ...], int, Fraction]:
    """Coordinate set T maximizing density(subcode_within(G, T)), exactly.

    Density is dimension over the subcode's true support (multiplicity
    weighted when copies are given).  The search walks the lattice of
    closed supports: supports of subcodes of the form C_T.  Every closed
    set is reachable from the full support by repeatedly deleting one
    coordinate and re-closing, so the walk is complete.
    """
    if copies is None:
        copies = np.ones(G.n, dtype=np.int64)
    masks = []
    for _, cws in G.iter_codeword_chunks(budget):
        masks.append((cws != 0).T)  # (chunk, n) support masks
    supports = np.concatenate(masks) if masks else np.zeros((0, G.n), dtype=bool)
    nonzero = supports.any(axis=1)
    supports = supports[nonzero]
    if supports.shape[0] == 0:
        return (), 0, Fraction(0)
    p = G.p

    start = np.zeros(G.n, dtype=bool)
    if within is None:
        start[:] = True
    else:
        start[list(within)] = True

    def close(allowed: np.ndarray) -> tuple[bytes, np.ndarray, int]:
        inside = ~(supports & ~allowed).any(axis=1)
        members = int(inside.sum())
        sup = supports[inside].any(axis=0) if members else np.zeros(G.n, dtype=bool)
        # members + 1 counts the zero codeword and must be a power of p.
        dim, t = 0, members + 1
        while t > 1:
            if t % p:
                raise InternalInconsistency("subcode size is not a power of p")
            t //= p
            dim += 1
        return sup.tobytes(), sup, dim

    best_T: tuple[int, ...] = ()
    best_dim = 0
    best_num, best_den = 0, 1  # density as a running max
    seen: set[bytes] = set()
    key, sup, dim = close(start)
    queue = [(key, sup, dim)]
    seen.add(key)
    nodes = 0
    while queue:
        key, sup, dim = queue.pop()
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceeded(f"densest-subcode search exceeded {node_budget} nodes")
        supp_weight = int(copies[sup].sum())
        if dim > 0 and dim * best_den > best_num * supp_weight:
            best_num, best_den = dim, supp_weight
            best_T = tuple(int(i) for i in np.flatnonzero(sup))
            best_dim = dim
        if dim <= 1:
            # All members are scalar multiples of one codeword and share its
            # support, so every child closure is empty.
            continue
        for j in np.flatnonzero(sup):
            child = sup.copy()
            child[j] = False
            ckey, csup, cdim = close(child)
            if cdim > 0 and ckey not in seen:
                seen.add(ckey)
                queue.append((ckey, csup, cdim))
    density = Fraction(best_num, best_den) if best_num else Fraction(0)
    return best_T, best_dim, density


def _min_weight_codeword(
    G: GeneratorMatrix, copies: np.ndarray, budget: int
) -> tuple[int, np.ndarray] | None:
    """First-in-enumeration-order nonzero codeword of minimum weight.

    Assumes all copies are positive, so weight zero identifies the zero
    codeword.
    """
    best = None
    for _, cws in G.iter_codeword_chunks(budget):
        wts = copies @ (cws != 0)
        pos = np.flatnonzero(wts > 0)
        if pos.size == 0:
            continue
        j = int(pos[np.argmin(wts[pos])])
        w = int(wts[j])
        if best is None or w < best[0]:
            best = (w, cws[:, j].copy())
    return best


def code_decomposition(
    G: GeneratorMatrix,
    d,
    copies: np.ndarray | None = None,
    node_budget: int = DEFAULT_NODE_BUDGET,
    budget: int = DEFAULT_ENUM_BUDGET,
    stats: dict | None = None,
) -> tuple[tuple[int, ...], GeneratorMatrix, CountingBoundReport]:
    """Split the coordinates into S (removed) and the rest so that the
    counting bound holds on the punctured remainder.

    Strategy: (1) greedily peel minimum-weight codewords of weight <= d
    into S; (2) check the counting bound; (3) on failure, remove the
    support of an exactly-computed densest subcode (searched first inside
    the union of supports of the offending light codewords, then globally);
    (4) if the exact search blows its node budget, double the peel
    threshold and restart.  Each removal is the support of a closed
    subcode of density > 1/d, so |S| <= k*d whenever escalation is not
    needed.
    """
    d = Fraction(d)
    if d <= 0:
        raise ValueError("d must be positive")
    if copies is None:
        copies = np.ones(G.n, dtype=np.int64)
    if stats is None:
        stats = {}
    stats.setdefault("dense_removals", 0)
    stats.setdefault("escalations", 0)
    removed: set[int] = set()
    alive = list(range(G.n))
    peel_threshold = d

    def current() -> tuple[GeneratorMatrix, np.ndarray, list[int]]:
        idx = [i for i in alive if i not in removed]
        return GeneratorMatrix(G.field, G.entries[idx, :]), copies[idx], idx

    while True:
        cur, cur_copies, idx = current()
        # Peel phase.
        while True:
            found = _min_weight_codeword(cur, cur_copies, budget)
            if found is None or Fraction(found[0]) > peel_threshold:
                break
            supp = np.flatnonzero(found[1])
            for i in supp:
                removed.add(idx[int(i)])
            cur, cur_copies, idx = current()
        report = check_counting_bound(cur, d, cur_copies, budget)
        if report.passed:
            S = tuple(sorted(removed))
            return S, cur, report
        # Dense phase: the bound failed, so a subcode of density > 1/d exists.
        fail = report.first_failure()
        cutoff = fail.alpha * d
        wts = codeword_weight_array(cur, cur_copies, budget)
        light_rows = np.zeros(cur.n, dtype=bool)
        pos = 0
        for _, cws in cur.iter_codeword_chunks(budget):
            chunk_w = wts[pos : pos + cws.shape[1]]
            sel = (chunk_w > 0) & (chunk_w <= cutoff)
            if sel.any():
                light_rows |= (cws[:, sel] != 0).any(axis=1)
            pos += cws.shape[1]
        try:
            T, dim, density = densest_subcode_exact(
                cur,
                node_budget,
                cur_copies,
                within=tuple(int(i) for i in np.flatnonzero(light_rows)),
                budget=budget,
            )
            if density <= Fraction(1) / d:
                T, dim, density = densest_subcode_exact(
                    cur, node_budget, cur_copies, within=None, budget=budget
                )
        except BudgetExceeded:
            stats["escalations"] += 1
            peel_threshold = peel_threshold * 2
            continue
        if density <= Fraction(1) / d:
            raise InternalInconsistency(
                "counting bound failed but no subcode of density > 1/d exists"
            )
        stats["dense_removals"] += 1
        for i in T:
            removed.add(idx[int(i)])
