"""Graphs, cut codes, exact global minimum cuts, and the self-contained
recursive cut sparsifier (peel small cuts, sample the rest, recurse)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .codes import GeneratorMatrix, VerificationReport, as_weight
from .dyadic import log2_dyadic, sqrt_dyadic
from .errors import BudgetExceeded, DimensionMismatch
from .field import PrimeField
from .rng import SplitMix64, derive_seed, dyadic_prob

_F2 = PrimeField(2)


@dataclass(frozen=True)
class Graph:
    """Vertices 0..n-1 with a positively weighted edge list; parallel edges
    are allowed and kept as separate entries."""

    n_vertices: int
    edges: tuple[tuple[int, int, Fraction], ...]

    def __post_init__(self):
        norm = []
        for u, v, w in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise ValueError(f"edge ({u},{v}) outside vertex range")
            norm.append((min(u, v), max(u, v), as_weight(w)))
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def simple(self) -> bool:
        seen = set()
        for u, v, _ in self.edges:
            if (u, v) in seen:
                return False
            seen.add((u, v))
        return True

    def is_unweighted(self) -> bool:
        return all(w == 1 for _, _, w in self.edges)

    def subgraph_edges(self, edge_ids) -> "Graph":
        return Graph(self.n_vertices, tuple(self.edges[i] for i in sorted(edge_ids)))

    def edge_weights(self) -> tuple[Fraction, ...]:
        return tuple(w for _, _, w in self.edges)

    def cut_value(self, side) -> Fraction:
        side_set = set(side)
        total = Fraction(0)
        for u, v, w in self.edges:
            if (u in side_set) != (v in side_set):
                total += w
        return total


def cut_code(g: Graph) -> GeneratorMatrix:
    """One row per edge with ones in the endpoint columns; the weight of
    the encoding of a cut indicator equals the cut size."""
    rows = np.zeros((g.m, g.n_vertices), dtype=np.int64)
    for i, (u, v, _) in enumerate(g.edges):
        rows[i, u] = 1
        rows[i, v] = 1
    return GeneratorMatrix(_F2, rows)


def connected_components(g: Graph, edge_ids=None) -> list[list[int]]:
    parent = list(range(g.n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    ids = range(g.m) if edge_ids is None else edge_ids
    for i in ids:
        u, v, _ = g.edges[i]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    comps: dict[int, list[int]] = {}
    for v in range(g.n_vertices):
        comps.setdefault(find(v), []).append(v)
    return sorted(comps.values())


def stoer_wagner_min_cut(g: Graph, vertices) -> tuple[Fraction, tuple[int, ...]]:
    """Exact global minimum cut of the induced subgraph on the given
    connected vertex set, by maximum-adjacency orderings.

    Returns (cut value, one side of an optimal cut).  Deterministic:
    ties in the orderings resolve to the smallest vertex index.
    """
    verts = sorted(int(v) for v in vertices)
    if len(verts) < 2:
        raise ValueError("minimum cut needs at least two vertices")
    index = {v: i for i, v in enumerate(verts)}
    size = len(verts)
    w = [[Fraction(0)] * size for _ in range(size)]
    for u, v, wt in g.edges:
        if u in index and v in index:
            iu, iv = index[u], index[v]
            w[iu][iv] += wt
            w[iv][iu] += wt
    groups = [[verts[i]] for i in range(size)]
    active = list(range(size))
    best_value: Fraction | None = None
    best_side: tuple[int, ...] = ()
    while len(active) > 1:
        # Maximum adjacency search from the first active vertex.
        start = active[0]
        added = [start]
        in_a = {start}
        key = {v: w[start][v] for v in active if v != start}
        while len(added) < len(active):
            nxt = None
            for v in active:
                if v in in_a:
                    continue
                if nxt is None or key[v] > key[nxt] or (key[v] == key[nxt] and v < nxt):
                    nxt = v
            added.append(nxt)
            in_a.add(nxt)
            for v in active:
                if v not in in_a:
                    key[v] += w[nxt][v]
        s, t = added[-2], added[-1]
        cut_of_phase = sum(w[t][v] for v in active if v != t)
        if best_value is None or cut_of_phase < best_value:
            best_value = cut_of_phase
            best_side = tuple(sorted(groups[t]))
        # Merge t into s.
        groups[s] = groups[s] + groups[t]
        for v in active:
            if v != s and v != t:
                w[s][v] += w[t][v]
                w[v][s] = w[s][v]
        active.remove(t)
    return best_value, best_side


def peel_small_cuts(g: Graph, threshold) -> tuple[tuple[int, ...], Graph]:
    """Repeatedly remove every edge of a per-component global minimum cut
    while some component's minimum cut is at or below the threshold.

    Returns (removed edge ids, residual graph with remaining edges in the
    original order).  The removal count never exceeds (n-1) * threshold.
    """
    threshold = Fraction(threshold)
    alive = set(range(g.m))
    changed = True
    while changed:
        changed = False
        for comp in connected_components(g, sorted(alive)):
            if len(comp) < 2:
                continue
            comp_set = set(comp)
            comp_edges = [
                i for i in sorted(alive)
                if g.edges[i][0] in comp_set and g.edges[i][1] in comp_set
            ]
            if not comp_edges:
                continue
            sub = Graph(g.n_vertices, tuple(g.edges[i] for i in comp_edges))
            value, side = stoer_wagner_min_cut(sub, comp)
            if value > threshold:
                continue
            side_set = set(side)
            for i in comp_edges:
                if (g.edges[i][0] in side_set) != (g.edges[i][1] in side_set):
                    alive.discard(i)
                    changed = True
    removed = tuple(sorted(set(range(g.m)) - alive))
    residual = Graph(g.n_vertices, tuple(g.edges[i] for i in sorted(alive)))
    return removed, residual


def graph_sparsify_appendix(
    g: Graph,
    epsilon: Fraction,
    seed: int,
    C_override: Fraction | None = None,
    base_edge_override: Fraction | None = None,
) -> Graph:
    """Recursive cut sparsifier for unweighted graphs.

    Level i peels every edge in a nonempty cut of size at most
    gamma(n) * n^(1/2^i) with gamma(n) = C log2(n), C = 100/eps^2 by
    default, samples the rest at rate n^(-1/2^i), and recurses on both
    parts, weighting the sampled branch by the reciprocal of its actual
    sampling probability.  Parallel copies arising from the union merge by
    weight addition.
    """
    epsilon = Fraction(epsilon)
    if not g.is_unweighted():
        raise ValueError("the recursive cut sparsifier expects an unweighted graph")
    n = max(g.n_vertices, 2)
    C = Fraction(C_override) if C_override is not None else Fraction(100) / epsilon**2
    gamma = C * log2_dyadic(n)
    base_edges = (
        Fraction(base_edge_override)
        if base_edge_override is not None
        else Fraction(n) * log2_dyadic(n) / epsilon**2
    )
    i_max = 0
    while (1 << (1 << i_max)) < n:  # smallest i with n^(1/2^i) <= 2
        i_max += 1

    # n^(1/2^i) via iterated dyadic square roots.
    n_roots = [Fraction(n)]
    for _ in range(i_max + 1):
        n_roots.append(max(sqrt_dyadic(n_roots[-1]), Fraction(1)))

    weights_acc: dict[int, Fraction] = {}

    def recurse(edge_ids: tuple[int, ...], i: int, rng: SplitMix64, mult: Fraction):
        if not edge_ids:
            return
        if i >= i_max or Fraction(len(edge_ids)) <= base_edges:
            for e in edge_ids:
                weights_acc[e] = weights_acc.get(e, Fraction(0)) + mult
            return
        sub = g.subgraph_edges(edge_ids)
        id_map = sorted(edge_ids)
        threshold = gamma * n_roots[i]
        removed_local, _ = peel_small_cuts(sub, threshold)
        removed = set(id_map[j] for j in removed_local)
        rest = [e for e in id_map if e not in removed]
        p = dyadic_prob(min(Fraction(1), Fraction(1) / n_roots[i]))
        draw = rng.spawn("draw")
        sampled = tuple(e for e in rest if draw.bernoulli(p))
        recurse(tuple(sorted(removed)), i + 1, rng.spawn("peel"), mult)
        recurse(sampled, i + 1, rng.spawn("sample"), mult / p)

    recurse(tuple(range(g.m)), 0, SplitMix64(derive_seed(seed, "graph-sparsify")), Fraction(1))
    edges = tuple(
        (g.edges[e][0], g.edges[e][1], weights_acc[e]) for e in sorted(weights_acc)
    )
    return Graph(g.n_vertices, edges)


def _grouped_cut_values(graph: Graph, masks: np.ndarray) -> tuple[list, int]:
    """Exact cut values for all vertex subsets encoded in masks (bit v-1 =
    vertex v; vertex 0 always inside), as integer numerators over a common
    denominator."""
    import math

    by_weight: dict[Fraction, list[tuple[int, int]]] = {}
    for u, v, w in graph.edges:
        by_weight.setdefault(w, []).append((u, v))
    den = math.lcm(*(w.denominator for w in by_weight)) if by_weight else 1

    def crossing_bit(vertex: int) -> np.ndarray:
        if vertex == 0:
            return np.ones_like(masks)
        return (masks >> (vertex - 1)) & 1

    total = np.zeros(masks.shape[0], dtype=object)
    for w, pairs in by_weight.items():
        counts = np.zeros(masks.shape[0], dtype=np.int64)
        for u, v in pairs:
            counts += crossing_bit(u) ^ crossing_bit(v)
        total = total + int(w * den) * counts.astype(object)
    return list(total), den


def verify_cut_sparsifier(
    g: Graph, h: Graph, epsilon: Fraction, max_vertices: int = 20
) -> VerificationReport:
    """Exhaustive exact check of every nonempty proper cut.

    The witness, when present, is the sorted vertex tuple of the first
    failing side containing vertex 0.
    """
    epsilon = Fraction(epsilon)
    if g.n_vertices != h.n_vertices:
        raise DimensionMismatch("graphs must share the vertex set")
    n = g.n_vertices
    if n > max_vertices:
        raise BudgetExceeded(f"{n} vertices exceed the exhaustive cut budget {max_vertices}")
    lo_num, lo_den = (1 - epsilon).numerator, (1 - epsilon).denominator
    hi_num, hi_den = (1 + epsilon).numerator, (1 + epsilon).denominator
    masks = np.arange((1 << (n - 1)) - 1, dtype=np.int64)  # skip the full set
    gv, g_den = _grouped_cut_values(g, masks)
    hv, h_den = _grouped_cut_values(h, masks)
    passed = True
    witness = None
    best_num, best_den = 0, 1
    for mask, a, b in zip(masks, gv, hv):
        a_scaled = int(a) * h_den
        b_scaled = int(b) * g_den
        if a == 0:
            ok = b == 0
        else:
            ok = lo_num * a_scaled <= lo_den * b_scaled and hi_den * b_scaled <= hi_num * a_scaled
            err = abs(b_scaled - a_scaled)
            if err * best_den > best_num * a_scaled:
                best_num, best_den = err, a_scaled
        if not ok and passed:
            passed = False
            witness = tuple([0] + [v for v in range(1, n) if (int(mask) >> (v - 1)) & 1])
    best = Fraction(best_num, best_den) if best_num else Fraction(0)
    return VerificationReport(passed, epsilon, best, witness, int(masks.shape[0]))
