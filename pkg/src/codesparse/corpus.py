"""Deterministic test fixtures: named codes, random codes, graphs,
hypergraphs, Cayley specs, and CSP instances.  Everything is a pure
function of its parameters and seed."""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from .cayley import CayleySpec
from .codes import GeneratorMatrix
from .csp import AffinePredicate, Constraint, CSPInstance
from .field import PrimeField
from .graphs import Graph
from .hypergraphs import Hypergraph
from .rng import SplitMix64, derive_seed

_F2 = PrimeField(2)


# --- codes -----------------------------------------------------------------


def identity_code(q: int, k: int) -> GeneratorMatrix:
    return GeneratorMatrix.identity(PrimeField(q), k)


def repetition_code(q: int, n: int) -> GeneratorMatrix:
    return GeneratorMatrix(PrimeField(q), np.ones((n, 1), dtype=np.int64))


def hamming_7_4() -> GeneratorMatrix:
    parity = np.array([[1, 1, 0], [1, 0, 1], [0, 1, 1], [1, 1, 1]], dtype=np.int64)
    return GeneratorMatrix(_F2, np.vstack([np.eye(4, dtype=np.int64), parity.T]))


def simplex_code(m: int) -> GeneratorMatrix:
    """Rows are all nonzero vectors of F_2^m; every nonzero codeword has
    weight 2^(m-1)."""
    rows = [[(v >> j) & 1 for j in range(m)] for v in range(1, 1 << m)]
    return GeneratorMatrix(_F2, np.array(rows, dtype=np.int64))


def random_code(q: int, k: int, n: int, seed: int) -> GeneratorMatrix:
    rng = SplitMix64(derive_seed(seed, "code", q, k, n))
    rows = [[rng.randrange(q) for _ in range(k)] for _ in range(n)]
    return GeneratorMatrix(PrimeField(q), np.array(rows, dtype=np.int64))


def random_weights(n: int, seed: int, magnitude_bits: int = 20) -> tuple[Fraction, ...]:
    """Positive rationals spanning roughly 2^magnitude_bits, with
    power-of-two denominators."""
    rng = SplitMix64(derive_seed(seed, "weights", n))
    out = []
    for _ in range(n):
        mag = rng.randrange(magnitude_bits + 1)
        num = 1 + rng.randrange(1 << 10)
        out.append(Fraction(num << mag, 1 << rng.randrange(6)))
    return tuple(out)


# --- graphs ----------------------------------------------------------------


def complete_graph(n: int) -> Graph:
    return Graph(n, tuple((u, v, Fraction(1)) for u, v in itertools.combinations(range(n), 2)))


def cycle_graph(n: int) -> Graph:
    return Graph(n, tuple((i, (i + 1) % n, Fraction(1)) for i in range(n)))


def cube_graph(dim: int) -> Graph:
    edges = []
    for v in range(1 << dim):
        for j in range(dim):
            u = v ^ (1 << j)
            if v < u:
                edges.append((v, u, Fraction(1)))
    return Graph(1 << dim, tuple(edges))


def gnp_graph(n: int, prob: Fraction, seed: int) -> Graph:
    rng = SplitMix64(derive_seed(seed, "gnp", n))
    prob = Fraction(prob)
    edges = []
    for u, v in itertools.combinations(range(n), 2):
        if rng.bernoulli(prob):
            edges.append((u, v, Fraction(1)))
    return Graph(n, tuple(edges))


def random_two_edge_connected_graph(n: int, extra_edges: int, seed: int) -> Graph:
    """A cycle backbone plus random chords; min cut at least 2."""
    rng = SplitMix64(derive_seed(seed, "tec", n, extra_edges))
    edges = [(i, (i + 1) % n) for i in range(n)]
    present = set(tuple(sorted(e)) for e in edges)
    attempts = 0
    while len(edges) < n + extra_edges and attempts < 100 * (n + extra_edges):
        attempts += 1
        u = rng.randrange(n)
        v = rng.randrange(n)
        key = (min(u, v), max(u, v))
        if u != v and key not in present:
            present.add(key)
            edges.append(key)
    return Graph(n, tuple((u, v, Fraction(1)) for u, v in edges))


# --- hypergraphs -----------------------------------------------------------


def random_hypergraph(n: int, m: int, seed: int, max_arity: int | None = None) -> Hypergraph:
    rng = SplitMix64(derive_seed(seed, "hypergraph", n, m))
    max_arity = max_arity or max(2, n // 2)
    edges = []
    for _ in range(m):
        size = 2 + rng.randrange(max(1, max_arity - 1))
        members: set[int] = set()
        while len(members) < size:
            members.add(rng.randrange(n))
        edges.append(tuple(sorted(members)))
    return Hypergraph(n, tuple(edges))


def sunflower_hypergraph(petals: int, core: int = 2, pendant: bool = True) -> Hypergraph:
    """Petals share a common core; optionally one petal gets a private
    pendant vertex making it the unique light cut."""
    n = core + petals + (1 if pendant else 0)
    edges = []
    for i in range(petals):
        edge = tuple(range(core)) + (core + i,)
        edges.append(edge)
    if pendant:
        edges[0] = edges[0] + (n - 1,)
    return Hypergraph(n, tuple(edges))


# --- cayley ----------------------------------------------------------------


def hypercube_cayley(k: int) -> CayleySpec:
    return CayleySpec(k, tuple((1 << j, Fraction(1)) for j in range(k)))


def simplex_cayley(k: int) -> CayleySpec:
    """All nonzero generators with unit weight; the Cayley graph is the
    complete graph on F_2^k."""
    return CayleySpec(k, tuple((v, Fraction(1)) for v in range(1, 1 << k)))


def random_cayley(k: int, m: int, seed: int) -> CayleySpec:
    rng = SplitMix64(derive_seed(seed, "cayley", k, m))
    chosen: set[int] = set()
    while len(chosen) < min(m, (1 << k) - 1):
        chosen.add(1 + rng.randrange((1 << k) - 1))
    gens = tuple(
        (v, Fraction(1 + rng.randrange(8), 1 + rng.randrange(4))) for v in sorted(chosen)
    )
    return CayleySpec(k, gens)


# --- csp -------------------------------------------------------------------


def xor2_complete(k: int) -> CSPInstance:
    """All C(k, 2) binary XOR constraints: the cut CSP of the complete
    graph."""
    pred = AffinePredicate(2, (0, 1, 1))
    constraints = tuple(
        Constraint(pred, (u, v)) for u, v in itertools.combinations(range(k), 2)
    )
    return CSPInstance(k, constraints)


def random_affine_csp(p: int, k: int, m: int, arity: int, seed: int) -> CSPInstance:
    rng = SplitMix64(derive_seed(seed, "csp", p, k, m, arity))
    constraints = []
    for _ in range(m):
        coeffs = tuple(rng.randrange(p) for _ in range(arity + 1))
        if all(c == 0 for c in coeffs[1:]):
            coeffs = coeffs[:1] + tuple(1 for _ in range(arity))
        variables = []
        while len(variables) < arity:
            v = rng.randrange(k)
            if v not in variables:
                variables.append(v)
        constraints.append(Constraint(AffinePredicate(p, coeffs), tuple(variables)))
    return CSPInstance(k, tuple(constraints))


# --- the acceptance corpus of small codes ----------------------------------


def acceptance_code_corpus(seed: int = 20240401) -> list[tuple[str, GeneratorMatrix]]:
    """At least 200 codes with q in {2, 3, 5}, k <= 5, n <= 18: random
    codes of varied density plus structured families (identity,
    repetition, Hamming, simplex, and small graph cut codes)."""
    corpus: list[tuple[str, GeneratorMatrix]] = []
    for q in (2, 3, 5):
        corpus.append((f"identity-q{q}", identity_code(q, 5)))
        corpus.append((f"repetition-q{q}", repetition_code(q, 9)))
    corpus.append(("hamming74", hamming_7_4()))
    corpus.append(("simplex3", simplex_code(3)))
    corpus.append(("simplex4", simplex_code(4)))
    from .graphs import cut_code

    corpus.append(("cut-k4", cut_code(complete_graph(4))))
    corpus.append(("cut-k5", cut_code(complete_graph(5))))
    corpus.append(("cut-cycle5", cut_code(cycle_graph(5))))
    rng = SplitMix64(derive_seed(seed, "corpus"))
    idx = 0
    while len(corpus) < 216:
        q = (2, 3, 5)[rng.randrange(3)]
        k = 2 + rng.randrange(4)
        n = max(k, 4 + rng.randrange(15))
        style = rng.randrange(3)
        child = derive_seed(seed, "member", idx)
        idx += 1
        if style == 0:
            G = random_code(q, k, n, child)
        elif style == 1:
            # sparse rows: one or two nonzero entries each
            r2 = SplitMix64(child)
            rows = np.zeros((n, k), dtype=np.int64)
            for i in range(n):
                for _ in range(1 + r2.randrange(2)):
                    rows[i, r2.randrange(k)] = 1 + r2.randrange(q - 1)
            G = GeneratorMatrix(PrimeField(q), rows)
        else:
            # duplicated blocks: a few base rows copied with multiplicity
            r2 = SplitMix64(child)
            base = [[r2.randrange(q) for _ in range(k)] for _ in range(max(2, k))]
            rows = [base[r2.randrange(len(base))] for _ in range(n)]
            G = GeneratorMatrix(PrimeField(q), np.array(rows, dtype=np.int64))
        corpus.append((f"random-{idx}-q{q}k{k}n{n}", G))
    return corpus
