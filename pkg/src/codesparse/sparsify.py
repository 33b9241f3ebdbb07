"""The recursive sparsification pipeline.

Entry points:

  * code_sparsify          — the recursive sampler for unweighted codes:
                             decompose, keep the peeled part, subsample the
                             smooth part at rate 1/sqrt(d), recurse on both.
  * quadratic_sparsify     — one-shot importance sampling by minimum
                             codeword weight through each coordinate.
  * weight_class_decomposition / span_decomposition / make_unweighted —
                             the weighted-code machinery.
  * final_code_sparsify    — the full composition for arbitrary weighted
                             codes.

Duplicated coordinates are carried as integer multiplicities rather than
materialized rows, which keeps exhaustive verification possible even when
the conceptual duplicated code has billions of coordinates.  All sampling
probabilities are dyadic rationals and every retained weight is the exact
reciprocal of the probability actually used, so weight estimates are
exactly unbiased and all arithmetic stays rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction

import numpy as np

from .codes import (
    DEFAULT_ENUM_BUDGET,
    GeneratorMatrix,
    Sparsifier,
    _independent_columns,
    _solve,
    as_weights,
    coordinate_min_weights,
    unit_weights,
)
from .counting import DEFAULT_NODE_BUDGET, code_decomposition
from .errors import BudgetExceeded
from .dyadic import log2_dyadic, log2_pos, loglog2_clamped, sqrt_dyadic
from .errors import WeightOutOfBand, ZeroCode
from .rng import SplitMix64, derive_seed, dyadic_prob

AGGRESSIVE_ETA_FACTOR = Fraction(1, 1000)


def default_eta(k: int, epsilon: Fraction, q: int) -> Fraction:
    """100 * (log2(k/eps) * loglog2(q))^2 with desk-scale clamps."""
    k = max(2, k)
    return 100 * (log2_pos(Fraction(k) / epsilon) * loglog2_clamped(q)) ** 2


@dataclass(frozen=True)
class SparsifyParams:
    """Knobs for the recursive sparsifier.

    eta defaults to the formula value; the aggressive flag scales eta down
    by 1/1000 to force genuine sampling in demonstrations, where
    correctness is then established by exhaustive verification rather than
    by the (untuned) constants.
    """

    epsilon: Fraction
    seed: int = 0
    eta: Fraction | None = None
    base_case_multiplier: Fraction = Fraction(100)
    aggressive: bool = False
    budget: int = DEFAULT_ENUM_BUDGET
    node_budget: int = DEFAULT_NODE_BUDGET

    def __post_init__(self):
        eps = Fraction(self.epsilon)
        if not 0 < eps < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        object.__setattr__(self, "epsilon", eps)
        if self.eta is not None:
            eta = Fraction(self.eta)
            if eta <= 0:
                raise ValueError("eta must be positive")
            object.__setattr__(self, "eta", eta)
        mult = Fraction(self.base_case_multiplier)
        if mult <= 0:
            raise ValueError("base_case_multiplier must be positive")
        object.__setattr__(self, "base_case_multiplier", mult)

    def resolved_eta(self, k: int, q: int) -> Fraction:
        eta = self.eta if self.eta is not None else default_eta(k, self.epsilon, q)
        if self.aggressive:
            eta = eta * AGGRESSIVE_ETA_FACTOR
        return eta


def recursion_depth_cap(n: int) -> int:
    """2 * loglog2(max(n, 4)) + 2, rounded up."""
    inner = log2_dyadic(max(int(n), 4))  # >= 2
    ll = log2_dyadic(inner)  # >= 1
    return max(2, math.ceil(2 * ll + 2))


def _sparsify_multiplicity(
    G: GeneratorMatrix,
    row_idx: np.ndarray,
    copies: np.ndarray,
    k_param: int,
    eps: Fraction,
    eta: Fraction,
    mult: Fraction,
    rng: SplitMix64,
    depth: int,
    budget: int,
    node_budget: int,
) -> list[tuple[int, Fraction]]:
    """Recursive core over (rows of G, positive multiplicities).

    Returns (row index into G, weight) pairs; the weight already accounts
    for the multiplicity of the surviving copies and the accumulated
    1/sampling-probability factors of the branch.
    """
    if row_idx.size == 0:
        return []
    n_eff = int(copies.sum())
    kk = max(2, k_param)
    q = G.p
    logk = log2_dyadic(kk)
    logq = log2_dyadic(q)
    base_bound = mult * kk * eta * logk * logq / eps**2

    def identity() -> list[tuple[int, Fraction]]:
        return [(int(r), Fraction(int(c))) for r, c in zip(row_idx, copies)]

    if depth <= 0 or Fraction(n_eff) <= base_bound:
        return identity()

    d = Fraction(n_eff) * eps**2 / (eta * kk * logk * logq)
    sqrt_d = sqrt_dyadic(d)
    rate = Fraction(1) / sqrt_d if sqrt_d > 0 else Fraction(1)
    p_samp = dyadic_prob(min(Fraction(1), rate))

    sub = GeneratorMatrix(G.field, G.entries[row_idx, :])
    # Clamping the decomposition parameter at 1 only peels more than asked,
    # which strengthens the residual counting guarantee.
    threshold = max(sqrt_d * eta * logk * logq / eps**2, Fraction(1))
    S, _, _ = code_decomposition(sub, threshold, copies, node_budget, budget)
    s_set = set(S)
    keep_mask = np.array([i in s_set for i in range(row_idx.size)], dtype=bool)

    if keep_mask.all() or (not keep_mask.any() and p_samp >= 1):
        # No split and no genuine sampling: recursion would not shrink.
        return identity()

    out: list[tuple[int, Fraction]] = []
    left_rows = row_idx[keep_mask]
    left_copies = copies[keep_mask]
    out.extend(
        _sparsify_multiplicity(
            G, left_rows, left_copies, k_param, eps, eta, mult,
            rng.spawn("keep"), depth - 1, budget, node_budget,
        )
    )

    rest_rows = row_idx[~keep_mask]
    rest_copies = copies[~keep_mask]
    draw = rng.spawn("draw")
    sampled = np.array(
        [draw.binomial(int(c), p_samp) for c in rest_copies], dtype=np.int64
    )
    alive = sampled > 0
    weight_mult = Fraction(1) / p_samp
    for r, w in _sparsify_multiplicity(
        G, rest_rows[alive], sampled[alive], k_param, eps, eta, mult,
        rng.spawn("sample"), depth - 1, budget, node_budget,
    ):
        out.append((r, w * weight_mult))
    return out


def code_sparsify(
    G: GeneratorMatrix,
    params: SparsifyParams,
    budget: int | None = None,
) -> Sparsifier:
    """Sparsify an unweighted code by recursive decomposition and sampling.

    Deterministic given params.seed.  The returned weights are exact
    rationals; coordinates whose every copy is dropped do not appear.
    """
    budget = params.budget if budget is None else budget
    k = G.rank()
    if k == 0:
        return Sparsifier((), ())
    eta = params.resolved_eta(k, G.p)
    rng = SplitMix64(derive_seed(params.seed, "code-sparsify"))
    pairs = _sparsify_multiplicity(
        G,
        np.arange(G.n, dtype=np.int64),
        np.ones(G.n, dtype=np.int64),
        k,
        params.epsilon,
        eta,
        params.base_case_multiplier,
        rng,
        recursion_depth_cap(G.n),
        budget,
        params.node_budget,
    )
    return Sparsifier.from_pairs(pairs)


# ---------------------------------------------------------------------------
# Quadratic sparsifier.

_QUADRATIC_A = 10  # the fixed constant in the sampling probability


def _quadratic_keep(
    G: GeneratorMatrix,
    weights: tuple[Fraction, ...],
    epsilon: Fraction,
    seed: int,
    k: int | None,
    budget: int,
) -> list[tuple[int, Fraction, Fraction]]:
    """Kept (coordinate, retained weight, sampling probability) triples.

    Coordinate i is kept with probability min(1, 10 k log(q) w(i) /
    (eps^2 w_i)) where w_i is the minimum weighted codeword weight among
    codewords nonzero at i, and carries weight w(i)/p_i.  For unit weights
    this is exactly the unweighted rule; in general it keeps each
    coordinate with the total mass the duplicated-coordinate view would
    retain in expectation.
    """
    if G.rank() == 0:
        raise ZeroCode("quadratic sparsifier needs a nonzero code")
    k = G.rank() if k is None else k
    kk = max(1, k)
    logq = log2_dyadic(G.p)
    eps = Fraction(epsilon)
    factor = Fraction(_QUADRATIC_A) * kk * logq / eps**2

    support = (G.entries != 0).any(axis=1)
    # Every codeword weight is at most the total support weight, so when
    # factor * w(i) already reaches that total the probability clamps to 1
    # and the exact minimum is never needed.  This keeps small instances
    # over large fields out of the exhaustive scan entirely.
    total_weight = sum((weights[i] for i in range(G.n) if support[i]), Fraction(0))
    need_exact = [
        i for i in range(G.n) if support[i] and factor * weights[i] < total_weight
    ]

    mins: list = [None] * G.n
    if need_exact:
        den = math.lcm(*(w.denominator for w in weights)) if weights else 1
        scaled = np.array([int(w * den) for w in weights], dtype=object)
        if all(int(x) < (1 << 62) // max(1, G.n) for x in scaled):
            scaled_arr = scaled.astype(np.int64)
        else:
            scaled_arr = scaled  # object dtype, exact but slower
        exact = _scaled_min_through(G, scaled_arr, budget)
        mins = [None if m is None else Fraction(int(m), den) for m in exact]

    rng = SplitMix64(derive_seed(seed, "quadratic"))
    kept: list[tuple[int, Fraction, Fraction]] = []
    for i in range(G.n):
        if not support[i]:
            continue  # identically zero coordinate carries no weight
        if factor * weights[i] >= total_weight or mins[i] is None:
            p_i = Fraction(1)
        else:
            p_i = dyadic_prob(min(Fraction(1), factor * weights[i] / mins[i]))
        if rng.bernoulli(p_i):
            kept.append((i, weights[i] / p_i, p_i))
    return kept


def _scaled_min_through(G: GeneratorMatrix, scaled, budget: int) -> list:
    """Per coordinate, min over codewords nonzero there of the scaled
    weighted codeword weight; None where no codeword is nonzero."""
    if isinstance(scaled, np.ndarray) and scaled.dtype == np.int64:
        mins = coordinate_min_weights(G, scaled, budget)
        return [None if m < 0 else int(m) for m in mins]
    mins: list = [None] * G.n
    for _, cws in G.iter_codeword_chunks(budget):
        mask = cws != 0
        for j in range(cws.shape[1]):
            col = mask[:, j]
            if not col.any():
                continue
            wt = sum(int(scaled[i]) for i in np.flatnonzero(col))
            for i in np.flatnonzero(col):
                if mins[i] is None or wt < mins[i]:
                    mins[i] = wt
    return mins


def quadratic_sparsify(
    G: GeneratorMatrix,
    epsilon: Fraction,
    seed: int,
    weights=None,
    k: int | None = None,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> Sparsifier:
    """One-shot sparsifier keeping each coordinate with probability
    min(1, 10 k log(q) / (eps^2 w_i)) and weight w(i)/p_i."""
    ws = as_weights(weights, G.n) if weights is not None else unit_weights(G.n)
    kept = _quadratic_keep(G, ws, Fraction(epsilon), seed, k, budget)
    return Sparsifier.from_pairs((i, w) for i, w, _ in kept)


# ---------------------------------------------------------------------------
# Weight classes and span decomposition.


@dataclass(frozen=True)
class WeightClassPartition:
    """Coordinates of a weighted code bucketed by weight band.

    Band i holds weights in [alpha^(i-1), alpha^i); indices may be zero or
    negative for weights below one.
    """

    alpha: Fraction
    classes: dict[int, tuple[int, ...]] = dataclass_field(default_factory=dict)
    odd_union: tuple[int, ...] = ()
    even_union: tuple[int, ...] = ()


@dataclass(frozen=True)
class ClassedCode:
    """A weighted code whose coordinates carry weight-class labels."""

    matrix: GeneratorMatrix
    weights: tuple[Fraction, ...]
    labels: tuple[int, ...]

    def __post_init__(self):
        if not (self.matrix.n == len(self.weights) == len(self.labels)):
            raise ValueError("matrix rows, weights and labels must align")


@dataclass(frozen=True)
class SpanBlock:
    """One block of the span decomposition: the class-i coordinates of the
    first k' independent columns on that class, after cancelling the class
    from every other column."""

    class_index: int
    rows: tuple[int, ...]  # row indices into the decomposed code
    matrix: GeneratorMatrix
    weights: tuple[Fraction, ...]


def weight_band(w: Fraction, alpha: Fraction) -> int:
    """The integer i with alpha^(i-1) <= w < alpha^i."""
    if w <= 0:
        raise ValueError("weights must be positive")
    i = 1
    while w >= alpha ** i:
        i += 1
    while w < alpha ** (i - 1):
        i -= 1
    return i


def weight_class_decomposition(
    G: GeneratorMatrix,
    weights,
    epsilon: Fraction,
    k: int | None = None,
    seed: int = 0,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> tuple[ClassedCode, ClassedCode, WeightClassPartition]:
    """Quadratic-sparsify at eps/4, then split the survivors into odd and
    even weight bands with alpha = k^3 log(q) / eps^3.

    Returns the two vertical pieces (as labeled codes over the original
    coordinates) plus the partition record.
    """
    eps = Fraction(epsilon)
    ws = as_weights(weights, G.n)
    kk = max(2, G.rank() if k is None else k)
    kept = _quadratic_keep(G, ws, eps / 4, seed, kk, budget)
    alpha = Fraction(kk**3) * log2_dyadic(G.p) / eps**3

    classes: dict[int, list[int]] = {}
    weight_of: dict[int, Fraction] = {}
    for coord, w, _ in kept:
        band = weight_band(w, alpha)
        classes.setdefault(band, []).append(coord)
        weight_of[coord] = w

    def build(parity: int) -> tuple[ClassedCode, tuple[int, ...]]:
        coords = sorted(
            c for band, cs in classes.items() if band % 2 == parity for c in cs
        )
        matrix = (
            GeneratorMatrix(G.field, G.entries[coords, :])
            if coords
            else GeneratorMatrix(G.field, np.zeros((0, G.k), dtype=np.int64))
        )
        labeled = ClassedCode(
            matrix,
            tuple(weight_of[c] for c in coords),
            tuple(weight_band(weight_of[c], alpha) for c in coords),
        )
        return labeled, tuple(coords)

    odd_code, odd_coords = build(1)
    even_code, even_coords = build(0)
    partition = WeightClassPartition(
        alpha,
        {band: tuple(sorted(cs)) for band, cs in sorted(classes.items())},
        odd_coords,
        even_coords,
    )
    return odd_code, even_code, partition


def span_decomposition(D: ClassedCode, alpha: Fraction | None = None) -> list[SpanBlock]:
    """Iterate from the heaviest nonempty class downward, extracting an
    independent column block on that class and cancelling the class
    everywhere else.  The block ranks sum to rank(D)."""
    matrix = D.matrix
    p = matrix.p
    work = matrix.entries.copy()
    labels = np.array(D.labels, dtype=np.int64) if D.labels else np.zeros(0, dtype=np.int64)
    alive_cols = list(range(matrix.k))
    blocks: list[SpanBlock] = []
    while alive_cols:
        live = work[:, alive_cols]
        nonzero_rows = np.flatnonzero((live != 0).any(axis=1))
        if nonzero_rows.size == 0:
            break
        i_star = int(labels[nonzero_rows].max())
        class_rows = np.flatnonzero(labels == i_star)
        sub = work[np.ix_(class_rows, alive_cols)] % p
        pivots_local = _independent_columns(sub, p)
        pivot_cols = [alive_cols[j] for j in pivots_local]
        other_cols = [c for c in alive_cols if c not in pivot_cols]
        pivot_block = sub[:, pivots_local]
        for c in other_cols:
            col = work[np.ix_(class_rows, [c])].ravel() % p
            if not col.any():
                continue
            lam = _solve(pivot_block, p, col)
            if lam is None:
                raise AssertionError("independent columns must span the class block")
            correction = (work[:, pivot_cols] @ lam) % p
            work[:, c] = (work[:, c] - correction) % p
        block_rows = [int(r) for r in class_rows if work[r, pivot_cols].any()]
        blocks.append(
            SpanBlock(
                i_star,
                tuple(block_rows),
                GeneratorMatrix(matrix.field, work[np.ix_(block_rows, pivot_cols)] % p),
                tuple(D.weights[r] for r in block_rows),
            )
        )
        alive_cols = other_cols
    return blocks


# ---------------------------------------------------------------------------
# Unweighting by duplication.


def _unweight_copies(
    weights: tuple[Fraction, ...], alpha: Fraction, class_index: int, epsilon: Fraction
) -> tuple[list[int], Fraction]:
    eps = Fraction(epsilon)
    if not 0 < eps <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    low = alpha ** (class_index - 1)
    high = alpha ** class_index
    copies = []
    for w in weights:
        if not low <= w <= high:
            raise WeightOutOfBand(f"weight {w} outside [{low}, {high}]")
        normalized = w / low
        copies.append(int(10 * normalized / eps))
    scale = low * eps / 10
    return copies, scale


def make_unweighted(
    H: GeneratorMatrix,
    weights,
    alpha: Fraction,
    class_index: int,
    epsilon: Fraction,
    materialize_budget: int = 1 << 22,
) -> tuple[GeneratorMatrix, Fraction]:
    """Normalize weights into [1, alpha], duplicate coordinate r
    floor(10 w(r)/eps) times, and return the duplicated code with its
    reconstruction scale alpha^(i-1) * eps/10."""
    ws = as_weights(weights, H.n)
    copies, scale = _unweight_copies(ws, Fraction(alpha), class_index, Fraction(epsilon))
    total = sum(copies)
    if total > materialize_budget:
        raise BudgetExceeded(f"{total} duplicated rows exceed {materialize_budget}")
    rows = np.repeat(H.entries, copies, axis=0)
    return GeneratorMatrix(H.field, rows), scale


# ---------------------------------------------------------------------------
# The final pipeline.


def final_code_sparsify(
    G: GeneratorMatrix,
    weights=None,
    epsilon: Fraction = Fraction(1, 2),
    seed: int = 0,
    *,
    eta: Fraction | None = None,
    aggressive: bool = False,
    base_case_multiplier: Fraction = Fraction(100),
    budget: int = DEFAULT_ENUM_BUDGET,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> Sparsifier:
    """Sparsify an arbitrarily weighted code.

    Composes the weight-class decomposition (quadratic sparsifier at
    eps/4), the per-parity span decomposition, per-block unweighting at
    eps/8, and the recursive sparsifier at eps/80, then rescales each
    block by its reconstruction factor and merges duplicates by adding
    weights.
    """
    eps = Fraction(epsilon)
    params = SparsifyParams(
        epsilon=eps,
        seed=seed,
        eta=eta,
        base_case_multiplier=base_case_multiplier,
        aggressive=aggressive,
        budget=budget,
        node_budget=node_budget,
    )
    ws = as_weights(weights, G.n) if weights is not None else unit_weights(G.n)
    k = G.rank()
    if k == 0 or G.n == 0:
        return Sparsifier((), ())

    odd_code, even_code, partition = weight_class_decomposition(
        G, ws, eps, k=k, seed=derive_seed(seed, "wcd"), budget=budget
    )
    eta_resolved = params.resolved_eta(k, G.p)

    acc: dict[int, Fraction] = {}
    for parity_name, code, coords in (
        ("odd", odd_code, partition.odd_union),
        ("even", even_code, partition.even_union),
    ):
        if code.matrix.n == 0:
            continue
        blocks = span_decomposition(code, partition.alpha)
        for block in blocks:
            copies, scale = _unweight_copies(
                block.weights, partition.alpha, block.class_index, eps / 8
            )
            copies_arr = np.array(copies, dtype=np.int64)
            block_k = block.matrix.rank()
            rng = SplitMix64(
                derive_seed(seed, "block", parity_name, block.class_index)
            )
            pairs = _sparsify_multiplicity(
                block.matrix,
                np.arange(block.matrix.n, dtype=np.int64),
                copies_arr,
                max(2, block_k),
                eps / 80,
                eta_resolved,
                params.base_case_multiplier,
                rng,
                recursion_depth_cap(int(copies_arr.sum())),
                budget,
                node_budget,
            )
            for local_row, wfrac in pairs:
                global_coord = coords[block.rows[local_row]]
                acc[global_coord] = acc.get(global_coord, Fraction(0)) + wfrac * scale
    coords_sorted = tuple(sorted(acc))
    return Sparsifier(coords_sorted, tuple(acc[c] for c in coords_sorted))
