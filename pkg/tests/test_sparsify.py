import math
from fractions import Fraction

import numpy as np
import pytest

from codesparse.codes import (
    GeneratorMatrix,
    Sparsifier,
    unit_weights,
    verify_sparsifier,
    weight,
)
from codesparse.corpus import (
    complete_graph,
    hamming_7_4,
    identity_code,
    random_code,
    random_weights,
    repetition_code,
)
from codesparse.dyadic import log2_dyadic
from codesparse.errors import WeightOutOfBand, ZeroCode
from codesparse.field import PrimeField
from codesparse.graphs import cut_code
from codesparse.rng import SplitMix64, derive_seed, dyadic_prob
from codesparse.sparsify import (
    ClassedCode,
    SparsifyParams,
    code_sparsify,
    final_code_sparsify,
    make_unweighted,
    quadratic_sparsify,
    span_decomposition,
    weight_band,
    weight_class_decomposition,
)

F2 = PrimeField(2)


def test_params_validation():
    with pytest.raises(ValueError):
        SparsifyParams(epsilon=Fraction(0))
    with pytest.raises(ValueError):
        SparsifyParams(epsilon=Fraction(3, 2))
    with pytest.raises(ValueError):
        SparsifyParams(epsilon=Fraction(1, 2), eta=Fraction(-1))
    p = SparsifyParams(epsilon=Fraction(1, 2), aggressive=True)
    assert p.resolved_eta(6, 2) == p.resolved_eta(6, 2)
    assert p.resolved_eta(6, 2) * 1000 == SparsifyParams(epsilon=Fraction(1, 2)).resolved_eta(6, 2)


def test_base_case_returns_identity():
    I3 = identity_code(2, 3)
    sp = code_sparsify(I3, SparsifyParams(epsilon=Fraction(1, 2), seed=1))
    assert sp.coords == (0, 1, 2)
    assert set(sp.weights) == {Fraction(1)}


def test_identity_code_peel_branch():
    # Parameters chosen so the base-case guard does not fire; every
    # coordinate is the support of a weight-1 codeword and gets peeled,
    # so the output keeps all of them at weight one.
    I8 = identity_code(2, 8)
    params = SparsifyParams(
        epsilon=Fraction(99, 100),
        seed=3,
        eta=Fraction(1),
        base_case_multiplier=Fraction(1, 100),
    )
    sp = code_sparsify(I8, params)
    assert sp.coords == tuple(range(8))
    assert set(sp.weights) == {Fraction(1)}


def test_code_sparsify_deterministic():
    G = random_code(2, 5, 600, 12)
    params = SparsifyParams(
        epsilon=Fraction(1, 2), seed=99, eta=Fraction(8), base_case_multiplier=Fraction(1)
    )
    assert code_sparsify(G, params) == code_sparsify(G, params)


def test_code_sparsify_genuine_sampling_verifies():
    ok = 0
    sizes = []
    for s in range(10):
        G = random_code(2, 6, 4096, derive_seed(9000, s))
        params = SparsifyParams(
            epsilon=Fraction(1, 2),
            seed=derive_seed(4141, s),
            eta=Fraction(10),
            base_case_multiplier=Fraction(1),
        )
        sp = code_sparsify(G, params)
        sizes.append(len(sp))
        ok += verify_sparsifier(G, None, sp, Fraction(1, 2)).passed
    assert ok == 10
    assert all(size < 4096 // 4 for size in sizes)


def test_quadratic_identity_keeps_everything():
    I6 = identity_code(2, 6)
    sp = quadratic_sparsify(I6, Fraction(1, 2), seed=5)
    assert sp.coords == tuple(range(6))
    assert set(sp.weights) == {Fraction(1)}


def test_quadratic_zero_code_rejected():
    zero = GeneratorMatrix(F2, np.zeros((3, 2), dtype=np.int64))
    with pytest.raises(ZeroCode):
        quadratic_sparsify(zero, Fraction(1, 2), seed=1)


def test_quadratic_repetition_concentration():
    # All per-coordinate minima equal the length, so each coordinate is
    # kept with the same small probability; the retained count lands near
    # its binomial mean.
    n = 10_000
    rep = repetition_code(2, n)
    eps = Fraction(1, 2)
    p = dyadic_prob(Fraction(10) * 1 * log2_dyadic(2) / (eps**2 * n))
    mean = float(p) * n
    sigma = math.sqrt(n * float(p) * (1 - float(p)))
    sp = quadratic_sparsify(rep, eps, seed=77)
    assert abs(len(sp) - mean) <= 4 * sigma
    # Reciprocal weights make the single nonzero codeword exact on average;
    # at this seed it verifies at the target accuracy.
    assert verify_sparsifier(rep, None, sp, eps).passed


def test_quadratic_expected_size_bound():
    # Expected retained count is at most 10 k^2 log(q) / eps^2 because the
    # reciprocal minima sum to at most k.
    rng = SplitMix64(404)
    eps = Fraction(1, 2)
    for trial in range(10):
        q = (2, 3, 5)[rng.randrange(3)]
        G = random_code(q, 2 + rng.randrange(4), 6 + rng.randrange(10), 8800 + trial)
        if G.rank() == 0:
            continue
        sp = quadratic_sparsify(G, eps, seed=trial)
        limit = 2 * 10 * G.rank() ** 2 * float(log2_dyadic(q)) / float(eps) ** 2
        assert len(sp) <= max(limit, G.n)


def test_reciprocal_minima_sum_bound():
    # Sum over coordinates of 1/w_i is at most the dimension.
    from codesparse.codes import coordinate_min_weights

    rng = SplitMix64(15)
    for trial in range(15):
        q = (2, 3, 5)[rng.randrange(3)]
        G = random_code(q, 2 + rng.randrange(4), 4 + rng.randrange(12), 5150 + trial)
        mins = coordinate_min_weights(G)
        total = sum(Fraction(1, int(m)) for m in mins if m > 0)
        assert total <= G.rank()


def test_hamming_minima():
    mins = set()
    from codesparse.codes import coordinate_min_weights

    mins = coordinate_min_weights(hamming_7_4()).tolist()
    assert mins == [3] * 7


def test_weight_band_conventions():
    alpha = Fraction(216)
    assert weight_band(Fraction(1), alpha) == 1
    assert weight_band(alpha - 1, alpha) == 1
    assert weight_band(alpha, alpha) == 2
    assert weight_band(alpha**2, alpha) == 3
    assert weight_band(Fraction(1, 2), alpha) == 0
    with pytest.raises(ValueError):
        weight_band(Fraction(0), alpha)


def test_weight_classes_uniform():
    I3 = identity_code(2, 3)
    odd, even, part = weight_class_decomposition(I3, unit_weights(3), Fraction(1, 2), seed=2)
    assert dict(part.classes) == {1: (0, 1, 2)}
    assert part.even_union == ()
    assert odd.matrix.n == 3 and even.matrix.n == 0


def test_weight_classes_separated_bands():
    I3 = identity_code(2, 3)
    eps = Fraction(1, 2)
    k = 3
    alpha = Fraction(k**3) * log2_dyadic(2) / eps**3
    ws = (Fraction(1), alpha + 1, alpha**2 + 1)
    odd, even, part = weight_class_decomposition(I3, ws, eps, k=k, seed=3)
    assert part.classes == {1: (0,), 2: (1,), 3: (2,)}
    assert part.odd_union == (0, 2)
    assert part.even_union == (1,)


def test_weight_class_domination_invariant():
    # Any single coordinate of class j outweighs everything in classes
    # j-2, j-4, ... by at least alpha / retained-count.
    rng = SplitMix64(5)
    for trial in range(6):
        G = random_code(2, 4, 12, 7100 + trial)
        if G.rank() == 0:
            continue
        ws = random_weights(12, 600 + trial)
        odd, even, part = weight_class_decomposition(G, ws, Fraction(1, 2), seed=trial)
        retained = sum(len(v) for v in part.classes.values())
        if retained == 0:
            continue
        weight_of = {}
        for code in (odd, even):
            for coord, w in zip(
                (part.odd_union if code is odd else part.even_union), code.weights
            ):
                weight_of[coord] = w
        for j, coords_j in part.classes.items():
            lower_total = sum(
                (weight_of[c] for jj, cs in part.classes.items() if jj <= j - 2 for c in cs),
                Fraction(0),
            )
            if lower_total == 0:
                continue
            for c in coords_j:
                assert weight_of[c] >= part.alpha / retained * lower_total


def test_span_decomposition_single_class():
    I3 = identity_code(2, 3)
    D = ClassedCode(I3, (Fraction(2),) * 3, (1, 1, 1))
    blocks = span_decomposition(D)
    assert len(blocks) == 1
    assert blocks[0].class_index == 1
    assert blocks[0].rows == (0, 1, 2)
    assert blocks[0].matrix.rank() == 3


def test_span_decomposition_block_diagonal():
    m = GeneratorMatrix.from_rows(F2, [[1, 0], [1, 0], [0, 1], [0, 1]])
    D = ClassedCode(
        m,
        (Fraction(1), Fraction(1), Fraction(10**9), Fraction(10**9)),
        (2, 2, 4, 4),
    )
    blocks = span_decomposition(D)
    assert [b.class_index for b in blocks] == [4, 2]
    assert sum(b.matrix.rank() for b in blocks) == m.rank()


def test_span_decomposition_rank_conservation_random():
    rng = SplitMix64(8)
    for trial in range(10):
        q = (2, 3)[rng.randrange(2)]
        G = random_code(q, 2 + rng.randrange(4), 8, 910 + trial)
        labels = tuple(1 + rng.randrange(3) for _ in range(8))
        D = ClassedCode(G, tuple(Fraction(2) ** l for l in labels), labels)
        blocks = span_decomposition(D)
        assert sum(b.matrix.rank() for b in blocks) == G.rank()


def test_span_decomposition_residual_span_property():
    # After processing the top class, every codeword vanishing on that
    # class lies in the span of the residual columns (checked by comparing
    # the subcode vanishing there with the residual block structure).
    rng = SplitMix64(21)
    for trial in range(8):
        G = random_code(2, 4, 10, 333 + trial)
        labels = tuple(2 if i < 5 else 1 for i in range(10))
        weights = tuple(Fraction(1000) if l == 2 else Fraction(1) for l in labels)
        D = ClassedCode(G, weights, labels)
        blocks = span_decomposition(D)
        top = [b for b in blocks if b.class_index == 2]
        if not top:
            continue
        top_block = top[0]
        # Codewords of D that vanish on all class-2 rows must be expressible
        # with zero contribution from the block's pivot columns: their
        # restriction to the block rows is zero.
        for c in G.enumerate_codewords():
            if all(c[r] == 0 for r in range(10) if labels[r] == 2):
                assert all(c[r] == 0 for r in top_block.rows)


def test_make_unweighted_examples():
    H = GeneratorMatrix.from_rows(F2, [[1]])
    dup, scale = make_unweighted(H, [Fraction(1)], Fraction(100), 1, Fraction(1, 2))
    assert dup.n == 20 and scale * dup.n == 1
    dup2, scale2 = make_unweighted(H, [Fraction(5, 2)], Fraction(100), 1, Fraction(1, 2))
    assert dup2.n == 50 and scale2 * dup2.n == Fraction(5, 2)


def test_make_unweighted_band_check_and_floor_bound():
    H = GeneratorMatrix.from_rows(F2, [[1], [1]])
    alpha = Fraction(100)
    with pytest.raises(WeightOutOfBand):
        make_unweighted(H, [Fraction(1), Fraction(200)], alpha, 1, Fraction(1, 2))
    rng = SplitMix64(6)
    for trial in range(10):
        eps = Fraction(1, 1 + rng.randrange(4))
        w = Fraction(1) + Fraction(rng.randrange(9900), 100)
        dup, scale = make_unweighted(
            GeneratorMatrix.from_rows(F2, [[1]]), [w], alpha, 1, eps
        )
        reconstructed = scale * dup.n
        assert w - eps / 10 <= reconstructed <= w


def test_make_unweighted_higher_band():
    H = GeneratorMatrix.from_rows(F2, [[1]])
    alpha = Fraction(10)
    dup, scale = make_unweighted(H, [Fraction(30)], alpha, 2, Fraction(1, 2))
    # Normalized weight 3, eps/10 scale of the band floor.
    assert dup.n == 60 and scale == Fraction(10) * Fraction(1, 2) / 10
    assert Fraction(30) - Fraction(10) * Fraction(1, 2) / 10 <= scale * dup.n <= Fraction(30)


def test_final_identity_exact():
    I8 = identity_code(2, 8)
    sp = final_code_sparsify(I8, None, Fraction(1, 2), seed=9)
    assert sp.coords == tuple(range(8))
    assert set(sp.weights) == {Fraction(1)}
    assert verify_sparsifier(I8, None, sp, Fraction(1, 2)).max_relative_error == 0


def test_final_small_code_identity_weights():
    # Below every threshold the pipeline reconstructs weights exactly.
    G = random_code(3, 3, 10, 77)
    ws = tuple(Fraction(1 + i) for i in range(10))
    sp = final_code_sparsify(G, ws, Fraction(1, 2), seed=4)
    rep = verify_sparsifier(G, ws, sp, Fraction(1, 2))
    assert rep.passed


def test_final_weighted_spanning_magnitudes():
    npass = 0
    for s in range(10):
        rng = SplitMix64(derive_seed(1000, "corpus", s))
        q = (2, 3, 5)[rng.randrange(3)]
        k = 4 + rng.randrange(3)
        n = 300 + rng.randrange(201)
        G = random_code(q, k, n, derive_seed(64, s))
        ws = random_weights(n, derive_seed(65, s))
        sp = final_code_sparsify(G, ws, Fraction(1, 2), seed=derive_seed(66, s), aggressive=True)
        rep = verify_sparsifier(G, ws, sp, Fraction(1, 2))
        npass += rep.passed
        assert len(sp) < n
    assert npass >= 9


def test_final_deterministic():
    G = random_code(2, 5, 400, 3)
    ws = random_weights(400, 8)
    a = final_code_sparsify(G, ws, Fraction(1, 2), seed=101, aggressive=True)
    b = final_code_sparsify(G, ws, Fraction(1, 2), seed=101, aggressive=True)
    assert a == b


def test_sampling_preserves_smooth_codes():
    # A code whose counting bound holds at its minimum distance b can be
    # uniformly sampled at rate ~ eta log(k) log(q) / (b eps^2) with
    # reciprocal weights; at least 90% of seeds verify.
    G = cut_code(complete_graph(8))
    b = G.min_distance()
    k = G.rank()
    eps = Fraction(1, 2)
    from codesparse.counting import check_counting_bound

    assert check_counting_bound(G, b).passed
    eta = Fraction(11, 20)
    rate = dyadic_prob(min(Fraction(1), eta * log2_dyadic(k) * log2_dyadic(2) / (b * eps**2)))
    assert rate < 1  # genuine sampling
    npass = 0
    for s in range(100):
        rng = SplitMix64(derive_seed(31337, "samp", s))
        pairs = [(i, Fraction(1) / rate) for i in range(G.n) if rng.bernoulli(rate)]
        sp = Sparsifier.from_pairs(pairs)
        npass += verify_sparsifier(G, None, sp, eps).passed
    assert npass >= 90


def test_concentration_primitive():
    # Reciprocal-weight Bernoulli sums concentrate: the empirical failure
    # rate stays below the analytic exponential bound (plus noise).
    ell, p, eps = 600, Fraction(1, 3), 0.25
    bound = 2 * math.exp(-0.38 * eps**2 * ell * float(p))
    trials = 3000
    rng = SplitMix64(31415)
    failures = 0
    inv_p = 1 / float(p)
    for _ in range(trials):
        total = sum(inv_p for _ in range(ell) if rng.bernoulli(p))
        if abs(total - ell) > eps * ell:
            failures += 1
    sigma = math.sqrt(max(bound, 1e-6) * (1 - min(bound, 1)) / trials)
    assert failures / trials <= bound + 3 * sigma + 1e-9


def test_duplicate_merge_invariance():
    # Merging equal coordinates by adding weights never changes any
    # codeword's weighted weight.
    G = random_code(2, 3, 6, 55)
    doubled = GeneratorMatrix(F2, np.vstack([G.entries, G.entries[:2]]))
    merged = Sparsifier.from_pairs([(0, Fraction(2)), (1, Fraction(3)), (0, Fraction(1))])
    assert merged.coords == (0, 1)
    assert merged.weights == (Fraction(3), Fraction(3))
    for c in doubled.enumerate_codewords():
        split_weight = (
            Fraction(2) * (c[0] != 0) + Fraction(1) * (c[0] != 0) + Fraction(3) * (c[1] != 0)
    )
        assert split_weight == weight(c[:2], merged.weights)
