import math

import numpy as np
import pytest

from orbitgap import (
    L1,
    L2,
    LINF,
    NormSpec,
    SpanBasis,
    best_scalar,
    distance,
    distance_batch_oracle,
    distance_convex_descent,
    distance_if_extended,
    extend,
)
from orbitgap.subspace import DEPENDENCY_TOL
from orbitgap.errors import DimensionMismatch


def rand_span(rng, dim, rank, field="real"):
    gens = []
    for _ in range(rank):
        v = rng.standard_normal(dim)
        if field == "complex":
            v = v + 1j * rng.standard_normal(dim)
        gens.append(v)
    return SpanBasis.from_vectors(gens)


def test_worked_example_l2():
    # e = (1,1,1) against span{(1,2,0), (0,1,3)}: distance sqrt(8/23)
    Y = SpanBasis.from_vectors([np.array([1.0, 2.0, 0.0]), np.array([0.0, 1.0, 3.0])])
    d = distance(np.array([1.0, 1.0, 1.0]), Y, L2)
    assert d == pytest.approx(math.sqrt(8.0 / 23.0), rel=1e-14)


def test_empty_span_distance_is_norm():
    e = np.array([3.0, -4.0])
    Y = SpanBasis.empty(2)
    assert distance(e, Y, L2) == pytest.approx(5.0, abs=1e-15)
    assert distance(e, Y, L1) == pytest.approx(7.0, abs=1e-15)


def test_orthonormality_and_flags():
    rng = np.random.default_rng(3)
    v1 = rng.standard_normal(10)
    v2 = rng.standard_normal(10)
    Y = SpanBasis.from_vectors([v1, v2, v1 + v2, rng.standard_normal(10)])
    assert Y.dim == 10
    assert len(Y.generators) == 4
    assert Y.rank == 3
    assert Y.dependency_flags == (False, False, True, False)
    Q = np.array(Y.ortho)
    gram = Q.conj() @ Q.T
    assert np.allclose(gram, np.eye(3), atol=1e-12)


def test_extend_is_incremental_from_vectors():
    rng = np.random.default_rng(4)
    gens = [rng.standard_normal(8) for _ in range(5)]
    whole = SpanBasis.from_vectors(gens)
    Y = SpanBasis.empty(8)
    for g in gens:
        Y = extend(Y, g)
    assert Y.rank == whole.rank
    assert np.allclose(np.array(Y.ortho), np.array(whole.ortho), atol=1e-12)


def test_dependency_tolerance_boundary():
    v = np.array([1.0, 0.0])
    Y = SpanBasis.from_vectors([v])
    # exactly parallel, tiny: flagged dependent, rank unchanged
    Y2 = extend(Y, 1e-3 * v)
    assert Y2.rank == 1 and Y2.dependency_flags[-1]
    # nearly parallel but above tolerance: independent
    Y3 = extend(Y, v + np.array([0.0, 10.0 * DEPENDENCY_TOL]))
    assert Y3.rank == 2


def test_extend_dim_mismatch():
    Y = SpanBasis.empty(3)
    with pytest.raises(DimensionMismatch):
        extend(Y, np.zeros(4))
    with pytest.raises(DimensionMismatch):
        distance(np.zeros(4), Y)


def test_membership_gives_zero():
    rng = np.random.default_rng(5)
    Y = rand_span(rng, 12, 4)
    inside = np.array(Y.generators[0]) * 0.7 - 2.0 * np.array(Y.generators[2])
    for spec in (L2, L1, LINF, NormSpec(1.7)):
        assert distance(inside, Y, spec) <= 1e-10
        assert distance_batch_oracle(inside, Y.generators, spec) <= 1e-8


def test_distance_if_extended_matches_extend():
    rng = np.random.default_rng(6)
    for spec in (L2, L1, LINF, NormSpec(2.5)):
        Y = rand_span(rng, 10, 3)
        e = rng.standard_normal(10)
        v = rng.standard_normal(10)
        d1 = distance_if_extended(e, Y, v, spec)
        d2 = distance(e, extend(Y, v), spec)
        assert d1 == pytest.approx(d2, rel=1e-9, abs=1e-12)


def test_incremental_vs_batch_small_sweep():
    rng = np.random.default_rng(7)
    for spec in (L2, L1, LINF):
        for _ in range(15):
            dim = int(rng.integers(2, 20))
            rank = int(rng.integers(1, min(dim, 6) + 1))
            Y = rand_span(rng, dim, rank)
            e = rng.standard_normal(dim)
            a = distance(e, Y, spec)
            b = distance_batch_oracle(e, Y.generators, spec)
            assert a == pytest.approx(b, rel=1e-9, abs=1e-11)


def test_lp_vs_descent_real():
    rng = np.random.default_rng(8)
    for spec in (L1, LINF):
        for _ in range(10):
            Y = rand_span(rng, 14, 4)
            e = rng.standard_normal(14)
            a = distance(e, Y, spec)
            c = distance_convex_descent(e, Y.generators, spec)
            assert a == pytest.approx(c, rel=1e-6, abs=1e-8)


def test_general_p_between_neighbors():
    # p = 1.5 distance sits between the p = 1 and p = 2 distances
    rng = np.random.default_rng(9)
    for _ in range(10):
        Y = rand_span(rng, 10, 3)
        e = rng.standard_normal(10)
        d1 = distance(e, Y, L1)
        d15 = distance(e, Y, NormSpec(1.5))
        d2 = distance(e, Y, L2)
        assert d2 - 1e-9 <= d15 <= d1 + 1e-9


def test_weighted_distance():
    # weights fold into the vectors: dist_w(e, Y) = dist(w*e, w*Y)
    rng = np.random.default_rng(10)
    w = tuple(rng.uniform(0.5, 2.0, 9))
    wa = np.asarray(w)
    for p in (1.0, 2.0, math.inf):
        spec = NormSpec(p, weights=w)
        plain = NormSpec(p)
        gens = [rng.standard_normal(9) for _ in range(3)]
        e = rng.standard_normal(9)
        a = distance(e, SpanBasis.from_vectors(gens), spec)
        b = distance(wa * e, SpanBasis.from_vectors([wa * g for g in gens]), plain)
        assert a == pytest.approx(b, rel=1e-8, abs=1e-10)


def test_complex_distances():
    rng = np.random.default_rng(11)
    for spec in (L2, L1, LINF, NormSpec(3.0)):
        for _ in range(6):
            Y = rand_span(rng, 8, 3, field="complex")
            e = rng.standard_normal(8) + 1j * rng.standard_normal(8)
            a = distance(e, Y, spec)
            b = distance_batch_oracle(e, Y.generators, spec)
            assert a == pytest.approx(b, rel=1e-7, abs=1e-9)


def test_complex_l2_hand_value():
    # span{(1, i)} in C^2, e = (1, 0): projection halves the norm
    Y = SpanBasis.from_vectors([np.array([1.0, 1.0j])])
    d = distance(np.array([1.0 + 0.0j, 0.0j]), Y, L2)
    assert d == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-13)


def test_pythagoras_l2():
    rng = np.random.default_rng(12)
    for _ in range(30):
        Y = rand_span(rng, 12, 4)
        e = rng.standard_normal(12)
        d = distance(e, Y, L2)
        Q = np.array(Y.ortho)
        proj = Q.T @ (Q.conj() @ e)
        lhs = d * d + float(np.linalg.norm(proj)) ** 2
        rhs = float(np.linalg.norm(e)) ** 2
        assert lhs == pytest.approx(rhs, rel=1e-10)


def test_best_scalar_l2_closed_form():
    rng = np.random.default_rng(13)
    t = rng.standard_normal(7)
    u = rng.standard_normal(7)
    c, err = best_scalar(t, u, L2)
    assert c == pytest.approx(float(t @ u) / float(u @ u), rel=1e-13)
    # stationarity: nudging c cannot help
    for dc in (1e-6, -1e-6):
        assert float(np.linalg.norm(t - (c + dc) * u)) >= err - 1e-15


def test_best_scalar_general_p_beats_grid():
    rng = np.random.default_rng(14)
    t = rng.standard_normal(6)
    u = rng.standard_normal(6)
    for spec in (L1, LINF, NormSpec(1.3)):
        c, err = best_scalar(t, u, spec)
        from orbitgap import norm

        grid = np.linspace(-5.0, 5.0, 4001)
        brute = min(norm(t - g * u, spec) for g in grid)
        assert err <= brute + 1e-6


def test_best_scalar_zero_direction():
    t = np.array([1.0, 2.0])
    c, err = best_scalar(t, np.zeros(2), L2)
    assert c == 0.0
    assert err == pytest.approx(math.sqrt(5.0), rel=1e-14)


def test_distance_scale_invariance_of_span():
    # scaling the generators never moves the span
    rng = np.random.default_rng(15)
    gens = [rng.standard_normal(9) for _ in range(3)]
    e = rng.standard_normal(9)
    for spec in (L2, L1, LINF):
        a = distance_batch_oracle(e, gens, spec)
        b = distance_batch_oracle(e, [1e6 * g for g in gens], spec)
        assert a == pytest.approx(b, rel=1e-8)
