import itertools
from fractions import Fraction

import numpy as np
import pytest

from conftest import brute_nearest_distance, small_codes
from rhdecode import (
    BudgetExceeded,
    admissible_capability,
    build_window_code,
    covering_radius,
    density_stats,
    min_distance,
    ml_decode,
    multiplicity_bound,
    nearest_codewords,
    new_conv_code,
)
from rhdecode.block import all_vectors
from rhdecode.errors import DimensionError
from rhdecode.gf import Field, mat_rank


def test_bundled_generators(f2_code):
    assert build_window_code(f2_code, 1).B.tolist() == [[0, 1], [1, 1], [1, 0], [0, 1]]
    assert build_window_code(f2_code, 2).B.tolist() == [
        [0, 1, 1, 1],
        [1, 1, 1, 0],
        [0, 0, 0, 1],
        [0, 0, 1, 1],
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 0, 1, 0],
        [0, 0, 0, 1],
    ]


def test_bundled_check_matrix(f5_code):
    wc = build_window_code(f5_code, 2)
    assert wc.H.tolist() == [[1, 0, 1, 3, 4, 3], [0, 1, 0, 0, 1, 3]]
    assert min_distance(wc) == 2


@pytest.mark.parametrize("N", [1, 2, 3])
def test_structure(N):
    for code in small_codes(seed=5, count=1):
        wc = build_window_code(code, N)
        assert not np.any((wc.H @ wc.B).a)
        assert mat_rank(wc.B) == N * code.k
        assert mat_rank(wc.H) == N * (code.n - code.k)
        bottom = wc.B.a[N * (code.n - code.k) :]
        assert np.array_equal(bottom, np.eye(N * code.k, dtype=np.int64))


def test_distance_and_radius_examples(f2_code):
    w1 = build_window_code(f2_code, 1)
    assert min_distance(w1) == 2
    assert covering_radius(w1) == 1
    rep = new_conv_code([], [], [], [[1], [1]], 2)
    assert covering_radius(build_window_code(rep, 1)) == 1
    assert min_distance(build_window_code(rep, 1)) == 3


def _brute_radius(wc):
    p = wc.field.p
    cws = (all_vectors(p, wc.dimension) @ wc.B.a.T) % p
    worst = 0
    for z in all_vectors(p, wc.length):
        worst = max(worst, int(np.count_nonzero(cws != z, axis=1).min()))
    return worst


def _min_dependent_columns(H):
    n = H.cols
    for size in range(1, n + 1):
        for cols in itertools.combinations(range(n), size):
            sub = H.a[:, cols]
            from rhdecode.gf import FMatrix

            if mat_rank(FMatrix(H.field, sub)) < size:
                return size
    return n + 1


def test_radius_and_distance_oracles():
    for code in small_codes(seed=6, count=1):
        for N in (1, 2):
            wc = build_window_code(code, N)
            if wc.field.p ** wc.length > 5000:
                continue
            assert covering_radius(wc) == _brute_radius(wc)
            assert min_distance(wc) == _min_dependent_columns(wc.H)


def test_ml_decode_oracle_and_radius_attained():
    for code in small_codes(seed=7, count=1):
        wc = build_window_code(code, 2)
        if wc.field.p ** wc.length > 5000:
            continue
        seen_max = 0
        for z in all_vectors(wc.field.p, wc.length):
            res = ml_decode(wc, tuple(int(v) for v in z))
            assert res.weight == brute_nearest_distance(wc, z)
            assert res.weight <= wc.rho
            assert not any(wc.syndrome(res.codeword))
            seen_max = max(seen_max, res.weight)
        assert seen_max == wc.rho


def test_ml_decode_ties(f2_code):
    w1 = build_window_code(f2_code, 1)
    res = ml_decode(w1, (0, 1, 0, 0))
    assert res.tie_count == 2 and res.weight == 1
    assert nearest_codewords(w1, (0, 1, 0, 0)) == [(0, 0, 0, 0), (0, 1, 1, 0)]
    assert res.codeword in nearest_codewords(w1, (0, 1, 0, 0))
    w2 = build_window_code(f2_code, 2)
    res = ml_decode(w2, (1, 1, 0, 1, 0, 0, 0, 0))
    assert res.codeword == (1, 1, 0, 1, 0, 0, 1, 0) and res.tie_count == 1


def test_tie_count_matches_enumeration():
    for code in small_codes(seed=8, count=1)[:8]:
        wc = build_window_code(code, 1)
        for z in all_vectors(wc.field.p, wc.length):
            z = tuple(int(v) for v in z)
            assert ml_decode(wc, z).tie_count == len(nearest_codewords(wc, z))


def test_codeword_decodes_to_itself(f5_code):
    wc = build_window_code(f5_code, 2)
    cw = tuple(int(v) for v in wc.B.apply((1, 2, 3, 4)))
    res = ml_decode(wc, cw)
    assert res.codeword == cw and res.weight == 0 and res.tie_count == 1


def test_ml_decode_dimension(f5_code):
    with pytest.raises(DimensionError):
        ml_decode(build_window_code(f5_code, 2), (0, 1))


def test_admissible_examples(f5_code, f2_code):
    adm = admissible_capability(build_window_code(f5_code, 2), 1)
    assert adm.protected == (2, 5, 6) and adm.d_prime == 2 and adm.correctable == 1
    adm = admissible_capability(build_window_code(f2_code, 1), 1)
    assert adm.protected == (1, 2, 3, 4) and adm.d_prime == 1


def test_admissible_full_update_is_distance_minus_one():
    for code in small_codes(seed=9, count=1):
        for N in (1, 2):
            wc = build_window_code(code, N)
            adm = admissible_capability(wc, N)
            assert adm.protected == tuple(range(1, wc.length + 1))
            assert adm.d_prime == min_distance(wc) - 1
            assert adm.meets_side_condition


def test_density_examples():
    ham = density_stats(7, 4, 3, Field(2))
    assert ham.t == 1 and ham.density == 1 and ham.p_outside == 0
    d1 = density_stats(5, 2, 1, 3)
    assert d1.t == 0 and d1.density == Fraction(1, 27)
    assert density_stats(4, 2, 3, 5).E_kt == 9


def test_density_matches_ball_count():
    for code in small_codes(seed=10, count=1):
        wc = build_window_code(code, 2)
        p = wc.field.p
        if p**wc.length > 5000:
            continue
        d = min_distance(wc)
        ds = density_stats(wc.length, wc.dimension, d, wc.field)
        cws = (all_vectors(p, wc.dimension) @ wc.B.a.T) % p
        inside = 0
        for z in all_vectors(p, wc.length):
            if int(np.count_nonzero(cws != z, axis=1).min()) <= ds.t:
                inside += 1
        assert Fraction(inside, p**wc.length) == ds.density


def test_multiplicity_examples(f2_code, f5_code):
    assert multiplicity_bound(f2_code, 1, 1, 2) == Fraction(3, 16)
    c1 = density_stats(3, 2, min_distance(build_window_code(f5_code, 1)), 5)
    c2 = build_window_code(f5_code, 2)
    pout = density_stats(c2.length, c2.dimension, min_distance(c2), 5).p_outside
    assert multiplicity_bound(f5_code, 2, 2, 2) == c1.density * pout / c1.E_kt
    perfect = new_conv_code([], [], [], [[1], [1]], 2)
    assert multiplicity_bound(perfect, 1, 1, 2) == 0


def test_budget_exceeded(f5_code):
    wc = build_window_code(f5_code, 3, budget=10)
    with pytest.raises(BudgetExceeded):
        min_distance(wc)
    with pytest.raises(BudgetExceeded):
        wc.syndrome_table
