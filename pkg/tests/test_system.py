import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_code, small_codes
from rhdecode import (
    NotControllable,
    SymbolSeq,
    controllability_indices,
    encode,
    is_codeword,
    new_conv_code,
    verify_realization,
    zero_return_extension,
)
from rhdecode.errors import DimensionError
from rhdecode.gf import Field, FPolyMatrix
from rhdecode.system import PolyGenerator, generator_codeword, is_codeword_kernel

F5_G = [[(1,), (4, 1)], [(3,), (0, 1)], [(1,), ()]]


def test_bundled_codes_parameters(f5_code, f2_code):
    assert (f5_code.n, f5_code.k, f5_code.delta) == (3, 2, 1)
    assert (f2_code.n, f2_code.k, f2_code.delta) == (4, 2, 2)
    assert controllability_indices(f5_code) == (1, 0)
    assert (f5_code.kappa_min, f5_code.kappa_max) == (0, 1)
    assert controllability_indices(f2_code) == (1, 1)


def test_not_controllable():
    with pytest.raises(NotControllable):
        new_conv_code([[0]], [[0, 0]], [[1]], [[1, 1]], 5)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        new_conv_code([[0]], [[1, 2, 3]], [[4]], [[1, 3]], 5)


def test_kappa_sums_to_delta():
    for code in small_codes(seed=3):
        assert sum(code.kappa) == code.delta
        assert code.kappa_min <= code.delta // code.k


def test_encode_examples(f5_code, f2_code):
    seq, x = encode(f5_code, [(1, 0)])
    assert seq.y == ((1,),) and x == (1,)
    seq, x = encode(f2_code, [(1, 0)], x0=(1, 0))
    assert seq.y == ((0, 0),) and x == (1, 1)
    seq, x = encode(f2_code, [(0, 0)] * 4)
    assert seq.weight() == 0 and x == (0, 0)


@given(st.integers(0, 10**6), st.integers(1, 6))
@settings(max_examples=60, deadline=None)
def test_encode_linear(seed, length):
    rng = np.random.default_rng(seed)
    code = random_code(rng, 3, 2, 2, 1)
    u1 = rng.integers(0, 3, (length, 2)).tolist()
    u2 = rng.integers(0, 3, (length, 2)).tolist()
    s = [[(a + b) % 3 for a, b in zip(r1, r2)] for r1, r2 in zip(u1, u2)]
    c1, x1 = encode(code, u1)
    c2, x2 = encode(code, u2)
    c, x = encode(code, s)
    assert c == c1 + c2
    assert x == tuple((a + b) % 3 for a, b in zip(x1, x2))


def test_zero_return_examples(f5_code, f2_code):
    assert zero_return_extension(f5_code, (0,)) == ()
    assert zero_return_extension(f5_code, (1,)) == ((0, 0),)
    assert zero_return_extension(f2_code, (1, 1)) == ((0, 1),)


def test_zero_return_exhaustive():
    for code in small_codes(seed=4):
        for x in itertools.product(range(code.p), repeat=code.delta):
            ext = zero_return_extension(code, x)
            assert len(ext) <= code.kappa_max
            _, final = encode(code, ext, x)
            assert not any(final)
            # minimality of tau: no shorter sequence reaches zero
            if ext:
                tau = len(ext) - 1
                for flat in itertools.product(range(code.p), repeat=tau * code.k):
                    u = [flat[i * code.k : (i + 1) * code.k] for i in range(tau)]
                    assert any(encode(code, u, x)[1])


def test_zero_return_min_weight(f2_code):
    for x in itertools.product(range(2), repeat=2):
        ext = zero_return_extension(f2_code, x)
        tau = len(ext)
        best = min(
            (sum(map(bool, flat)), flat)
            for flat in itertools.product(range(2), repeat=tau * 2)
            if not any(encode(f2_code, [flat[i * 2 : i * 2 + 2] for i in range(tau)], x)[1])
        )
        assert tuple(v for u in ext for v in u) == best[1]


def test_membership_examples(f2_code):
    F = f2_code.field
    assert is_codeword(f2_code, SymbolSeq.zeros(F, 3, 4, 2))
    seq, x = encode(f2_code, [(1, 0)], x0=(1, 0))
    assert not is_codeword(f2_code, seq)
    u = [(1, 1), (1, 0)]
    body, x = encode(f2_code, u)
    ext = zero_return_extension(f2_code, x)
    full, _ = encode(f2_code, u + list(ext))
    assert is_codeword(f2_code, full) and is_codeword_kernel(f2_code, full)


@given(st.integers(0, 10**6), st.integers(1, 5), st.booleans())
@settings(max_examples=120, deadline=None)
def test_membership_agree(seed, length, make_codeword):
    rng = np.random.default_rng(seed)
    code = small_codes(seed=1)[seed % 24]
    if make_codeword:
        u = rng.integers(0, code.p, (length, code.k)).tolist()
        seq, x = encode(code, u)
        ext = zero_return_extension(code, x)
        seq, _ = encode(code, u + list(ext))
        assert is_codeword(code, seq)
        if ext and any(x):
            trunc = SymbolSeq(seq.y[:-1], seq.u[:-1], seq.field)
            still_home = not any(encode(code, trunc.u)[1])
            assert is_codeword(code, trunc) == still_home
    else:
        syms = rng.integers(0, code.p, (length, code.n)).tolist()
        seq = SymbolSeq.from_symbols(code.field, syms, code.n - code.k)
    assert is_codeword(code, seq) == is_codeword_kernel(code, seq)


def test_verify_realization_f5(f5_code):
    F5 = Field(5)
    G = FPolyMatrix(F5, F5_G)
    gen = PolyGenerator(G)
    assert verify_realization(f5_code, gen)
    assert gen.delta == f5_code.delta
    assert not verify_realization(f5_code, PolyGenerator(G, (1, 0, 2)))
    bad = [list(r) for r in F5_G]
    bad[0][0] = (2,)
    assert not verify_realization(f5_code, PolyGenerator(FPolyMatrix(F5, bad)))


def test_verify_realization_static():
    code = new_conv_code([], [], [], [[2, 1]], 3)
    F3 = Field(3)
    gen = PolyGenerator.from_parts(FPolyMatrix(F3, [[(2,), (1,)]]), FPolyMatrix.identity(F3, 2))
    assert verify_realization(code, gen)


def test_generator_codewords_are_codewords(f5_code):
    gen = PolyGenerator(FPolyMatrix(Field(5), F5_G))
    rng = np.random.default_rng(11)
    for _ in range(30):
        deg = int(rng.integers(0, 4))
        v = rng.integers(0, 5, (deg + 1, 2)).tolist()
        y, u = generator_codeword(gen, v)
        seq, _ = encode(f5_code, u)
        assert list(seq.y) == y
        horizon = len(u) + f5_code.kappa_max
        pad = list(u) + [(0, 0)] * (horizon - len(u))
        assert not any(encode(f5_code, pad)[1])


def test_singular_q_rejected():
    F = Field(2)
    with pytest.raises(ValueError):
        PolyGenerator(FPolyMatrix(F, [[(1,), (1,)], [(1,), (1,)], [(1,), (1,)]]))
