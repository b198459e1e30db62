import itertools

import numpy as np
import pytest

from rhdecode import NotControllable, NotObservable, SymbolSeq, encode, load_code, new_conv_code
from rhdecode.block import all_vectors


@pytest.fixture(scope="session")
def f5_code():
    return load_code("bundled:f5_example")[0]


@pytest.fixture(scope="session")
def f2_code():
    return load_code("bundled:f2_example")[0]


def random_code(rng, p, delta, k, r):
    """A random minimal realization, retried until controllable and observable."""
    while True:
        A = rng.integers(0, p, (delta, delta)).tolist() if delta else []
        B = rng.integers(0, p, (delta, k)).tolist() if delta else []
        C = rng.integers(0, p, (r, delta)).tolist() if delta else []
        D = rng.integers(0, p, (r, k)).tolist()
        try:
            return new_conv_code(A, B, C, D, p)
        except (NotControllable, NotObservable):
            continue


def small_codes(seed=0, count=3):
    """Random codes with p**delta <= 16 in a handful of shapes."""
    rng = np.random.default_rng(seed)
    shapes = [(2, 0, 1, 1), (2, 1, 1, 1), (2, 2, 1, 1), (2, 2, 2, 1), (3, 1, 1, 1), (3, 2, 1, 1), (5, 1, 1, 1), (2, 3, 1, 2)]
    out = []
    for p, delta, k, r in shapes:
        for _ in range(count):
            out.append(random_code(rng, p, delta, k, r))
    return out


def random_received(code, T, rng):
    syms = rng.integers(0, code.p, (T + 1, code.n)).tolist()
    return SymbolSeq.from_symbols(code.field, syms, code.n - code.k)


def brute_nearest_distance(wc, z):
    p = wc.field.p
    msgs = all_vectors(p, wc.dimension)
    cws = (msgs @ wc.B.a.T) % p
    return int(np.count_nonzero(cws != np.asarray(z) % p, axis=1).min())


def brute_exact_cost(code, received):
    """Minimum distance from ``received`` to any codeword of degree <= T + kappa_max."""
    from rhdecode import cost

    T = len(received) - 1
    horizon = T + 1 + code.kappa_max
    best = None
    for flat in itertools.product(range(code.p), repeat=horizon * code.k):
        u = [flat[i * code.k : (i + 1) * code.k] for i in range(horizon)]
        cw, x = encode(code, u)
        if any(x):
            continue
        c = cost(received, cw)
        best = c if best is None else min(best, c)
    return best


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
