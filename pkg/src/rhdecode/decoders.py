"""Receding-horizon decoding and the exact dynamic-programming decoder.

The receding-horizon decoder repeatedly solves an ``N``-step tracking
problem by maximum-likelihood decoding of the window block code ``C_N``,
commits the first ``L`` inputs, advances the state, and finally steers the
state back to zero.  :func:`exact_decode` solves the whole tracking problem
by backward dynamic programming over the full state space and serves as the
optimality oracle.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .block import WindowCode, build_window_code
from .budget import check_budget
from .errors import DimensionError
from .gf import weight
from .system import ConvCode, SymbolSeq, encode, zero_return_extension

Vector = tuple[int, ...]


@dataclass(frozen=True)
class HorizonParams:
    N: int
    L: int

    def __post_init__(self) -> None:
        if not 1 <= self.L <= self.N:
            raise ValueError(f"need 1 <= L <= N, got N={self.N}, L={self.L}")


@dataclass(frozen=True)
class DecodeResult:
    u_seq: tuple[Vector, ...]
    codeword: SymbolSeq
    cost: int
    tau: int
    tie_events: tuple[tuple[int, int], ...] = ()
    per_step_costs: tuple[int, ...] = ()


def cost(received: SymbolSeq, candidate: SymbolSeq, horizon: int | None = None) -> int:
    """Hamming distance between two symbol sequences, zero-padding the shorter.

    With ``horizon`` only time instants ``0 .. horizon-1`` are counted.
    """
    length = max(len(received), len(candidate))
    if horizon is not None:
        length = min(length, horizon)
    total = 0
    for seq_a, seq_b in ((received.y, candidate.y), (received.u, candidate.u)):
        for t in range(length):
            a = seq_a[t] if t < len(seq_a) else None
            b = seq_b[t] if t < len(seq_b) else None
            if a is None and b is None:
                continue
            if a is None:
                total += weight(b)
            elif b is None:
                total += weight(a)
            else:
                total += sum(1 for x, y in zip(a, b) if x != y)
    return total


def cost_bound(wc: WindowCode, T: int, L: int) -> int:
    """Upper bound ``ceil(T / L) * rho_N`` on the cost over time instants ``0 .. T-1``."""
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    return math.ceil(T / L) * wc.rho


def _check_received(code: ConvCode, received: SymbolSeq) -> None:
    if received.field != code.field:
        raise ValueError(f"received sequence over {received.field!r}, code over {code.field!r}")
    if len(received) and (len(received.y[0]) != code.n - code.k or len(received.u[0]) != code.k):
        raise DimensionError(f"received symbols do not split as ({code.n - code.k}, {code.k})")


def _received_syndromes(wc: WindowCode, received: SymbolSeq, starts: Sequence[int]) -> np.ndarray:
    """Received-data part of the window syndromes, one row per window start.

    The window vector is ``z = (y~ - O x; -u~)`` in decreasing time order, so
    ``H z = (y~_window - T u~_window) - O x``; this returns the first term.
    """
    code = wc.code
    N, r, k, p = wc.N, code.n - code.k, code.k, code.p
    length = len(received)
    last = max(starts) + N if len(starts) else 0
    ys = np.zeros((max(last, length), r), dtype=np.int64)
    us = np.zeros((max(last, length), k), dtype=np.int64)
    if length:
        ys[:length] = received.y
        us[:length] = received.u
    st = np.asarray(starts, dtype=np.int64)
    # row block i of the window holds time t + N - i (i = 1..N)
    times = st[:, None] + (N - 1 - np.arange(N))[None, :]
    zy = ys[times].reshape(len(starts), N * r)
    zu = (-us[times]).reshape(len(starts), N * k)
    return (np.hstack([zy, zu]) @ wc.H.a.T) % p


def receding_horizon_decode(
    code: ConvCode,
    received: SymbolSeq,
    params: HorizonParams,
    window: WindowCode | None = None,
    budget: int | None = None,
) -> DecodeResult:
    """Decode ``received`` (time instants ``0..T``) with window ``N`` and update length ``L``."""
    _check_received(code, received)
    N, L = params.N, params.L
    wc = window if window is not None else build_window_code(code, N, budget)
    if wc.code != code or wc.N != N:
        raise ValueError("window code does not match the code and window length")
    table = wc.syndrome_table
    p, k, r = code.p, code.k, code.n - code.k
    T = len(received) - 1
    starts = list(range(0, T + 1, L))
    g = _received_syndromes(wc, received, starts).tolist() if starts else []
    O_rows = [tuple(int(v) for v in row) for row in wc.O.a]
    place = wc._syn_place
    leaders, counts, weights = table.leaders, table.counts, table.weights
    base = N * r

    x = code.zero_state()
    u_seq: list[Vector] = []
    y_seq: list[Vector] = []
    ties: list[tuple[int, int]] = []
    step_costs: list[int] = []
    for step, t in enumerate(starts):
        idx = 0
        for gi, orow, pl in zip(g[step], O_rows, place):
            idx += pl * ((gi - sum(o * xi for o, xi in zip(orow, x))) % p)
        e = leaders[idx]
        step_costs.append(weights[idx])
        if counts[idx] > 1:
            ties.append((t, counts[idx]))
        for i in range(min(L, T + 1 - t)):
            # u[t+i] sits in slot N-i of the message part; u = u~ + e there
            off = base + (N - 1 - i) * k
            ut = received.u[t + i]
            u = tuple((ut[j] + e[off + j]) % p for j in range(k))
            y, x = code.step(x, u)
            u_seq.append(u)
            y_seq.append(y)
    ext = zero_return_extension(code, x, budget)
    tail, final = encode(code, ext, x)
    if any(final):
        raise AssertionError("zero-return extension did not reach the zero state")
    u_all = tuple(u_seq) + tail.u
    cw = SymbolSeq(tuple(y_seq) + tail.y, u_all, code.field)
    return DecodeResult(u_all, cw, cost(received, cw), len(ext), tuple(ties), tuple(step_costs))


def exact_decode(code: ConvCode, received: SymbolSeq, budget: int | None = None) -> DecodeResult:
    """Globally minimum-distance codeword of degree ``<= T + kappa_max``.

    Backward dynamic programming over all ``p^delta`` states with the terminal
    state pinned to zero; the received word is zero-padded beyond ``T``.  Ties
    go to the lexicographically smallest input.
    """
    _check_received(code, received)
    p, k, r, delta = code.p, code.k, code.n - code.k, code.delta
    nstates = p**delta
    ninputs = p**k
    check_budget("trellis transitions", nstates * ninputs, budget)
    states = list(itertools.product(range(p), repeat=delta))
    inputs = list(itertools.product(range(p), repeat=k))
    outputs = list(itertools.product(range(p), repeat=r))
    out_index = {y: i for i, y in enumerate(outputs)}
    state_index = {s: i for i, s in enumerate(states)}
    nxt = [[0] * ninputs for _ in range(nstates)]
    yout = [[0] * ninputs for _ in range(nstates)]
    for si, s in enumerate(states):
        for ai, a in enumerate(inputs):
            y, x1 = code.step(s, a)
            nxt[si][ai] = state_index[x1]
            yout[si][ai] = out_index[y]

    T = len(received) - 1
    horizon = T + 1 + code.kappa_max
    inf = math.inf
    V = [0.0 if s == 0 else inf for s in range(nstates)]
    choice: list[list[int]] = [None] * horizon  # type: ignore[list-item]
    zero_y, zero_u = (0,) * r, (0,) * k
    for t in range(horizon - 1, -1, -1):
        yt = received.y[t] if t <= T else zero_y
        ut = received.u[t] if t <= T else zero_u
        ycost = [sum(1 for a, b in zip(y, yt) if a != b) for y in outputs]
        ucost = [sum(1 for a, b in zip(u, ut) if a != b) for u in inputs]
        newV = [inf] * nstates
        arg = [0] * nstates
        for si in range(nstates):
            best = inf
            besta = 0
            ns, yo = nxt[si], yout[si]
            for ai in range(ninputs):
                c = ucost[ai] + ycost[yo[ai]] + V[ns[ai]]
                if c < best:
                    best = c
                    besta = ai
            newV[si] = best
            arg[si] = besta
        V = newV
        choice[t] = arg

    s = 0
    path: list[Vector] = []
    trail: list[int] = []
    for t in range(horizon):
        a = choice[t][s]
        path.append(inputs[a])
        s = nxt[s][a]
        trail.append(s)
    # drop trailing idle symbols beyond T once the state has returned to zero
    keep = horizon
    while keep > T + 1 and not any(path[keep - 1]) and (keep == 1 or trail[keep - 2] == 0):
        keep -= 1
    u_all = tuple(path[:keep])
    cw, final = encode(code, u_all)
    if any(final):
        raise AssertionError("dynamic program returned a path that does not end in the zero state")
    per_stage = tuple(cost(_slice(received, t), _slice(cw, t)) for t in range(len(cw)))
    return DecodeResult(u_all, cw, cost(received, cw), keep - (T + 1), (), per_stage)


def _slice(seq: SymbolSeq, t: int) -> SymbolSeq:
    if t < len(seq):
        return SymbolSeq((seq.y[t],), (seq.u[t],), seq.field)
    return SymbolSeq((), (), seq.field)
