"""Window block codes and the quantities their decoding guarantees rest on.

For a window of ``N`` time steps the block code ``C_N`` has length ``N n``
and dimension ``N k``.  Coordinates run in *decreasing* time: the first
``N (n-k)`` entries hold ``y[t+N-1], ..., y[t]`` and the last ``N k`` entries
hold ``u[t+N-1], ..., u[t]``, so ``u[t]`` sits in the last ``k`` slots.

With ``T_N`` the block upper-triangular Toeplitz matrix whose first block row
is ``[D, CB, CAB, ..., C A^(N-2) B]``::

    B_N = [-T_N; I]        H_N = [I | T_N]

Over GF(2) the sign is immaterial.  Over odd fields the map ``(y, u) -> (y, -u)``
is a support-preserving isometry onto the span of ``[T_N; I]``, so weights,
distances, ties and supports are the same in either convention.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import NamedTuple

import numpy as np

from .budget import check_budget
from .errors import DimensionError
from .gf import Field, FMatrix, block_matrix, hstack, vstack
from .system import ConvCode

Vector = tuple[int, ...]


def window_toeplitz(code: ConvCode, N: int) -> FMatrix:
    field = code.field
    zero = FMatrix.zeros(field, code.n - code.k, code.k)
    markov = [code.markov(m) for m in range(N)]
    return block_matrix(field, [[markov[j - i] if j >= i else zero for j in range(N)] for i in range(N)])


def free_response(code: ConvCode, N: int) -> FMatrix:
    """``[C A^(N-1); ...; C A; C]``: window outputs driven by the initial state."""
    field = code.field
    r = code.n - code.k
    if code.delta == 0:
        return FMatrix.zeros(field, N * r, 0)
    blocks = [code.C @ code.A.power(N - i) for i in range(1, N + 1)]
    return vstack(blocks)


class WindowDecode(NamedTuple):
    codeword: Vector
    error: Vector
    weight: int
    tie_count: int


@dataclass(frozen=True, eq=False)
class WindowCode:
    """The length ``N n`` block code solving one ``N``-step tracking problem."""

    code: ConvCode
    N: int
    B: FMatrix
    H: FMatrix
    O: FMatrix
    budget: int | None = None

    @property
    def field(self) -> Field:
        return self.code.field

    @property
    def length(self) -> int:
        return self.N * self.code.n

    @property
    def dimension(self) -> int:
        return self.N * self.code.k

    @property
    def redundancy(self) -> int:
        return self.N * (self.code.n - self.code.k)

    @cached_property
    def d(self) -> int:
        return min_distance(self)

    @cached_property
    def rho(self) -> int:
        return covering_radius(self)

    @cached_property
    def syndrome_table(self) -> SyndromeTable:
        return SyndromeTable.build(self, self.budget)

    @cached_property
    def _h_rows(self) -> tuple[Vector, ...]:
        return tuple(tuple(int(v) for v in row) for row in self.H.a)

    @cached_property
    def _syn_place(self) -> tuple[int, ...]:
        m = self.redundancy
        return tuple(self.field.p ** (m - 1 - i) for i in range(m))

    def syndrome(self, z: Sequence[int]) -> Vector:
        p = self.field.p
        return tuple(sum(h * v for h, v in zip(row, z)) % p for row in self._h_rows)

    def syndrome_index(self, z: Sequence[int]) -> int:
        p = self.field.p
        return sum(pl * (sum(h * v for h, v in zip(row, z)) % p) for pl, row in zip(self._syn_place, self._h_rows))

    def protected_indices(self, L: int) -> tuple[int, ...]:
        """1-based coordinates whose decoding errors are not admissible for update length ``L``."""
        if not 1 <= L <= self.N:
            raise ValueError(f"need 1 <= L <= N={self.N}, got L={L}")
        r, k, N = self.code.n - self.code.k, self.code.k, self.N
        n = self.code.n
        return tuple(range((N - L) * r + 1, N * r + 1)) + tuple(range(N * n - L * k + 1, N * n + 1))


@lru_cache(maxsize=128)
def _cached_window_code(code: ConvCode, N: int, budget: int | None) -> WindowCode:
    field = code.field
    Tn = window_toeplitz(code, N)
    eye_u = FMatrix.identity(field, N * code.k)
    eye_y = FMatrix.identity(field, N * (code.n - code.k))
    B = vstack([-Tn, eye_u])
    H = hstack([eye_y, Tn])
    wc = WindowCode(code, N, B, H, free_response(code, N), budget)
    if any(int(v) for v in (H @ B).a.reshape(-1)):
        raise AssertionError("window check matrix does not annihilate the generator")
    return wc


def build_window_code(code: ConvCode, N: int, budget: int | None = None) -> WindowCode:
    if N < 1:
        raise ValueError(f"window length must be >= 1, got {N}")
    return _cached_window_code(code, N, budget)


# ---------------------------------------------------------------------------
# enumeration helpers


def all_vectors(p: int, length: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Vectors of GF(p)^length with lexicographic indices in ``[start, stop)``."""
    stop = p**length if stop is None else stop
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((idx.size, length), dtype=np.int64)
    for j in range(length - 1, -1, -1):
        out[:, j] = idx % p
        idx //= p
    return out


def iter_codewords(wc: WindowCode, budget: int | None = None, chunk: int = 1 << 16) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield ``(messages, codewords)`` chunks covering all of ``C_N``."""
    p = wc.field.p
    total = p**wc.dimension
    check_budget(f"codewords of C_{wc.N}", total, wc.budget if budget is None else budget)
    Bt = wc.B.a.T
    for start in range(0, total, chunk):
        msgs = all_vectors(p, wc.dimension, start, min(total, start + chunk))
        yield msgs, (msgs @ Bt) % p


def min_distance(wc: WindowCode, budget: int | None = None) -> int:
    """Exact minimum distance by exhaustive codeword enumeration."""
    best = wc.length + 1
    for msgs, cws in iter_codewords(wc, budget):
        w = np.count_nonzero(cws, axis=1)
        w = w[np.any(msgs != 0, axis=1)]
        if w.size:
            best = min(best, int(w.min()))
    return best


class SyndromeTable:
    """Canonical coset leader and number of minimum-weight coset vectors per syndrome.

    The canonical leader is the lexicographically smallest vector of minimum
    weight in its coset.
    """

    def __init__(self, leaders: list[Vector], counts: list[int], weights: list[int]):
        self.leaders = leaders
        self.counts = counts
        self.weights = weights

    @property
    def covering_radius(self) -> int:
        return max(self.weights)

    @classmethod
    def build(cls, wc: WindowCode, budget: int | None = None) -> SyndromeTable:
        p = wc.field.p
        m, length = wc.redundancy, wc.length
        nsyn = p**m
        limit = check_budget(f"syndromes of C_{wc.N}", nsyn, budget)
        Ht = wc.H.a.T
        place = np.array([p ** (m - 1 - i) for i in range(m)], dtype=np.int64)
        leaders: list[Vector | None] = [None] * nsyn
        counts = [0] * nsyn
        weights = [0] * nsyn
        leaders[0] = (0,) * length
        counts[0] = 1
        remaining = nsyn - 1
        examined = 1
        for w in range(1, length + 1):
            if remaining == 0:
                break
            level = math.comb(length, w) * (p - 1) ** w
            examined += level
            check_budget(f"coset-leader search of C_{wc.N} through weight {w}", examined, limit)
            values = all_vectors(p - 1, w) + 1
            newly: dict[int, Vector] = {}
            level_counts = np.zeros(nsyn, dtype=np.int64)
            combos = itertools.combinations(range(length), w)
            per_chunk = max(1, (1 << 16) // max(1, values.shape[0]))
            while True:
                batch = list(itertools.islice(combos, per_chunk))
                if not batch:
                    break
                pos = np.array(batch, dtype=np.int64)
                vecs = np.zeros((pos.shape[0] * values.shape[0], length), dtype=np.int64)
                rows = np.repeat(np.arange(vecs.shape[0]), w)
                cols = np.repeat(pos, values.shape[0], axis=0).reshape(-1)
                vecs[rows, cols] = np.tile(values, (pos.shape[0], 1)).reshape(-1)
                syn = ((vecs @ Ht) % p) @ place
                level_counts += np.bincount(syn, minlength=nsyn)
                order = np.lexsort(vecs.T[::-1])
                syn_sorted = syn[order]
                uniq, first = np.unique(syn_sorted, return_index=True)
                for s, i in zip(uniq.tolist(), first.tolist()):
                    if leaders[s] is not None and s not in newly:
                        continue
                    cand = tuple(int(v) for v in vecs[order[i]])
                    if s not in newly or cand < newly[s]:
                        newly[s] = cand
            for s, vec in newly.items():
                leaders[s] = vec
                counts[s] = int(level_counts[s])
                weights[s] = w
            remaining -= len(newly)
        if remaining:
            raise AssertionError("syndrome table incomplete; H_N is not full rank")
        return cls(leaders, counts, weights)  # type: ignore[arg-type]


def covering_radius(wc: WindowCode, budget: int | None = None) -> int:
    """Exact covering radius: the largest coset-leader weight."""
    table = wc.syndrome_table if budget is None else SyndromeTable.build(wc, budget)
    return table.covering_radius


def ml_decode(wc: WindowCode, z: Sequence[int]) -> WindowDecode:
    """Nearest codeword to ``z`` with the number of equally near codewords."""
    if len(z) != wc.length:
        raise DimensionError(f"received window has length {len(z)}, expected {wc.length}")
    p = wc.field.p
    table = wc.syndrome_table
    s = wc.syndrome_index(z)
    e = table.leaders[s]
    cw = tuple((a - b) % p for a, b in zip(z, e))
    return WindowDecode(cw, e, table.weights[s], table.counts[s])


def nearest_codewords(wc: WindowCode, z: Sequence[int], budget: int | None = None) -> list[Vector]:
    """All codewords at minimum distance from ``z``, found by enumeration, sorted."""
    if len(z) != wc.length:
        raise DimensionError(f"received window has length {len(z)}, expected {wc.length}")
    zv = np.asarray(z, dtype=np.int64) % wc.field.p
    best = wc.length + 1
    found: list[Vector] = []
    for _, cws in iter_codewords(wc, budget):
        dist = np.count_nonzero(cws != zv, axis=1)
        m = int(dist.min())
        if m < best:
            best, found = m, []
        if m == best:
            found.extend(tuple(int(v) for v in row) for row in cws[dist == m])
    return sorted(found)


@dataclass(frozen=True)
class AdmissibleCapability:
    d_prime: int
    protected: tuple[int, ...]
    d_N: int

    @property
    def meets_side_condition(self) -> bool:
        """Whether ``d' >= d_N - 1``."""
        return self.d_prime >= self.d_N - 1

    @property
    def correctable(self) -> int:
        """Errors per window corrected up to an admissible decoding error."""
        return self.d_prime // 2


def admissible_capability(wc: WindowCode, L: int, budget: int | None = None) -> AdmissibleCapability:
    """Largest ``d'`` such that every nonzero codeword of weight ``<= d'`` vanishes on the protected coordinates."""
    protected = wc.protected_indices(L)
    cols = np.array([i - 1 for i in protected], dtype=np.int64)
    worst = wc.length + 1
    best_d = wc.length + 1
    for msgs, cws in iter_codewords(wc, budget):
        nonzero = np.any(msgs != 0, axis=1)
        w = np.count_nonzero(cws, axis=1)
        if np.any(nonzero):
            best_d = min(best_d, int(w[nonzero].min()))
        hits = np.any(cws[:, cols] != 0, axis=1)
        if np.any(hits):
            worst = min(worst, int(w[hits].min()))
    d_prime = min(worst - 1, wc.length)
    return AdmissibleCapability(max(0, d_prime), protected, best_d)


# ---------------------------------------------------------------------------
# density and the multiple-solution bound


def ball_volume(n: int, t: int, q: int) -> int:
    return sum(math.comb(n, i) * (q - 1) ** i for i in range(t + 1))


@dataclass(frozen=True)
class DensityStats:
    t: int
    E_kt: int
    density: Fraction
    p_outside: Fraction


def density_stats(n: int, k: int, d: int, field: Field | int) -> DensityStats:
    """Packing density of the radius-``t`` balls of an ``[n, k, d]`` code."""
    q = field.p if isinstance(field, Field) else int(field)
    if d < 1 or not 0 <= k <= n:
        raise ValueError(f"need d >= 1 and 0 <= k <= n, got n={n}, k={k}, d={d}")
    t = (d - 1) // 2
    dens = Fraction(ball_volume(n, t, q), q ** (n - k))
    return DensityStats(t, ball_volume(k, t, q), dens, 1 - dens)


def multiplicity_bound(code: ConvCode, N: int, Delta: int, M: int, budget: int | None = None) -> Fraction:
    """Upper bound on the probability of ``M`` decoding solutions differing in ``Delta`` consecutive inputs."""
    if not 1 <= N <= Delta:
        raise ValueError(f"need 1 <= N <= Delta, got N={N}, Delta={Delta}")
    if M < 2:
        raise ValueError(f"need M >= 2, got {M}")
    c1 = build_window_code(code, 1, budget)
    first = density_stats(code.n, code.k, min_distance(c1, budget), code.field)
    bound = first.density ** (M - 1) / first.E_kt
    for i in range(N, Delta + 1):
        ci = build_window_code(code, i, budget)
        bound *= density_stats(ci.length, ci.dimension, min_distance(ci, budget), code.field).p_outside
    return bound
