"""Convolutional codes as linear systems over GF(p).

A code is given by a minimal realization ``(A, B, C, D)``::

    x[t+1] = A x[t] + B u[t]
    y[t]   = C x[t] + D u[t]

and its codeword symbols are ``c[t] = (y[t], u[t])``.  A finite symbol
sequence is a codeword iff it is produced from ``x[0] = 0`` and the state
after its last symbol is zero again.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from operator import mul

import numpy as np

from .budget import check_budget
from .errors import DimensionError, NotControllable, NotObservable
from .gf import Field, FMatrix, FPolyMatrix, block_matrix, hstack, kernel_basis, mat_rank, solve_affine, vstack, weight

Vector = tuple[int, ...]


@dataclass(frozen=True)
class SymbolSeq:
    """A finite sequence of codeword symbols ``c[t] = (y[t], u[t])``."""

    y: tuple[Vector, ...]
    u: tuple[Vector, ...]
    field: Field

    def __post_init__(self) -> None:
        if len(self.y) != len(self.u):
            raise DimensionError(f"y has {len(self.y)} symbols but u has {len(self.u)}")
        p = self.field.p
        object.__setattr__(self, "y", tuple(tuple(int(v) % p for v in row) for row in self.y))
        object.__setattr__(self, "u", tuple(tuple(int(v) % p for v in row) for row in self.u))
        for name, rows in (("y", self.y), ("u", self.u)):
            if rows and len({len(r) for r in rows}) != 1:
                raise DimensionError(f"ragged {name} vectors")

    @classmethod
    def from_symbols(cls, field: Field, symbols: Sequence[Sequence[int]], n_minus_k: int) -> SymbolSeq:
        """Build from full symbols ``(y..., u...)`` of length ``n``."""
        return cls(tuple(tuple(s[:n_minus_k]) for s in symbols), tuple(tuple(s[n_minus_k:]) for s in symbols), field)

    @classmethod
    def zeros(cls, field: Field, length: int, n: int, k: int) -> SymbolSeq:
        return cls(((0,) * (n - k),) * length, ((0,) * k,) * length, field)

    def __len__(self) -> int:
        return len(self.y)

    @property
    def T(self) -> int:
        """Index of the last symbol."""
        return len(self.y) - 1

    def symbol(self, t: int) -> Vector:
        return self.y[t] + self.u[t]

    def symbols(self) -> list[Vector]:
        return [self.y[t] + self.u[t] for t in range(len(self))]

    def flat(self) -> Vector:
        return tuple(v for t in range(len(self)) for v in self.y[t] + self.u[t])

    def weight(self) -> int:
        return weight(self.flat())

    def padded(self, length: int, n_minus_k: int | None = None, k: int | None = None) -> SymbolSeq:
        """Zero-pad (never truncate) to ``length`` symbols."""
        if length <= len(self):
            return self
        if n_minus_k is None or k is None:
            if not self.y:
                raise DimensionError("cannot infer symbol widths of an empty sequence")
            n_minus_k, k = len(self.y[0]), len(self.u[0])
        extra = length - len(self)
        return SymbolSeq(self.y + ((0,) * n_minus_k,) * extra, self.u + ((0,) * k,) * extra, self.field)

    def __add__(self, other: SymbolSeq) -> SymbolSeq:
        if len(self) != len(other):
            raise DimensionError(f"sequences of length {len(self)} and {len(other)}")
        p = self.field.p
        return SymbolSeq(
            tuple(tuple((a + b) % p for a, b in zip(r, s)) for r, s in zip(self.y, other.y)),
            tuple(tuple((a + b) % p for a, b in zip(r, s)) for r, s in zip(self.u, other.u)),
            self.field,
        )

    def __sub__(self, other: SymbolSeq) -> SymbolSeq:
        p = self.field.p
        neg = SymbolSeq(
            tuple(tuple(-a % p for a in r) for r in other.y), tuple(tuple(-a % p for a in r) for r in other.u), self.field
        )
        return self + neg


@dataclass(frozen=True, eq=False)
class ConvCode:
    """A convolutional code given by a minimal realization over GF(p)."""

    A: FMatrix
    B: FMatrix
    C: FMatrix
    D: FMatrix
    field: Field
    label: str = ""
    _zero_return_cache: dict = dc_field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        for name in "ABCD":
            if getattr(self, name).field != self.field:
                raise ValueError(f"matrix {name} is over {getattr(self, name).field!r}, expected {self.field!r}")
        delta = self.A.rows
        if self.A.cols != delta:
            raise DimensionError(f"A must be square, got {self.A.shape}")
        k = self.B.cols if delta else self.D.cols
        if self.B.shape != (delta, k):
            raise DimensionError(f"B has shape {self.B.shape}, expected ({delta}, {k})")
        r = self.D.rows
        if self.D.shape != (r, k):
            raise DimensionError(f"D has shape {self.D.shape}, expected ({r}, {k})")
        if self.C.shape != (r, delta):
            raise DimensionError(f"C has shape {self.C.shape}, expected ({r}, {delta})")
        if k < 1 or r < 1:
            raise DimensionError(f"need n > k >= 1, got n={r + k}, k={k}")
        if delta:
            ctrb = mat_rank(controllability_matrix(self.A, self.B))
            if ctrb != delta:
                raise NotControllable(ctrb, delta)
            obsv = mat_rank(observability_matrix(self.A, self.C))
            if obsv != delta:
                raise NotObservable(obsv, delta)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConvCode):
            return NotImplemented
        return (self.A, self.B, self.C, self.D) == (other.A, other.B, other.C, other.D)

    def __hash__(self) -> int:
        return hash((self.A, self.B, self.C, self.D))

    def __reduce__(self):
        return (ConvCode, (self.A, self.B, self.C, self.D, self.field, self.label))

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def delta(self) -> int:
        return self.A.rows

    @property
    def k(self) -> int:
        return self.D.cols

    @property
    def n(self) -> int:
        return self.D.rows + self.D.cols

    @cached_property
    def kappa(self) -> tuple[int, ...]:
        return controllability_indices(self)

    @property
    def kappa_min(self) -> int:
        return min(self.kappa)

    @property
    def kappa_max(self) -> int:
        return max(self.kappa)

    def markov(self, m: int) -> FMatrix:
        """Impulse response block: ``D`` for m = 0, ``C A^(m-1) B`` otherwise."""
        if m == 0:
            return self.D
        if self.delta == 0:
            return FMatrix.zeros(self.field, self.n - self.k, self.k)
        return self.C @ self.A.power(m - 1) @ self.B

    @cached_property
    def _joint_rows(self) -> tuple[Vector, ...]:
        # rows of [[A, B], [C, D]] acting on the concatenation (x, u)
        joint = np.vstack([np.hstack([self.A.a, self.B.a]), np.hstack([self.C.a, self.D.a])])
        return tuple(tuple(int(v) for v in row) for row in joint)

    def step(self, x: Vector, u: Vector) -> tuple[Vector, Vector]:
        """One step of the recursion: returns ``(y, next_state)``."""
        p = self.field.p
        xu = tuple(x) + tuple(u)
        out = [sum(map(mul, row, xu)) % p for row in self._joint_rows]
        d = self.A.rows
        return tuple(out[d:]), tuple(out[:d])

    def zero_state(self) -> Vector:
        return (0,) * self.delta


def new_conv_code(A, B, C, D, field: Field | int, label: str = "") -> ConvCode:
    """Validate a realization and build a :class:`ConvCode`.

    Matrices may be :class:`FMatrix` or nested integer lists.  For ``delta = 0``
    pass empty lists for ``A``, ``B`` and ``C``; their shapes are inferred from
    ``D``.
    """
    if isinstance(field, int):
        field = Field(field)

    def as_mat(m, empty_shape):
        if isinstance(m, FMatrix):
            return m
        arr = np.array(m, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(empty_shape)
        return FMatrix(field, arr)

    Dm = as_mat(D, (0, 0))
    r, k = Dm.shape
    Am = as_mat(A, (0, 0))
    delta = Am.rows
    Bm = as_mat(B, (delta, k))
    Cm = as_mat(C, (r, delta))
    return ConvCode(Am, Bm, Cm, Dm, field, label)


def controllability_matrix(A: FMatrix, B: FMatrix, steps: int | None = None) -> FMatrix:
    """``[B, AB, ..., A^(steps-1) B]`` (``steps`` defaults to the state dimension)."""
    steps = A.rows if steps is None else steps
    blocks = [B]
    for _ in range(1, steps):
        blocks.append(A @ blocks[-1])
    return hstack(blocks)


def observability_matrix(A: FMatrix, C: FMatrix, steps: int | None = None) -> FMatrix:
    steps = A.rows if steps is None else steps
    blocks = [C]
    for _ in range(1, steps):
        blocks.append(blocks[-1] @ A)
    return vstack(blocks)


def controllability_indices(code: ConvCode) -> tuple[int, ...]:
    """Controllability indices, sorted in decreasing order.

    Columns of ``[B, AB, A^2 B, ...]`` are scanned in order and kept when
    independent of the ones already kept; the index of input ``i`` is the
    number of kept columns of the form ``A^j b_i``.
    """
    k, delta = code.k, code.delta
    counts = [0] * k
    if delta == 0:
        return tuple(counts)
    field = code.field
    kept = np.zeros((delta, 0), dtype=np.int64)
    block = code.B
    for _ in range(delta):
        for i in range(k):
            cand = np.hstack([kept, block.a[:, i : i + 1]])
            if mat_rank(FMatrix(field, cand)) > kept.shape[1]:
                kept = cand
                counts[i] += 1
        if kept.shape[1] == delta:
            break
        block = code.A @ block
    return tuple(sorted(counts, reverse=True))


def encode(code: ConvCode, u: Sequence[Sequence[int]], x0: Sequence[int] | None = None) -> tuple[SymbolSeq, Vector]:
    """Run the state recursion; returns the symbol sequence and the final state."""
    p = code.p
    x = tuple(x0) if x0 is not None else code.zero_state()
    if len(x) != code.delta:
        raise DimensionError(f"initial state has length {len(x)}, expected {code.delta}")
    ys = []
    us = []
    for ut in u:
        if len(ut) != code.k:
            raise DimensionError(f"input of length {len(ut)}, expected {code.k}")
        ut = tuple(int(v) % p for v in ut)
        y, x = code.step(x, ut)
        ys.append(y)
        us.append(ut)
    return SymbolSeq(tuple(ys), tuple(us), code.field), x


def _steering_matrix(code: ConvCode, tau: int) -> FMatrix:
    # [A^(tau-1) B, ..., A B, B] acting on the stacked inputs (u_0, ..., u_(tau-1))
    blocks = [code.B]
    for _ in range(1, tau):
        blocks.append(code.A @ blocks[-1])
    return hstack(blocks[::-1])


def zero_return_extension(code: ConvCode, x: Sequence[int], budget: int | None = None) -> tuple[Vector, ...]:
    """Shortest input sequence steering ``x`` to the zero state.

    Among the shortest sequences the one of least total Hamming weight is
    returned, ties broken by the lexicographically smallest stacked vector.
    """
    x = tuple(int(v) % code.p for v in x)
    if len(x) != code.delta:
        raise DimensionError(f"state has length {len(x)}, expected {code.delta}")
    cached = code._zero_return_cache.get(x)
    if cached is not None:
        return cached
    result = _zero_return(code, x, budget)
    code._zero_return_cache[x] = result
    return result


def _zero_return(code: ConvCode, x: Vector, budget: int | None) -> tuple[Vector, ...]:
    if not any(x):
        return ()
    p, k = code.p, code.k
    for tau in range(1, code.kappa_max + 1):
        target = (code.A.power(tau)).apply(x)
        sol = solve_affine(_steering_matrix(code, tau), tuple(-v % p for v in target))
        if sol is None:
            continue
        x0, kern = sol
        dim = kern.cols
        check_budget("zero-return solution set", p**dim, budget)
        base = np.array(x0, dtype=np.int64)
        best = None
        best_key = None
        for coeffs in itertools.product(range(p), repeat=dim):
            v = (base + kern.a @ np.array(coeffs, dtype=np.int64)) % p if dim else base
            cand = tuple(int(c) for c in v)
            key = (weight(cand), cand)
            if best_key is None or key < best_key:
                best, best_key = cand, key
        assert best is not None
        return tuple(best[i * k : (i + 1) * k] for i in range(tau))
    raise AssertionError("controllable system failed to reach zero within kappa_max steps")


def final_state(code: ConvCode, u: Sequence[Sequence[int]], x0: Sequence[int] | None = None) -> Vector:
    x = tuple(x0) if x0 is not None else code.zero_state()
    for ut in u:
        _, x = code.step(x, tuple(ut))
    return x


def is_codeword(code: ConvCode, c: SymbolSeq) -> bool:
    """Operational membership: re-encode the inputs from zero and compare."""
    if c.field != code.field:
        return False
    if len(c) and (len(c.y[0]) != code.n - code.k or len(c.u[0]) != code.k):
        return False
    seq, x = encode(code, c.u)
    return seq.y == c.y and not any(x)


def kernel_matrix(code: ConvCode, gamma: int) -> FMatrix:
    """Kernel representation of degree-``gamma`` codewords.

    Acts on the stacked vector ``(y_0, ..., y_gamma, u_0, ..., u_gamma)``.  The
    first block row is the zero-return condition ``sum A^(gamma-i) B u_i = 0``;
    the remaining rows are ``-y + T u = 0`` with ``T`` block lower triangular
    holding ``D`` on the diagonal and ``C A^(i-j-1) B`` below it.
    """
    field = code.field
    r, k, delta = code.n - code.k, code.k, code.delta
    steps = gamma + 1
    top_right = _steering_matrix(code, steps) if delta else FMatrix.zeros(field, 0, steps * k)
    top = hstack([FMatrix.zeros(field, delta, steps * r), top_right])
    markov = [code.markov(m) for m in range(steps)]
    zero = FMatrix.zeros(field, r, k)
    toeplitz = block_matrix(field, [[markov[i - j] if j <= i else zero for j in range(steps)] for i in range(steps)])
    bottom = hstack([-FMatrix.identity(field, steps * r), toeplitz])
    return vstack([top, bottom])


def is_codeword_kernel(code: ConvCode, c: SymbolSeq) -> bool:
    """Membership via the kernel representation (independent of :func:`encode`)."""
    if len(c) == 0:
        return True
    H = kernel_matrix(code, len(c) - 1)
    stacked = tuple(v for row in c.y for v in row) + tuple(v for row in c.u for v in row)
    return not any(H.apply(stacked))


def zero_return_space(code: ConvCode, gamma: int) -> FMatrix:
    """Basis (columns) of input sequences ``u_0..u_gamma`` that return to the zero state."""
    if code.delta == 0:
        return FMatrix.identity(code.field, (gamma + 1) * code.k)
    return kernel_basis(_steering_matrix(code, gamma + 1))


# ---------------------------------------------------------------------------
# polynomial generators


@dataclass(frozen=True)
class PolyGenerator:
    """A polynomial generator ``G(z)`` with the row order that splits it as ``(P; Q)``.

    ``row_permutation[i]`` is the row of ``G`` that becomes row ``i`` of the
    permuted matrix; its first ``n - k`` rows form ``P`` and the last ``k``
    rows form ``Q``.
    """

    G: FPolyMatrix
    row_permutation: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        n = self.G.rows
        perm = tuple(range(n)) if self.row_permutation is None else tuple(self.row_permutation)
        if sorted(perm) != list(range(n)):
            raise ValueError(f"row_permutation {perm} is not a permutation of 0..{n - 1}")
        object.__setattr__(self, "row_permutation", perm)
        if n <= self.G.cols:
            raise DimensionError(f"G must have more rows than columns, got {self.G.shape}")
        if not self.Q.det():
            raise ValueError("Q(z) is singular; G(z) must have full column rank with Q(z) invertible")

    @classmethod
    def from_parts(cls, P: FPolyMatrix, Q: FPolyMatrix) -> PolyGenerator:
        if P.cols != Q.cols:
            raise DimensionError(f"P has {P.cols} columns, Q has {Q.cols}")
        return cls(FPolyMatrix(P.field, list(P.entries) + list(Q.entries)))

    @property
    def n(self) -> int:
        return self.G.rows

    @property
    def k(self) -> int:
        return self.G.cols

    @property
    def P(self) -> FPolyMatrix:
        return self.G.select_rows(self.row_permutation[: self.n - self.k])

    @property
    def Q(self) -> FPolyMatrix:
        return self.G.select_rows(self.row_permutation[self.n - self.k :])

    @property
    def delta(self) -> int:
        return len(self.Q.det()) - 1


def verify_realization(code: ConvCode, gen: PolyGenerator) -> bool:
    """Check ``C (zI - A)^-1 B + D = P(z) Q(z)^-1`` as a polynomial identity.

    Cleared of denominators this is
    ``det(zI - A) P(z) = (C adj(zI - A) B + det(zI - A) D) Q(z)``.
    """
    if gen.G.field != code.field:
        raise ValueError(f"generator over {gen.G.field!r}, code over {code.field!r}")
    if gen.n != code.n or gen.k != code.k:
        raise DimensionError(f"generator is {gen.n}x{gen.k}, code has n={code.n}, k={code.k}")
    pencil = FPolyMatrix.shift_pencil(code.A)
    char = pencil.det()
    if code.delta:
        num = FPolyMatrix.from_constant(code.C) @ pencil.adjugate() @ FPolyMatrix.from_constant(code.B)
        num = num + FPolyMatrix.from_constant(code.D).scale(char)
    else:
        num = FPolyMatrix.from_constant(code.D)
    return gen.P.scale(char) == num @ gen.Q


def generator_codeword(gen: PolyGenerator, v: Sequence[Sequence[int]]) -> tuple[list[Vector], list[Vector]]:
    """The codeword ``G(z) v(z)`` as time-ordered ``(y, u)`` symbol lists.

    ``v`` lists the coefficient vectors ``v_0, v_1, ...`` (each of length k).
    Here ``z`` is the forward shift of the state recursion, so the
    highest-degree coefficient is the symbol at time 0; the returned lists
    are the coefficients of ``P(z) v(z)`` and ``Q(z) v(z)`` in that order.
    """
    field = gen.G.field
    k = gen.k
    vz = FPolyMatrix(field, [[tuple(v[d][i] for d in range(len(v)))] for i in range(k)])
    py = gen.P @ vz
    qu = gen.Q @ vz
    length = max([len(e[0]) for e in py.entries + qu.entries] + [0])

    def coeffs(m: FPolyMatrix) -> list[Vector]:
        return [tuple(m.entries[i][0][d] if d < len(m.entries[i][0]) else 0 for i in range(m.rows)) for d in range(length)]

    return coeffs(py)[::-1], coeffs(qu)[::-1]
