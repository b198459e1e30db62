"""Exact arithmetic over prime fields GF(p).

Matrices are dense ``int64`` numpy arrays reduced modulo ``p`` and wrapped in
:class:`FMatrix`, which is immutable.  Gaussian elimination always pivots on
the first nonzero entry in column order, so kernel bases and particular
solutions are reproducible.

Polynomials are tuples of coefficients, lowest degree first, with trailing
zeros stripped (the zero polynomial is ``()``).
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError

Poly = tuple[int, ...]


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    i = 3
    while i * i <= p:
        if p % i == 0:
            return False
        i += 2
    return True


@dataclass(frozen=True)
class Field:
    """The prime field GF(p)."""

    p: int

    def __post_init__(self) -> None:
        if not isinstance(self.p, (int, np.integer)) or not is_prime(int(self.p)):
            raise ValueError(f"field modulus must be prime, got {self.p!r}")
        object.__setattr__(self, "p", int(self.p))

    def __repr__(self) -> str:
        return f"GF({self.p})"

    def elements(self) -> range:
        return range(self.p)

    def reduce(self, a: int) -> int:
        return a % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self!r}")
        return pow(a, self.p - 2, self.p)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def vector(self, values: Iterable[int]) -> tuple[int, ...]:
        return tuple(int(v) % self.p for v in values)


def weight(v: Iterable[int]) -> int:
    """Hamming weight: number of nonzero entries."""
    return sum(1 for x in v if x)


def distance(a: Sequence[int], b: Sequence[int]) -> int:
    if len(a) != len(b):
        raise DimensionError(f"vectors of length {len(a)} and {len(b)}")
    return sum(1 for x, y in zip(a, b) if x != y)


class FMatrix:
    """Immutable dense matrix over GF(p)."""

    __slots__ = ("field", "a")

    field: Field
    a: np.ndarray

    def __init__(self, field: Field, data: Sequence[Sequence[int]] | np.ndarray, shape: tuple[int, int] | None = None):
        arr = np.array(data, dtype=np.int64)
        if shape is not None:
            arr = arr.reshape(shape)
        elif arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, 0)
        if arr.ndim != 2:
            raise DimensionError(f"matrix data must be two-dimensional, got shape {arr.shape}")
        arr = arr % field.p
        arr.setflags(write=False)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "a", arr)

    def __setattr__(self, name, value):
        raise AttributeError("FMatrix is immutable")

    def __reduce__(self):
        return (FMatrix, (self.field, self.a.tolist(), self.shape))

    # construction helpers

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> FMatrix:
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, field: Field, n: int) -> FMatrix:
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def column(cls, field: Field, v: Sequence[int]) -> FMatrix:
        return cls(field, np.array(v, dtype=np.int64).reshape(len(v), 1))

    # shape and access

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape  # type: ignore[return-value]

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    def __getitem__(self, idx):
        return int(self.a[idx]) if np.ndim(self.a[idx]) == 0 else self.a[idx]

    def tolist(self) -> list[list[int]]:
        return self.a.tolist()

    def column_vectors(self) -> list[tuple[int, ...]]:
        return [tuple(int(x) for x in self.a[:, j]) for j in range(self.cols)]

    @property
    def T(self) -> FMatrix:
        return FMatrix(self.field, self.a.T)

    # arithmetic

    def _check_field(self, other: FMatrix) -> None:
        if other.field != self.field:
            raise ValueError(f"field mismatch: {self.field!r} vs {other.field!r}")

    def __add__(self, other: FMatrix) -> FMatrix:
        self._check_field(other)
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return FMatrix(self.field, self.a + other.a)

    def __sub__(self, other: FMatrix) -> FMatrix:
        self._check_field(other)
        if self.shape != other.shape:
            raise DimensionError(f"cannot subtract {self.shape} and {other.shape}")
        return FMatrix(self.field, self.a - other.a)

    def __neg__(self) -> FMatrix:
        return FMatrix(self.field, -self.a)

    def scale(self, c: int) -> FMatrix:
        return FMatrix(self.field, self.a * (c % self.field.p))

    def __matmul__(self, other: FMatrix) -> FMatrix:
        self._check_field(other)
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        # entries < p, so each product < p^2; reduce per term block to stay in int64
        return FMatrix(self.field, _matmul_mod(self.a, other.a, self.field.p))

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        """Matrix-vector product, returned as a tuple."""
        if len(v) != self.cols:
            raise DimensionError(f"cannot apply {self.shape} matrix to vector of length {len(v)}")
        if self.rows == 0:
            return ()
        if self.cols == 0:
            return (0,) * self.rows
        out = _matmul_mod(self.a, np.asarray(v, dtype=np.int64).reshape(-1, 1), self.field.p)
        return tuple(int(x) for x in out[:, 0])

    def power(self, e: int) -> FMatrix:
        if self.rows != self.cols:
            raise DimensionError(f"matrix power needs a square matrix, got {self.shape}")
        result = FMatrix.identity(self.field, self.rows)
        base = self
        while e > 0:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FMatrix):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and bool(np.array_equal(self.a, other.a))

    def __hash__(self) -> int:
        return hash((self.field, self.shape, self.a.tobytes()))

    def __repr__(self) -> str:
        return f"FMatrix({self.field!r}, {self.tolist()})"


def _matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    inner = a.shape[1]
    if inner == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    # chunk the inner dimension so partial sums never overflow int64
    step = max(1, (2**62) // max(1, (p - 1) ** 2))
    if inner <= step:
        return (a @ b) % p
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for s in range(0, inner, step):
        out = (out + a[:, s : s + step] @ b[s : s + step, :]) % p
    return out


def hstack(blocks: Sequence[FMatrix]) -> FMatrix:
    field = blocks[0].field
    return FMatrix(field, np.hstack([b.a for b in blocks]))


def vstack(blocks: Sequence[FMatrix]) -> FMatrix:
    field = blocks[0].field
    return FMatrix(field, np.vstack([b.a for b in blocks]))


def block_matrix(field: Field, blocks: Sequence[Sequence[FMatrix]]) -> FMatrix:
    rows = [np.hstack([b.a for b in row]) for row in blocks]
    return FMatrix(field, np.vstack(rows))


# ---------------------------------------------------------------------------
# Gaussian elimination


def rref(m: FMatrix) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns.

    Pivot choice is deterministic: columns are scanned left to right and the
    first row (at or below the current one) with a nonzero entry is used.
    """
    p = m.field.p
    r = m.a.copy()
    rows, cols = r.shape
    pivots: list[int] = []
    row = 0
    for col in range(cols):
        if row >= rows:
            break
        nz = np.nonzero(r[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            r[[row, piv]] = r[[piv, row]]
        r[row] = (r[row] * pow(int(r[row, col]), p - 2, p)) % p
        for other in range(rows):
            if other != row and r[other, col]:
                r[other] = (r[other] - r[other, col] * r[row]) % p
        pivots.append(col)
        row += 1
    return r, pivots


def mat_rank(m: FMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(rref(m)[1])


def kernel_basis(m: FMatrix) -> FMatrix:
    """Columns form a basis of the right kernel ``{x : m x = 0}``."""
    cols = m.cols
    if m.rows == 0:
        return FMatrix.identity(m.field, cols)
    r, pivots = rref(m)
    p = m.field.p
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for j, f in enumerate(free):
        basis[f, j] = 1
        for i, pc in enumerate(pivots):
            basis[pc, j] = (-r[i, f]) % p
    return FMatrix(m.field, basis, shape=(cols, len(free)))


def solve_affine(m: FMatrix, b: Sequence[int]) -> tuple[tuple[int, ...], FMatrix] | None:
    """Solve ``m x = b``.

    Returns ``(x, K)`` where ``x`` is one solution and the columns of ``K``
    span the kernel of ``m``, or ``None`` when the system is inconsistent.
    """
    if len(b) != m.rows:
        raise DimensionError(f"right-hand side has length {len(b)}, matrix has {m.rows} rows")
    p = m.field.p
    kernel = kernel_basis(m)
    if m.rows == 0:
        return (0,) * m.cols, kernel
    aug = FMatrix(m.field, np.hstack([m.a, np.asarray(b, dtype=np.int64).reshape(-1, 1) % p]))
    r, pivots = rref(aug)
    if pivots and pivots[-1] == m.cols:
        return None
    x = [0] * m.cols
    for i, pc in enumerate(pivots):
        x[pc] = int(r[i, m.cols])
    return tuple(x), kernel


# ---------------------------------------------------------------------------
# polynomials


def poly_trim(c: Iterable[int], p: int) -> Poly:
    out = [int(x) % p for x in c]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def poly_degree(f: Poly) -> int:
    """Degree of ``f``; the zero polynomial has degree -1."""
    return len(f) - 1


def poly_add(f: Poly, g: Poly, p: int) -> Poly:
    n = max(len(f), len(g))
    return poly_trim(((f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)), p)


def poly_neg(f: Poly, p: int) -> Poly:
    return poly_trim((-x for x in f), p)


def poly_sub(f: Poly, g: Poly, p: int) -> Poly:
    return poly_add(f, poly_neg(g, p), p)


def poly_mul(f: Poly, g: Poly, p: int) -> Poly:
    if not f or not g:
        return ()
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return poly_trim(out, p)


class FPolyMatrix:
    """Immutable matrix of polynomials over GF(p)."""

    __slots__ = ("field", "entries", "rows", "cols")

    def __init__(self, field: Field, entries: Sequence[Sequence[Sequence[int]]]):
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        if any(len(r) != cols for r in entries):
            raise DimensionError("ragged polynomial matrix")
        ent = tuple(tuple(poly_trim(e, field.p) for e in row) for row in entries)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "entries", ent)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)

    def __setattr__(self, name, value):
        raise AttributeError("FPolyMatrix is immutable")

    def __reduce__(self):
        return (FPolyMatrix, (self.field, self.entries))

    @classmethod
    def from_constant(cls, m: FMatrix) -> FPolyMatrix:
        if m.rows == 0:
            return _empty(m.field, m.cols)
        return cls(m.field, [[(int(x),) for x in row] for row in m.a])

    @classmethod
    def identity(cls, field: Field, n: int) -> FPolyMatrix:
        return cls(field, [[(1,) if i == j else () for j in range(n)] for i in range(n)])

    @classmethod
    def shift_pencil(cls, a: FMatrix) -> FPolyMatrix:
        """The pencil ``zI - A``."""
        p = a.field.p
        n = a.rows
        return cls(a.field, [[(-int(a.a[i, j]) % p, 1 if i == j else 0) for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, idx: tuple[int, int]) -> Poly:
        i, j = idx
        return self.entries[i][j]

    def select_rows(self, idx: Sequence[int]) -> FPolyMatrix:
        return FPolyMatrix(self.field, [self.entries[i] for i in idx]) if idx else _empty(self.field, self.cols)

    def __add__(self, other: FPolyMatrix) -> FPolyMatrix:
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        p = self.field.p
        return FPolyMatrix(self.field, [[poly_add(a, b, p) for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)]) if self.rows else self

    def __sub__(self, other: FPolyMatrix) -> FPolyMatrix:
        return self + other.negate()

    def negate(self) -> FPolyMatrix:
        p = self.field.p
        return FPolyMatrix(self.field, [[poly_neg(a, p) for a in row] for row in self.entries]) if self.rows else self

    def scale(self, f: Poly) -> FPolyMatrix:
        p = self.field.p
        return FPolyMatrix(self.field, [[poly_mul(f, a, p) for a in row] for row in self.entries]) if self.rows else self

    def __matmul__(self, other: FPolyMatrix) -> FPolyMatrix:
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        p = self.field.p
        if self.rows == 0:
            return _empty(self.field, other.cols)
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc: Poly = ()
                for t in range(self.cols):
                    acc = poly_add(acc, poly_mul(self.entries[i][t], other.entries[t][j], p), p)
                row.append(acc)
            out.append(row)
        return FPolyMatrix(self.field, out)

    def det(self) -> Poly:
        if self.rows != self.cols:
            raise DimensionError(f"determinant needs a square matrix, got {self.shape}")
        return _det(self.field.p, self.entries, tuple(range(self.rows)), tuple(range(self.cols)))

    def adjugate(self) -> FPolyMatrix:
        if self.rows != self.cols:
            raise DimensionError(f"adjugate needs a square matrix, got {self.shape}")
        n = self.rows
        p = self.field.p
        if n == 0:
            return self
        if n == 1:
            return FPolyMatrix.identity(self.field, 1)
        adj = [[() for _ in range(n)] for _ in range(n)]
        full = tuple(range(n))
        for i in range(n):
            for j in range(n):
                minor = _det(p, self.entries, tuple(r for r in full if r != j), tuple(c for c in full if c != i))
                adj[i][j] = minor if (i + j) % 2 == 0 else poly_neg(minor, p)
        return FPolyMatrix(self.field, adj)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FPolyMatrix):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.field, self.shape, self.entries))

    def __repr__(self) -> str:
        return f"FPolyMatrix({self.field!r}, {[list(r) for r in self.entries]})"


def _empty(field: Field, cols: int) -> FPolyMatrix:
    m = FPolyMatrix.__new__(FPolyMatrix)
    object.__setattr__(m, "field", field)
    object.__setattr__(m, "entries", ())
    object.__setattr__(m, "rows", 0)
    object.__setattr__(m, "cols", cols)
    return m


def _det(p: int, entries, rows: tuple[int, ...], cols: tuple[int, ...]) -> Poly:
    # Laplace expansion along the first row, memoised over (rows, cols) minors.
    @lru_cache(maxsize=None)
    def minor(rs: tuple[int, ...], cs: tuple[int, ...]) -> Poly:
        if not rs:
            return (1,)
        r0 = rs[0]
        acc: Poly = ()
        for idx, c in enumerate(cs):
            e = entries[r0][c]
            if not e:
                continue
            sub = minor(rs[1:], cs[:idx] + cs[idx + 1 :])
            term = poly_mul(e, sub, p)
            acc = poly_add(acc, term if idx % 2 == 0 else poly_neg(term, p), p)
        return acc

    return minor(rows, cols)


def poly_mat_mul(a: FPolyMatrix, b: FPolyMatrix) -> FPolyMatrix:
    return a @ b


def poly_mat_det(a: FPolyMatrix) -> Poly:
    return a.det()
