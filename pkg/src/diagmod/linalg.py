"""Exact matrices and Smith normal form over the localizations Z[S^-1].

Matrices are immutable grids of :class:`fractions.Fraction`.  They carry no
ring; the functions here take the covering localization explicitly.  Linear
algebra over a quotient Z[S^-1]/(n) is never done here directly: callers lift
to Z[S^-1] and append ``n * I`` relations (see :mod:`diagmod.modules`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .rings import Ring, parse_scalar

_ZERO = Fraction(0)
_ONE = Fraction(1)


class Matrix:
    __slots__ = ("rows", "cols", "data", "_hash")

    def __init__(self, rows: int, cols: int, data: Sequence[Sequence] = ()):
        if data:
            grid = tuple(tuple(parse_scalar(x) for x in row) for row in data)
        else:
            grid = tuple(tuple(_ZERO for _ in range(cols)) for _ in range(rows))
        if len(grid) != rows or any(len(r) != cols for r in grid):
            raise ValueError(f"data does not have shape {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        self.data = grid
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, rows)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "Matrix":
        data = [[columns[j][i] for j in range(len(columns))] for i in range(rows)]
        return cls(rows, len(columns), data)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, [[_ONE if i == j else _ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def scalar(cls, n: int, c) -> "Matrix":
        c = parse_scalar(c)
        return cls(n, n, [[c if i == j else _ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, entries: Sequence, rows: int | None = None, cols: int | None = None) -> "Matrix":
        k = len(entries)
        rows = k if rows is None else rows
        cols = k if cols is None else cols
        data = [[_ZERO] * cols for _ in range(rows)]
        for i, e in enumerate(entries):
            data[i][i] = parse_scalar(e)
        return cls(rows, cols, data)

    # -- basic protocol -------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, Matrix) and self.shape == other.shape and self.data == other.data

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.data))
        return self._hash

    def __repr__(self) -> str:
        return f"Matrix({self.rows}, {self.cols}, {self.to_lists()})"

    def to_lists(self) -> list[list[str]]:
        return [[_fmt(x) for x in row] for row in self.data]

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.data for x in row)

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.data)

    def columns(self) -> list[tuple]:
        return [self.column(j) for j in range(self.cols)]

    # -- algebra --------------------------------------------------------
    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        ocols = other.columns()
        data = [[sum((a * b for a, b in zip(row, col) if a and b), _ZERO) for col in ocols]
                for row in self.data]
        return Matrix(self.rows, other.cols, data)

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        return Matrix(self.rows, self.cols,
                      [[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        return Matrix(self.rows, self.cols,
                      [[a - b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)])

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols, [[-a for a in r] for r in self.data])

    def scale(self, c) -> "Matrix":
        c = parse_scalar(c)
        return Matrix(self.rows, self.cols, [[c * a for a in r] for r in self.data])

    def _same_shape(self, other: "Matrix"):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows, [list(c) for c in self.columns()])

    @property
    def T(self) -> "Matrix":
        return self.transpose()

    def map(self, fn) -> "Matrix":
        return Matrix(self.rows, self.cols, [[fn(a) for a in r] for r in self.data])

    def select_columns(self, idx: Iterable[int]) -> "Matrix":
        idx = list(idx)
        return Matrix(self.rows, len(idx), [[r[j] for j in idx] for r in self.data])

    def select_rows(self, idx: Iterable[int]) -> "Matrix":
        idx = list(idx)
        return Matrix(len(idx), self.cols, [self.data[i] for i in idx])

    def block(self, r0: int, r1: int, c0: int, c1: int) -> "Matrix":
        return Matrix(r1 - r0, c1 - c0, [row[c0:c1] for row in self.data[r0:r1]])


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def hstack(blocks: Sequence[Matrix], rows: int | None = None) -> Matrix:
    blocks = list(blocks)
    if rows is None:
        if not blocks:
            raise ValueError("hstack of no blocks needs an explicit row count")
        rows = blocks[0].rows
    cols = sum(b.cols for b in blocks)
    if any(b.rows != rows for b in blocks):
        raise ValueError("hstack row mismatch")
    data = [sum((list(b.data[i]) for b in blocks), []) for i in range(rows)]
    return Matrix(rows, cols, data)


def vstack(blocks: Sequence[Matrix], cols: int | None = None) -> Matrix:
    blocks = list(blocks)
    if cols is None:
        if not blocks:
            raise ValueError("vstack of no blocks needs an explicit column count")
        cols = blocks[0].cols
    if any(b.cols != cols for b in blocks):
        raise ValueError("vstack column mismatch")
    data = [row for b in blocks for row in b.data]
    return Matrix(len(data), cols, data)


def block_diag(blocks: Sequence[Matrix]) -> Matrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    data = [[_ZERO] * cols for _ in range(rows)]
    r = c = 0
    for b in blocks:
        for i in range(b.rows):
            data[r + i][c:c + b.cols] = b.data[i]
        r += b.rows
        c += b.cols
    return Matrix(rows, cols, data)


def block_matrix(grid: Sequence[Sequence[Matrix]], row_sizes: Sequence[int], col_sizes: Sequence[int]) -> Matrix:
    """Assemble a matrix from a grid of blocks; ``None`` blocks are zero."""
    rows = []
    for bi, rs in enumerate(row_sizes):
        pieces = []
        for bj, cs in enumerate(col_sizes):
            b = grid[bi][bj]
            pieces.append(Matrix.zeros(rs, cs) if b is None else b)
        rows.append(hstack(pieces, rows=rs))
    return vstack(rows, cols=sum(col_sizes))


# ----------------------------------------------------------------------
# Smith normal form
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class SmithForm:
    """``U @ A @ V == D`` with ``Uinv``/``Vinv`` the inverses of ``U``/``V``."""

    U: Matrix
    Uinv: Matrix
    D: Matrix
    V: Matrix
    Vinv: Matrix
    invariants: tuple  # S-free nonnegative ints, one per diagonal slot
    rank: int


def _require_domain(ring: Ring):
    if ring.modulus != 0:
        raise ValueError(f"Smith form needs a localization, got {ring}; lift quotient rings first")


def smith_form(ring: Ring, A: Matrix) -> SmithForm:
    _require_domain(ring)
    m, n = A.rows, A.cols
    a = [list(r) for r in A.data]
    U = [[_ONE if i == j else _ZERO for j in range(m)] for i in range(m)]
    Ui = [[_ONE if i == j else _ZERO for j in range(m)] for i in range(m)]
    V = [[_ONE if i == j else _ZERO for j in range(n)] for i in range(n)]
    Vi = [[_ONE if i == j else _ZERO for j in range(n)] for i in range(n)]
    norm = ring.norm

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        U[i], U[k] = U[k], U[i]
        for row in Ui:
            row[i], row[k] = row[k], row[i]

    def swap_cols(j, k):
        for row in a:
            row[j], row[k] = row[k], row[j]
        for row in V:
            row[j], row[k] = row[k], row[j]
        Vi[j], Vi[k] = Vi[k], Vi[j]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        ad, as_ = a[dst], a[src]
        for j in range(n):
            if as_[j]:
                ad[j] -= q * as_[j]
        ud, us = U[dst], U[src]
        for j in range(m):
            if us[j]:
                ud[j] -= q * us[j]
        for row in Ui:  # inverse: col_src += q * col_dst
            if row[dst]:
                row[src] += q * row[dst]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        for row in a:
            if row[src]:
                row[dst] -= q * row[src]
        for row in V:
            if row[src]:
                row[dst] -= q * row[src]
        vs, vd = Vi[src], Vi[dst]  # inverse: row_src += q * row_dst
        for j in range(n):
            if vd[j]:
                vs[j] += q * vd[j]

    def scale_row(i, c):
        a[i] = [c * x for x in a[i]]
        U[i] = [c * x for x in U[i]]
        for row in Ui:
            row[i] = row[i] / c

    invariants = []
    rank = 0
    for k in range(min(m, n)):
        while True:
            best = None
            for i in range(k, m):
                row = a[i]
                for j in range(k, n):
                    x = row[j]
                    if x:
                        nx = norm(x)
                        if best is None or nx < best[0]:
                            best = (nx, i, j)
                            if nx == 1:
                                break
                if best is not None and best[0] == 1:
                    break
            if best is None:
                break
            _, i, j = best
            if i != k:
                swap_rows(i, k)
            if j != k:
                swap_cols(j, k)
            p = a[k][k]
            dirty = False
            for i in range(k + 1, m):
                if a[i][k]:
                    add_row(i, k, ring.quo(a[i][k], p))
                    if a[i][k]:
                        dirty = True
            for j in range(k + 1, n):
                if a[k][j]:
                    add_col(j, k, ring.quo(a[k][j], p))
                    if a[k][j]:
                        dirty = True
            if dirty:
                continue
            bad = next((i for i in range(k + 1, m)
                        if any(a[i][j] and not ring.divides(p, a[i][j]) for j in range(k + 1, n))), None)
            if bad is None:
                break
            add_row(k, bad, Fraction(-1))
        if best is None:
            break
        p = a[k][k]
        u = ring.unit_part(p)
        if u != 1:
            scale_row(k, 1 / u)
        invariants.append(norm(a[k][k]))
        rank += 1
    invariants.extend([0] * (min(m, n) - rank))
    D = Matrix(m, n, a)
    return SmithForm(Matrix(m, m, U), Matrix(m, m, Ui), D, Matrix(n, n, V), Matrix(n, n, Vi),
                     tuple(invariants), rank)


def snf(ring: Ring, A: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(U, D, V)`` with ``U @ A @ V == D`` in Smith normal form."""
    sf = smith_form(ring, A)
    return sf.U, sf.D, sf.V


def invariant_factors(ring: Ring, A: Matrix) -> tuple:
    """Nonzero invariant factors of ``A`` (S-free positive ints, units included)."""
    return tuple(d for d in smith_form(ring, A).invariants if d)


def kernel_basis(ring: Ring, A: Matrix) -> Matrix:
    """Columns form a basis of the solutions of ``A x = 0``."""
    sf = smith_form(ring, A)
    return sf.V.select_columns(range(sf.rank, A.cols))


def image_basis(ring: Ring, A: Matrix) -> Matrix:
    """Columns form a basis of the column span of ``A`` (a free submodule)."""
    sf = smith_form(ring, A)
    cols = []
    for k in range(sf.rank):
        d = sf.D[k, k]
        cols.append([x * d for x in sf.Uinv.column(k)])
    return Matrix.from_columns(cols, A.rows)


def solve(ring: Ring, A: Matrix, B: Matrix, sf: SmithForm | None = None) -> Matrix | None:
    """Some ``X`` over the localization with ``A @ X == B``, or ``None``."""
    if B.rows != A.rows:
        raise ValueError("right-hand side has the wrong number of rows")
    sf = sf or smith_form(ring, A)
    Y = sf.U @ B
    X = [[_ZERO] * B.cols for _ in range(A.cols)]
    for c in range(B.cols):
        for i in range(A.rows):
            y = Y[i, c]
            if i < sf.rank:
                q = y / sf.D[i, i]
                if not ring.contains(q):
                    return None
                X[i][c] = q
            elif y:
                return None
    return sf.V @ Matrix(A.cols, B.cols, X)


def in_span(ring: Ring, A: Matrix, v: Matrix) -> bool:
    if v.is_zero():
        return True
    return solve(ring, A, v) is not None


def determinant_divisors(ring: Ring, A: Matrix) -> tuple:
    """Invariant factors via gcds of k x k minors (brute force, small matrices only)."""
    from itertools import combinations

    ints = _clear_to_integers(ring, A)
    m, n = A.rows, A.cols
    dets = []
    for k in range(1, min(m, n) + 1):
        g = 0
        for rs in combinations(range(m), k):
            for cs in combinations(range(n), k):
                g = math.gcd(g, _int_det([[ints[i][j] for j in cs] for i in rs]))
        g = ring.s_free(g)
        if g == 0:
            break
        dets.append(g)
    out = []
    prev = 1
    for g in dets:
        out.append(g // prev)
        prev = g
    return tuple(out)


def _clear_to_integers(ring: Ring, A: Matrix):
    # Column scaling by S-units leaves invariant factors unchanged.
    rows = [list(r) for r in A.data]
    for j in range(A.cols):
        den = 1
        for i in range(A.rows):
            den = den * rows[i][j].denominator // math.gcd(den, rows[i][j].denominator)
        for i in range(A.rows):
            rows[i][j] = int(rows[i][j] * den)
    return rows


def _int_det(M: list[list[int]]) -> int:
    # Bareiss fraction-free elimination.
    n = len(M)
    if n == 0:
        return 1
    M = [row[:] for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]
