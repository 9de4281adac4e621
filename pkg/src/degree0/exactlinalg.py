"""
Exact linear algebra over Q and multi-quadratic fields.

Determinants use Bareiss fraction-free elimination, integer kernels use
unimodular row reduction with extended gcds, and inertia comes from
congruence diagonalization. Nothing here touches floating point.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from .exactfield import (
    QQ,
    FieldContext,
    FieldElement,
    NotReal,
    as_element,
    context_of,
    element_from_json,
    element_to_json,
    sign,
)

logger = logging.getLogger(__name__)

IntVector = Tuple[int, ...]
RationalMatrix = List[List[Fraction]]


class LinalgError(Exception):
    """Base class for linear algebra errors."""
    pass


class NotSquare(LinalgError, ValueError):
    pass


class NotSymmetric(LinalgError, ValueError):
    pass


class DimensionMismatch(LinalgError, ValueError):
    pass


@dataclass(frozen=True)
class FieldMatrix:
    """Rectangular matrix of FieldElements over one shared context."""
    rows: Tuple[Tuple[FieldElement, ...], ...]
    context: FieldContext = QQ

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Any]], context: Optional[FieldContext] = None) -> "FieldMatrix":
        """Build a matrix, coercing ints/Fractions and promoting to a common context."""
        raw = [list(r) for r in rows]
        if not raw or not raw[0]:
            raise DimensionMismatch("Matrix must have at least one row and one column")
        width = len(raw[0])
        if any(len(r) != width for r in raw):
            raise DimensionMismatch("Matrix rows have different lengths")
        elements = [e for r in raw for e in r if isinstance(e, FieldElement)]
        ctx = context_of(elements)
        if context is not None:
            ctx = context.merge(ctx)
        promoted = tuple(
            tuple(as_element(e, ctx).promote(ctx) for e in r) for r in raw
        )
        return cls(promoted, ctx)

    @classmethod
    def identity(cls, n: int, context: FieldContext = QQ) -> "FieldMatrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], context)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __getitem__(self, index: Tuple[int, int]) -> FieldElement:
        i, j = index
        return self.rows[i][j]

    def transpose(self) -> "FieldMatrix":
        return FieldMatrix(tuple(zip(*self.rows)), self.context)

    def conjugate(self) -> "FieldMatrix":
        return FieldMatrix(tuple(tuple(e.conjugate() for e in r) for r in self.rows), self.context)

    def is_symmetric(self) -> bool:
        return self.is_square and all(
            self.rows[i][j] == self.rows[j][i]
            for i in range(self.nrows) for j in range(i + 1, self.ncols)
        )

    def is_real(self) -> bool:
        return all(e.is_real() for r in self.rows for e in r)

    def leading_minor(self, k: int) -> "FieldMatrix":
        return FieldMatrix(tuple(r[:k] for r in self.rows[:k]), self.context)

    def __add__(self, other: "FieldMatrix") -> "FieldMatrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimensionMismatch("Cannot add matrices of different shapes")
        return FieldMatrix.from_rows(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)]
        )

    def __mul__(self, other):
        if isinstance(other, FieldMatrix):
            return self.matmul(other)
        return FieldMatrix.from_rows([[e * other for e in r] for r in self.rows], self.context)

    __rmul__ = __mul__

    def matmul(self, other: "FieldMatrix") -> "FieldMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"Cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}")
        ctx = self.context.merge(other.context)
        zero = FieldElement.zero(ctx)
        cols = list(zip(*other.rows))
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = zero
                for a, b in zip(r, c):
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return FieldMatrix.from_rows(out, ctx)

    def apply(self, vector: Sequence[Any]) -> Tuple[FieldElement, ...]:
        """Matrix-vector product."""
        if len(vector) != self.ncols:
            raise DimensionMismatch("Vector length does not match column count")
        ctx = self.context
        out = []
        for r in self.rows:
            acc = FieldElement.zero(ctx)
            for a, x in zip(r, vector):
                acc = acc + a * x
            out.append(acc)
        return tuple(out)

    def to_json(self) -> List[List[Dict[str, str]]]:
        return [[element_to_json(e) for e in r] for r in self.rows]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[Any]], context: FieldContext) -> "FieldMatrix":
        return cls.from_rows([[element_from_json(e, context) for e in r] for r in data], context)

    def __str__(self) -> str:
        return "[" + "; ".join(", ".join(str(e) for e in r) for r in self.rows) + "]"


MatrixLike = Union[FieldMatrix, Sequence[Sequence[Any]]]


def _as_grid(M: MatrixLike) -> List[List[Any]]:
    if isinstance(M, FieldMatrix):
        return [list(r) for r in M.rows]
    return [list(r) for r in M]


# -- determinants and ranks --------------------------------------------------

def bareiss_det(grid: Sequence[Sequence[Any]]) -> Any:
    """
    Fraction-free determinant of a square grid of exact scalars.

    Works for Fractions, ints and FieldElements alike; every division by the
    previous pivot is exact.
    """
    M = [[e if isinstance(e, FieldElement) else Fraction(e) for e in r] for r in grid]
    n = len(M)
    if any(len(r) != n for r in M):
        raise NotSquare(f"Matrix is {n}x{len(M[0]) if M else 0}, not square")
    if n == 0:
        return 1
    if n == 1:
        return M[0][0]
    sgn = 1
    prev = 1
    for k in range(n - 1):
        if not M[k][k]:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sgn = -sgn
                    break
            else:
                return M[k][k] * 0
        pivot = M[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (pivot * M[i][j] - M[i][k] * M[k][j]) / prev
        prev = pivot
    det = M[n - 1][n - 1]
    return det if sgn > 0 else -det


def det(M: MatrixLike) -> FieldElement:
    """Exact determinant of a square field matrix."""
    if isinstance(M, FieldMatrix):
        if not M.is_square:
            raise NotSquare(f"Matrix is {M.nrows}x{M.ncols}, not square")
        return as_element(bareiss_det(M.rows), M.context)
    return as_element(bareiss_det(_as_grid(M)))


def _rational_grid(M: Sequence[Sequence[Any]]) -> RationalMatrix:
    out = []
    for r in M:
        row = []
        for e in r:
            if isinstance(e, FieldElement):
                q = e.rational_value()
                if q is None:
                    raise ValueError(f"Entry {e} is not rational")
                row.append(q)
            else:
                row.append(Fraction(e))
        out.append(row)
    return out


def rational_rref(M: Sequence[Sequence[Any]]) -> Tuple[RationalMatrix, List[int]]:
    """Reduced row echelon form over Q and the pivot columns."""
    A = _rational_grid(M)
    if not A:
        return A, []
    nrows, ncols = len(A), len(A[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(nrows):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return A, pivots


def rational_rank(M: Sequence[Sequence[Any]]) -> int:
    return len(rational_rref(M)[1])


def rational_kernel(M: Sequence[Sequence[Any]]) -> List[List[Fraction]]:
    """A basis of {v in Q^c : Mv = 0} read off the RREF."""
    A, pivots = rational_rref(M)
    ncols = len(A[0]) if A else 0
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(A, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


# -- integer lattices --------------------------------------------------------

def xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (x, y, g) with x*a + y*b == g == gcd(a, b) up to sign."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    return x, y, g


def _integer_echelon(rows: List[List[int]], width: int) -> Tuple[List[List[int]], List[int]]:
    """
    Unimodular row reduction on the first `width` columns.

    Returns the reduced rows and the pivot column of each leading row; rows
    after the last pivot row are zero on the first `width` columns.
    """
    rows = [list(r) for r in rows]
    pivots: List[int] = []
    p = 0
    for col in range(width):
        nz = next((i for i in range(p, len(rows)) if rows[i][col]), None)
        if nz is None:
            continue
        rows[p], rows[nz] = rows[nz], rows[p]
        for i in range(p + 1, len(rows)):
            b = rows[i][col]
            if not b:
                continue
            a = rows[p][col]
            if b % a == 0:
                q = b // a
                rows[i] = [u - q * v for u, v in zip(rows[i], rows[p])]
                continue
            x, y, g = xgcd(a, b)
            ag, bg = a // g, b // g
            top = [x * u + y * v for u, v in zip(rows[p], rows[i])]
            bottom = [-bg * u + ag * v for u, v in zip(rows[p], rows[i])]
            rows[p], rows[i] = top, bottom
        if rows[p][col] < 0:
            rows[p] = [-u for u in rows[p]]
        pivots.append(col)
        p += 1
        if p == len(rows):
            break
    return rows, pivots


def _hermite_reduce(rows: List[List[int]], pivots: List[int]) -> None:
    # entries above each pivot land in [0, pivot)
    for k, col in enumerate(pivots):
        pivot = rows[k][col]
        for i in range(k):
            q = rows[i][col] // pivot
            if q:
                rows[i] = [u - q * v for u, v in zip(rows[i], rows[k])]


@dataclass(frozen=True)
class IntegerLattice:
    """A sublattice of Z^n held by its row-style Hermite normal form basis."""
    ambient_dim: int
    basis: Tuple[IntVector, ...] = ()

    @classmethod
    def from_vectors(cls, ambient_dim: int, vectors: Iterable[Sequence[int]]) -> "IntegerLattice":
        rows = [[int(x) for x in v] for v in vectors]
        for v in rows:
            if len(v) != ambient_dim:
                raise DimensionMismatch(f"Vector of length {len(v)} in Z^{ambient_dim}")
        rows = [v for v in rows if any(v)]
        if not rows:
            return cls(ambient_dim, ())
        rows, pivots = _integer_echelon(rows, ambient_dim)
        rows = rows[:len(pivots)]
        _hermite_reduce(rows, pivots)
        return cls(ambient_dim, tuple(tuple(v) for v in rows))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def is_trivial(self) -> bool:
        return not self.basis

    def pivots(self) -> List[int]:
        return [next(j for j, x in enumerate(v) if x) for v in self.basis]

    def __contains__(self, vector: Sequence[int]) -> bool:
        if len(vector) != self.ambient_dim:
            raise DimensionMismatch(f"Vector of length {len(vector)} in Z^{self.ambient_dim}")
        vec = [int(x) for x in vector]
        for row, col in zip(self.basis, self.pivots()):
            # everything left of this pivot is already cleared
            if any(vec[:col]):
                return False
            b = vec[col]
            if b % row[col] != 0:
                return False
            q = b // row[col]
            if q:
                vec = [u - q * v for u, v in zip(vec, row)]
        return not any(vec)

    def __iter__(self):
        return iter(self.basis)

    def to_dict(self) -> Dict[str, Any]:
        return {"ambient_dim": self.ambient_dim, "basis": [list(v) for v in self.basis]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "IntegerLattice":
        return cls.from_vectors(int(data["ambient_dim"]), data.get("basis", []))


def _integer_rows(M: Sequence[Sequence[Any]]) -> List[List[int]]:
    out = []
    for row in _rational_grid(M):
        den = 1
        for q in row:
            den = den * q.denominator // gcd(den, q.denominator)
        out.append([int(q * den) for q in row])
    return out


def integer_kernel(M: Sequence[Sequence[Any]], ncols: Optional[int] = None) -> IntegerLattice:
    """
    HNF basis of {v in Z^c : Mv = 0} for a rational r x c matrix.

    The transposed matrix is augmented by the identity and row reduced by
    unimodular operations; rows whose left block vanishes span the kernel.
    """
    A = _integer_rows(M)
    c = len(A[0]) if A else (ncols or 0)
    if ncols is not None and A and ncols != c:
        raise DimensionMismatch(f"Expected {ncols} columns, got {c}")
    r = len(A)
    augmented = [[A[i][j] for i in range(r)] + [int(k == j) for k in range(c)] for j in range(c)]
    reduced, pivots = _integer_echelon(augmented, r)
    kernel = [row[r:] for row in reduced[len(pivots):]]
    lattice = IntegerLattice.from_vectors(c, kernel)
    logger.debug(f"integer kernel of {r}x{c} system has rank {lattice.rank}")
    return lattice


def field_row_to_rational_system(row: Sequence[Any], context: Optional[FieldContext] = None) -> RationalMatrix:
    """
    Split a row of field elements into one rational row per basis element.

    An integer vector v satisfies sum(row[j] * v[j]) == 0 exactly when it lies
    in the integer kernel of the returned matrix.
    """
    elements = [e for e in row if isinstance(e, FieldElement)]
    ctx = context_of(elements)
    if context is not None:
        ctx = context.merge(ctx)
    promoted = [as_element(e, ctx).promote(ctx) for e in row]
    return [[e.coefficient(key) for e in promoted] for key in ctx.basis()]


# -- definiteness and inertia -------------------------------------------------

def is_positive_definite(M: FieldMatrix, require_symmetric: bool = False) -> bool:
    """
    Sylvester's criterion on the quadratic form x^t M x.

    A nonsymmetric real matrix is judged through (M + M^t)/2, which defines the
    same quadratic form, unless require_symmetric is set.
    """
    if not M.is_square:
        raise NotSquare(f"Matrix is {M.nrows}x{M.ncols}, not square")
    if not M.is_real():
        raise NotReal("Positive-definiteness needs a real matrix")
    if not M.is_symmetric():
        if require_symmetric:
            raise NotSymmetric("Matrix is not symmetric")
        M = (M + M.transpose()) * Fraction(1, 2)
    for k in range(1, M.nrows + 1):
        if sign(det(M.leading_minor(k))) <= 0:
            return False
    return True


class Inertia(NamedTuple):
    pos: int
    neg: int
    zero: int


def congruence_diagonalize(M: Sequence[Sequence[Any]]) -> Tuple[RationalMatrix, RationalMatrix]:
    """
    Return (S, D) with S invertible, D diagonal and S^t M S == D.

    Symmetric Gaussian elimination; a zero diagonal is repaired by a swap with
    a nonzero diagonal entry or by adding a column with a nonzero off-diagonal
    entry.
    """
    A = _rational_grid(M)
    n = len(A)
    if any(len(r) != n for r in A):
        raise NotSquare("Matrix is not square")
    if any(A[i][j] != A[j][i] for i in range(n) for j in range(i + 1, n)):
        raise NotSymmetric("Matrix is not symmetric")
    S = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def swap(i: int, j: int) -> None:
        A[i], A[j] = A[j], A[i]
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in S:
            r[i], r[j] = r[j], r[i]

    def add_to(k: int, j: int, f: Fraction) -> None:
        # column k += f * column j, then row k += f * row j
        for r in A:
            r[k] += f * r[j]
        A[k] = [a + f * b for a, b in zip(A[k], A[j])]
        for r in S:
            r[k] += f * r[j]

    for k in range(n):
        if not A[k][k]:
            j = next((j for j in range(k + 1, n) if A[j][j]), None)
            if j is not None:
                swap(k, j)
            else:
                j = next((j for j in range(k + 1, n) if A[k][j]), None)
                if j is None:
                    continue
                add_to(k, j, Fraction(1))
        pivot = A[k][k]
        for i in range(k + 1, n):
            if A[i][k]:
                add_to(i, k, -A[i][k] / pivot)
    D = A
    if any(D[i][j] for i in range(n) for j in range(n) if i != j):
        raise LinalgError("Congruence diagonalization left off-diagonal entries")
    return S, D


def _rational_matmul(A: RationalMatrix, B: RationalMatrix) -> RationalMatrix:
    cols = list(zip(*B))
    return [[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in A]


def signature(M: Sequence[Sequence[Any]]) -> Inertia:
    """Inertia (pos, neg, zero) of a symmetric rational matrix."""
    S, D = congruence_diagonalize(M)
    St = [list(r) for r in zip(*S)]
    if _rational_matmul(_rational_matmul(St, _rational_grid(M)), S) != D:
        raise LinalgError("Congruence transform failed verification")
    diagonal = [D[i][i] for i in range(len(D))]
    return Inertia(
        pos=sum(1 for d in diagonal if d > 0),
        neg=sum(1 for d in diagonal if d < 0),
        zero=sum(1 for d in diagonal if d == 0),
    )
