"""Dense exact matrices over a field.

Public indexing is 1-based (``m.entry(i, j)``, ``elementary(n, i, j)``) so
formulas with E_{i,j} and J_m can be transcribed as written.  Storage is a
numpy array of field codes (or Fractions over QQ).
"""

from __future__ import annotations

from typing import Any, Iterable, Sequence

import numpy as np

from .errors import DimensionError, FieldMismatchError, FormatError, SingularMatrixError


class Mat:
    """Immutable dense matrix."""

    __slots__ = ("field", "a", "_key")

    def __init__(self, field: Any, a: Any):
        a = np.array(a, dtype=field.dtype)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise DimensionError(f"need a nonempty 2-d array, got shape {a.shape}")
        a.setflags(write=False)
        self.field = field
        self.a = a
        self._key = None

    @classmethod
    def from_rows(cls, field: Any, rows: Iterable[Iterable[Any]]) -> Mat:
        rows = [[field(x) for x in row] for row in rows]
        if len({len(r) for r in rows}) != 1:
            raise DimensionError("ragged rows")
        out = field.zeros((len(rows), len(rows[0])))
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                out[i, j] = x
        return cls(field, out)

    @classmethod
    def zeros(cls, field: Any, rows: int, cols: int | None = None) -> Mat:
        return cls(field, field.zeros((rows, rows if cols is None else cols)))

    @classmethod
    def identity(cls, field: Any, n: int) -> Mat:
        return cls(field, field.eye(n))

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    def entry(self, i: int, j: int) -> Any:
        """Entry at 1-based position (i, j)."""
        if not (1 <= i <= self.rows and 1 <= j <= self.cols):
            raise IndexError(f"({i}, {j}) outside a {self.rows}x{self.cols} matrix")
        return self.a[i - 1, j - 1]

    def row(self, i: int) -> tuple:
        return tuple(self.a[i - 1])

    def tolist(self) -> list[list[Any]]:
        return [[x if self.field.dtype is object else int(x) for x in r] for r in self.a]

    def _check(self, other: Mat) -> None:
        if not isinstance(other, Mat):
            raise TypeError(f"expected Mat, got {type(other).__name__}")
        if other.field != self.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")

    def __matmul__(self, other: Mat) -> Mat:
        self._check(other)
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        return Mat(self.field, self.field.matmul(self.a, other.a))

    def __add__(self, other: Mat) -> Mat:
        self._check(other)
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return Mat(self.field, self.field.vadd(self.a, other.a))

    def __sub__(self, other: Mat) -> Mat:
        self._check(other)
        if self.shape != other.shape:
            raise DimensionError(f"cannot subtract {other.shape} from {self.shape}")
        return Mat(self.field, self.field.vsub(self.a, other.a))

    def __neg__(self) -> Mat:
        return Mat(self.field, self.field.vneg(self.a))

    def scale(self, c: Any) -> Mat:
        return Mat(self.field, self.field.vmul(self.a, self.field(c)))

    @property
    def T(self) -> Mat:
        return Mat(self.field, self.a.T)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return not np.any(self.a != 0)

    def is_identity(self) -> bool:
        return self.is_square() and bool(np.array_equal(self.a, self.field.eye(self.rows)))

    def _echelon(self) -> tuple[list[list[Any]], list[list[Any]], Any]:
        """Gauss-Jordan on [self | I]; returns (reduced, inverse part, det)."""
        f = self.field
        n = self.rows
        left = [[x if f.dtype is object else int(x) for x in r] for r in self.a]
        right = [[f.one if i == j else f.zero for j in range(n)] for i in range(n)]
        det = f.one
        for col in range(n):
            piv = next((r for r in range(col, n) if left[r][col] != 0), None)
            if piv is None:
                return left, right, f.zero
            if piv != col:
                left[col], left[piv] = left[piv], left[col]
                right[col], right[piv] = right[piv], right[col]
                det = f.neg(det)
            pv = left[col][col]
            det = f.mul(det, pv)
            s = f.inv(pv)
            left[col] = [f.mul(s, x) for x in left[col]]
            right[col] = [f.mul(s, x) for x in right[col]]
            for r in range(n):
                c = left[r][col]
                if r != col and c != 0:
                    left[r] = [f.sub(x, f.mul(c, y)) for x, y in zip(left[r], left[col])]
                    right[r] = [f.sub(x, f.mul(c, y)) for x, y in zip(right[r], right[col])]
        return left, right, det

    def det(self) -> Any:
        if not self.is_square():
            raise DimensionError("determinant of a non-square matrix")
        return self._echelon()[2]

    def inv(self) -> Mat:
        if not self.is_square():
            raise DimensionError(f"cannot invert a {self.rows}x{self.cols} matrix")
        _, right, det = self._echelon()
        if det == 0:
            raise SingularMatrixError("matrix is singular")
        out = Mat.from_rows(self.field, right)
        if not (self @ out).is_identity():  # pragma: no cover - arithmetic bug guard
            raise ArithmeticError("inverse check failed")
        return out

    def __pow__(self, e: int) -> Mat:
        if not self.is_square():
            raise DimensionError("power of a non-square matrix")
        base = self.inv() if e < 0 else self
        e = abs(e)
        result = Mat.identity(self.field, self.rows)
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def rank(self) -> int:
        """Rank by row reduction (works for non-square input)."""
        f = self.field
        rows = [[x if f.dtype is object else int(x) for x in r] for r in self.a]
        rank = 0
        for col in range(self.cols):
            piv = next((r for r in range(rank, self.rows) if rows[r][col] != 0), None)
            if piv is None:
                continue
            rows[rank], rows[piv] = rows[piv], rows[rank]
            s = f.inv(rows[rank][col])
            rows[rank] = [f.mul(s, x) for x in rows[rank]]
            for r in range(self.rows):
                c = rows[r][col]
                if r != rank and c != 0:
                    rows[r] = [f.sub(x, f.mul(c, y)) for x, y in zip(rows[r], rows[rank])]
            rank += 1
        return rank

    def key(self) -> Any:
        if self._key is None:
            if self.field.dtype is object:
                self._key = (self.shape, tuple(self.a.flat))
            else:
                self._key = (self.shape, self.a.tobytes())
        return self._key

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Mat)
            and self.field == other.field
            and self.shape == other.shape
            and bool(np.array_equal(self.a, other.a))
        )

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"Mat({self.field}, {encode_matrix(self)})"


def mat_ops(op: str, *args: Any) -> Mat:
    """Dispatch ``mul``, ``add``, ``transpose``, ``inv`` or ``pow``."""
    if op == "mul":
        a, b = args
        return a @ b
    if op == "add":
        a, b = args
        return a + b
    if op == "transpose":
        (a,) = args
        return a.T
    if op == "inv":
        (a,) = args
        return a.inv()
    if op == "pow":
        a, e = args
        return a**e
    raise ValueError(f"unknown matrix operation {op!r}")


def elementary(field: Any, n: int, i: int, j: int) -> Mat:
    """E_{i,j}: 1 at the 1-based position (i, j)."""
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexError(f"E_{{{i},{j}}} outside size {n}")
    a = field.zeros((n, n))
    a[i - 1, j - 1] = field.one
    return Mat(field, a)


def jordan_block(field: Any, m: int) -> Mat:
    """Unipotent upper-triangular Jordan block of size m."""
    if m < 1:
        raise ValueError("Jordan block size must be positive")
    a = field.eye(m)
    for i in range(m - 1):
        a[i, i + 1] = field.one
    return Mat(field, a)


def outer(col: Mat, row: Mat) -> Mat:
    """Outer product of an m x 1 column and a 1 x k row."""
    col._check(row)
    if col.cols != 1 or row.rows != 1:
        raise DimensionError(f"outer needs m x 1 and 1 x k, got {col.shape}, {row.shape}")
    return col @ row


def block(blocks: Sequence[Sequence[Mat]]) -> Mat:
    """Assemble a block matrix from a grid of compatible blocks."""
    field = blocks[0][0].field
    rows = [np.concatenate([b.a for b in brow], axis=1) for brow in blocks]
    if len({r.shape[1] for r in rows}) != 1:
        raise DimensionError("block rows have different widths")
    return Mat(field, np.concatenate(rows, axis=0))


def diag(*mats: Mat) -> Mat:
    field = mats[0].field
    n = sum(m.rows for m in mats)
    c = sum(m.cols for m in mats)
    a = field.zeros((n, c))
    i = j = 0
    for m in mats:
        a[i : i + m.rows, j : j + m.cols] = m.a
        i += m.rows
        j += m.cols
    return Mat(field, a)


def row_vector(field: Any, values: Iterable[Any]) -> Mat:
    return Mat.from_rows(field, [list(values)])


def col_vector(field: Any, values: Iterable[Any]) -> Mat:
    return Mat.from_rows(field, [[x] for x in values])


def is_unipotent_array(field: Any, a: np.ndarray) -> np.ndarray:
    """Batched test (M - I)^s == 0 for an array of s x s matrices."""
    s = a.shape[-1]
    nil = field.vsub(a, field.eye(s))
    acc = nil
    for _ in range(s - 1):
        acc = field.matmul(acc, nil)
    return ~np.any(acc != 0, axis=(-2, -1))


# -- text encoding ----------------------------------------------------------


def encode_matrix(m: Mat) -> str:
    f = m.field
    return ";".join(",".join(f.encode(x) for x in row) for row in m.a)


def decode_matrix(field: Any, text: str) -> Mat:
    rows = [r for r in text.strip().split(";")]
    try:
        return Mat.from_rows(field, [[field.decode(x) for x in r.split(",")] for r in rows])
    except DimensionError as exc:
        raise FormatError(str(exc)) from None
