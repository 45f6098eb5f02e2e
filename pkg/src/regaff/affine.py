"""Elements of AGL_n(F) as (n+1) x (n+1) block matrices (1 v; 0 A).

The group acts on row vectors, so ``(1 u; 0 A)(1 w; 0 B) = (1, w + uB; 0, AB)``.
"""

from __future__ import annotations

from collections import deque
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import DimensionError, FieldMismatchError, SingularMatrixError
from .linalg import Mat, diag, is_unipotent_array


class AffineElem:
    """An element of AGL_n(F) wrapping its (n+1) x (n+1) matrix."""

    __slots__ = ("mat",)

    def __init__(self, mat: Mat, check: bool = True):
        if check:
            a = mat.a
            f = mat.field
            if not mat.is_square() or mat.rows < 2:
                raise DimensionError(f"affine matrix must be square of size >= 2, got {mat.shape}")
            if a[0, 0] != f.one or np.any(a[1:, 0] != 0):
                raise ValueError("first column must be (1, 0, ..., 0)^T")
            if Mat(f, a[1:, 1:]).det() == 0:
                raise SingularMatrixError("linear part is singular")
        self.mat = mat

    @property
    def field(self) -> Any:
        return self.mat.field

    @property
    def n(self) -> int:
        return self.mat.rows - 1

    @property
    def vector(self) -> tuple:
        return tuple(self.mat.a[0, 1:])

    @property
    def linear(self) -> Mat:
        return Mat(self.field, self.mat.a[1:, 1:])

    @property
    def first_row(self) -> tuple:
        return tuple(self.mat.a[0])

    def __matmul__(self, other: AffineElem) -> AffineElem:
        if other.n != self.n:
            raise DimensionError(f"AGL_{self.n} times AGL_{other.n}")
        return AffineElem(self.mat @ other.mat, check=False)

    __mul__ = __matmul__

    def inverse(self) -> AffineElem:
        return AffineElem(self.mat.inv(), check=False)

    def __pow__(self, e: int) -> AffineElem:
        return AffineElem(self.mat**e, check=False)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AffineElem) and self.mat == other.mat

    def __hash__(self) -> int:
        return hash(self.mat)

    def __repr__(self) -> str:
        return f"AffineElem({self.mat!r})"


def make_affine(v: Sequence[Any], A: Mat) -> AffineElem:
    """The block matrix (1 v; 0 A)."""
    f = A.field
    n = A.rows
    if not A.is_square():
        raise DimensionError("linear part must be square")
    if len(v) != n:
        raise DimensionError(f"vector of length {len(v)} for AGL_{n}")
    if A.det() == 0:
        raise SingularMatrixError("linear part is singular")
    a = f.zeros((n + 1, n + 1))
    a[0, 0] = f.one
    a[0, 1:] = [f(x) for x in v]
    a[1:, 1:] = A.a
    return AffineElem(Mat(f, a), check=False)


def identity(field: Any, n: int) -> AffineElem:
    return AffineElem(Mat.identity(field, n + 1), check=False)


def translation(field: Any, v: Sequence[Any]) -> AffineElem:
    return make_affine(v, Mat.identity(field, len(v)))


def project_pi(g: AffineElem) -> Mat:
    """The linear part A of (1 v; 0 A)."""
    return g.linear


def is_translation(g: AffineElem) -> bool:
    return g.linear.is_identity()


def is_unipotent(g: AffineElem) -> bool:
    return bool(is_unipotent_array(g.field, g.mat.a))


def conjugate(g: AffineElem, h: AffineElem) -> AffineElem:
    """h^-1 g h."""
    if g.n != h.n:
        raise DimensionError("conjugation across different dimensions")
    return h.inverse() @ g @ h


def permutation_affine(field: Any, perm: Sequence[int]) -> AffineElem:
    """Permutation matrix on the basis e_1..e_n (1-based images), fixing e_0.

    Row i has its 1 in column perm[i-1], so e_i maps to e_{perm[i-1]}.
    """
    n = len(perm)
    if sorted(perm) != list(range(1, n + 1)):
        raise ValueError(f"{perm} is not a permutation of 1..{n}")
    a = field.zeros((n, n))
    for i, j in enumerate(perm):
        a[i, j - 1] = field.one
    return make_affine([field.zero] * n, Mat(field, a))


def direct_product(S1: Iterable[AffineElem], S2: Iterable[AffineElem]) -> frozenset[AffineElem]:
    """All block combinations: vectors concatenated, linear parts block-diagonal."""
    S1 = list(S1)
    S2 = list(S2)
    if not S1 or not S2:
        return frozenset()
    f = S1[0].field
    if any(g.field != f for g in S1 + S2):
        raise FieldMismatchError("direct product of subgroups over different fields")
    out = set()
    for g in S1:
        for h in S2:
            v = list(g.vector) + list(h.vector)
            lin = diag(g.linear, h.linear)
            a = f.zeros((len(v) + 1, len(v) + 1))
            a[0, 0] = f.one
            a[0, 1:] = v
            a[1:, 1:] = lin.a
            out.add(AffineElem(Mat(f, a), check=False))
    return frozenset(out)


def closure(gens: Iterable[AffineElem], limit: int | None = None) -> frozenset[AffineElem]:
    """The group generated by ``gens``, by breadth-first right multiplication."""
    gens = list(gens)
    if not gens:
        raise ValueError("closure of an empty generator list")
    one = identity(gens[0].field, gens[0].n)
    seen = {one}
    queue = deque([one])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = x @ g
            if y not in seen:
                seen.add(y)
                if limit is not None and len(seen) > limit:
                    raise ValueError(f"closure exceeds {limit} elements")
                queue.append(y)
    return frozenset(seen)


def stack(elems: Iterable[AffineElem]) -> np.ndarray:
    """Stack element matrices into one (N, n+1, n+1) array."""
    elems = list(elems)
    return np.stack([g.mat.a for g in elems])


def unstack(field: Any, arr: np.ndarray) -> list[AffineElem]:
    return [AffineElem(Mat(field, a), check=False) for a in arr]


def sort_key(g: AffineElem) -> tuple:
    return tuple(tuple(r) for r in g.mat.a.tolist())
