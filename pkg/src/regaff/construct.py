"""Regular subgroups R = M x| N of AGL_{m+k}(F) built from a form and a homomorphism.

For a quadratic form Q on F^m with Gram matrix J, a nonzero d in F^k and an
additive homomorphism phi: F^k -> O_m(F, Q):

* N = { n(v) = (1, v, Q(v)d; 0, I_m, Jv^T (x) d; 0, 0, I_k) }
* M = { m(a) = (1, 0, a; 0, phi(a), 0; 0, 0, I_k) }
* R = M N, whose element with first row (1, v, a) is
  r(v, a) = (1, v, a; 0, phi(s), phi(s) Jv^T (x) d; 0, 0, I_k) with s = a - Q(v)d.

R is regular and R meets the translations in { r(0, a) : phi(a) = I }.
"""

from __future__ import annotations

from typing import Any, Iterator, Sequence

import numpy as np

from .affine import AffineElem
from .errors import DimensionError, InadmissibleError
from .field import make_field
from .linalg import Mat
from .quadform import AdditiveHom, QuadraticForm, SubspaceBasis, builtin, with_kernel

FAMILY_ALIASES = {"1": "example1", "2": "example2", "3": "example3"}


class RegularSubgroupDesc:
    """Parameters of one R = M x| N and its element map (v, a) -> r(v, a)."""

    def __init__(self, field: Any, n: int, m: int, k: int, d: Sequence[Any], Q: QuadraticForm,
                 phi: AdditiveHom, kind: str | None = None):
        if m + k != n or m < 1 or k < 1:
            raise DimensionError(f"split (m, k) = ({m}, {k}) does not fit n = {n}")
        if Q.m != m or phi.m != m or phi.k != k:
            raise DimensionError("form / homomorphism sizes do not match the split")
        d = tuple(field(x) for x in d)
        if len(d) != k:
            raise DimensionError(f"d must lie in F^{k}")
        if all(x == 0 for x in d):
            raise ValueError("d must be nonzero")
        if not Q.is_nondegenerate():
            raise ValueError("quadratic form is degenerate")
        self.field = field
        self.n = n
        self.m = m
        self.k = k
        self.d = d
        self.Q = Q
        self.phi = phi
        self.kind = kind or phi.kind
        self.J = Q.gram()
        self._d = field.asarray(list(d))

    @property
    def W(self) -> SubspaceBasis:
        return self.phi.W

    @property
    def order(self) -> int | None:
        """q^n for a finite field, None over QQ."""
        return self.field.order**self.n if self.field.is_finite else None

    def __repr__(self) -> str:
        return (f"RegularSubgroupDesc({self.kind}, F={self.field}, n={self.n}, "
                f"(m, k)=({self.m}, {self.k}), d={self.d}, dim W={self.W.dim})")

    # -- batched element maps --------------------------------------------

    def _frame(self, N: int) -> np.ndarray:
        f = self.field
        s = self.n + 1
        out = f.zeros((N, s, s))
        out[:, 0, 0] = f.one
        for i in range(1, s):
            out[:, i, i] = f.one
        return out

    def _jvd(self, V: np.ndarray) -> np.ndarray:
        """Jv^T (x) d for each row v; shape (N, m, k)."""
        f = self.field
        JvT = f.matmul(self.J.a, V[:, :, None])
        return f.vmul(JvT, self._d[None, None, :])

    def n_batch(self, V: np.ndarray) -> np.ndarray:
        f = self.field
        m = self.m
        out = self._frame(len(V))
        out[:, 0, 1 : m + 1] = V
        out[:, 0, m + 1 :] = f.vmul(self.Q.batch(V)[:, None], self._d[None, :])
        out[:, 1 : m + 1, m + 1 :] = self._jvd(V)
        return out

    def m_batch(self, A: np.ndarray) -> np.ndarray:
        m = self.m
        out = self._frame(len(A))
        out[:, 0, m + 1 :] = A
        out[:, 1 : m + 1, 1 : m + 1] = self.phi.batch(A)
        return out

    def r_batch(self, V: np.ndarray, A: np.ndarray) -> np.ndarray:
        f = self.field
        m = self.m
        S = f.vsub(A, f.vmul(self.Q.batch(V)[:, None], self._d[None, :]))
        P = self.phi.batch(S)
        out = self._frame(len(V))
        out[:, 0, 1 : m + 1] = V
        out[:, 0, m + 1 :] = A
        out[:, 1 : m + 1, 1 : m + 1] = P
        out[:, 1 : m + 1, m + 1 :] = f.matmul(P, self._jvd(V))
        return out

    def from_rows(self, X: np.ndarray) -> np.ndarray:
        """r(v, a) for each affine point (v, a) given as rows of an (N, n) array."""
        return self.r_batch(X[:, : self.m], X[:, self.m :])

    # -- single elements ----------------------------------------------------

    def _vec(self, v: Sequence[Any], size: int) -> np.ndarray:
        if len(v) != size:
            raise DimensionError(f"expected a vector of length {size}, got {len(v)}")
        return self.field.asarray([[self.field(x) for x in v]])

    def n_element(self, v: Sequence[Any]) -> AffineElem:
        return AffineElem(Mat(self.field, self.n_batch(self._vec(v, self.m))[0]), check=False)

    def m_element(self, a: Sequence[Any]) -> AffineElem:
        return AffineElem(Mat(self.field, self.m_batch(self._vec(a, self.k))[0]), check=False)

    def r_element(self, v: Sequence[Any], a: Sequence[Any]) -> AffineElem:
        V = self._vec(v, self.m)
        A = self._vec(a, self.k)
        return AffineElem(Mat(self.field, self.r_batch(V, A)[0]), check=False)

    # -- enumeration (finite fields) ---------------------------------------

    def points(self, start: int = 0, stop: int | None = None) -> np.ndarray:
        """Affine points with lexicographic indices in [start, stop), as (N, n) rows."""
        q = self.field.order
        stop = self.order if stop is None else stop
        idx = np.arange(start, stop, dtype=np.int64)
        return np.stack([(idx // q ** (self.n - 1 - j)) % q for j in range(self.n)], axis=1)

    def point_index(self, X: np.ndarray) -> np.ndarray:
        q = self.field.order
        idx = np.zeros(len(X), dtype=np.int64)
        for j in range(self.n):
            idx = idx * q + X[:, j]
        return idx

    def elements(self, chunk: int = 4096) -> Iterator[AffineElem]:
        if not self.field.is_finite:
            raise ValueError("cannot enumerate a group over QQ")
        for start in range(0, self.order, chunk):
            stop = min(start + chunk, self.order)
            for a in self.from_rows(self.points(start, stop)):
                yield AffineElem(Mat(self.field, a), check=False)

    def generators(self) -> list[AffineElem]:
        """n(w e_i) and m(w e_j) for w in the prime-field basis of F."""
        f = self.field
        basis = [f.from_coeffs([int(i == j) for j in range(f.ell)]) for i in range(f.ell)] if f.is_finite else [f.one]
        gens = []
        for size, make in ((self.m, self.n_element), (self.k, self.m_element)):
            for i in range(size):
                for w in basis:
                    v = [f.zero] * size
                    v[i] = w
                    gens.append(make(v))
        return gens


def family_for(field: Any, n: int) -> str:
    """The family the general existence argument uses for (n, char F)."""
    if n == 3:
        return "example2_n3q2"
    if field.characteristic != 2:
        return "example1"
    return "example2_odd" if n % 2 else "example3"


def admissibility(field: Any, n: int) -> str | None:
    """None if R_W exists for (n, F) by the construction, else the reason it fails."""
    char = field.characteristic
    if n <= 2:
        return f"n = {n} <= 2: every regular subgroup of AGL_{n}(F) contains a nontrivial translation"
    if n == 3 and field != make_field(2):
        return "n = 3 requires F = GF(2); over any other field a regular subgroup of AGL_3(F) has nontrivial translations"
    if n == 4 and char == 2:
        return "n = 4 requires characteristic != 2; in characteristic 2 every regular subgroup of AGL_4(F) has nontrivial translations"
    return None


def _resolve_family(field: Any, n: int, example: str) -> str:
    if example == "auto":
        return family_for(field, n)
    kind = FAMILY_ALIASES.get(example, example)
    if kind == "example2":
        kind = "example2_n3q2" if n == 3 else "example2_odd"
    return kind


def embed_W(field: Any, k: int, W: Any) -> SubspaceBasis:
    """W as a SubspaceBasis of F^k.

    A list of scalars w (codes, encoded strings or FieldValues) is embedded
    as { (w, 0, ..., 0) }.  Pass a SubspaceBasis for arbitrary subspaces of F^k.
    """
    if W is None:
        return SubspaceBasis(field, k)
    if isinstance(W, SubspaceBasis):
        return W
    return SubspaceBasis(field, k, [(field(w),) + (field.zero,) * (k - 1) for w in W])


def build_rw(field: Any, n: int, W: Any = None, d: Sequence[Any] | None = None,
             example: str = "auto") -> RegularSubgroupDesc:
    """R_W in AGL_n(F) with R_W meeting the translations in a copy of (W, +).

    ``W`` may be a SubspaceBasis of F^k, a list of field elements (embedded
    as W x {0} when k = 2), or None for the zero subspace.
    """
    reason = admissibility(field, n)
    if reason is not None:
        raise InadmissibleError(reason)
    kind = _resolve_family(field, n, example)
    Q, psi, m, k = builtin(kind, field, n)
    Wb = embed_W(field, k, W)
    if Wb.k != k:
        raise DimensionError(f"W must lie in F^{k} for this family")
    if d is None:
        d = [field.one] + [field.zero] * (k - 1)
    phi = with_kernel(psi, Wb)
    return RegularSubgroupDesc(field, n, m, k, d, Q, phi, kind)


def hegedus_agl32() -> tuple[AffineElem, AffineElem]:
    """Two generators over GF(2) of a translation-free regular subgroup of AGL_3(2).

    I_4 + E_{1,2} + E_{2,3} + E_{3,4} and I_4 + E_{1,4} + E_{2,3} + E_{2,4}.
    """
    F2 = make_field(2)

    def elem(*positions: tuple[int, int]) -> AffineElem:
        a = np.eye(4, dtype=np.int64)
        for i, j in positions:
            a[i - 1, j - 1] = 1
        return AffineElem(Mat(F2, a))

    return elem((1, 2), (2, 3), (3, 4)), elem((1, 4), (2, 3), (2, 4))
