"""Quadratic forms, isometries and additive homomorphisms into O_m(F, Q).

A form on F^m is stored as an upper-triangular coefficient matrix U with
Q(v) = v U v^T, which works in every characteristic.  Its polar form
B(u, v) = Q(u+v) - Q(u) - Q(v) has Gram matrix J = U + U^T.
"""

from __future__ import annotations

import itertools
from typing import Any, Callable, Sequence

import numpy as np

from .checks import Check, sampled
from .errors import DimensionError, InadmissibleError
from .field import make_field
from .linalg import Mat

BUILTIN_KINDS = ("example1", "example2_odd", "example2_n3q2", "example3")


class QuadraticForm:
    """Q(v) = v U v^T for an upper-triangular U."""

    def __init__(self, U: Mat):
        if not U.is_square():
            raise DimensionError("coefficient matrix must be square")
        if np.any(np.tril(U.a != 0, -1)):
            raise ValueError("coefficient matrix must be upper triangular")
        self.U = U
        self.field = U.field

    @classmethod
    def from_terms(cls, field: Any, m: int, terms: dict[tuple[int, int], Any]) -> QuadraticForm:
        """Build from {(i, j): coeff} with 1-based i <= j."""
        a = field.zeros((m, m))
        for (i, j), c in terms.items():
            if not 1 <= i <= j <= m:
                raise ValueError(f"term ({i}, {j}) is not upper triangular in size {m}")
            a[i - 1, j - 1] = field.add(a[i - 1, j - 1], c)
        return cls(Mat(field, a))

    @property
    def m(self) -> int:
        return self.U.rows

    def __call__(self, v: Sequence[Any]) -> Any:
        if len(v) != self.m:
            raise DimensionError(f"vector of length {len(v)} for a form on F^{self.m}")
        return self.batch(self.field.asarray([list(v)]))[0]

    def batch(self, V: np.ndarray) -> np.ndarray:
        """Q on each row of an (N, m) array."""
        f = self.field
        VU = f.matmul(V[:, None, :], self.U.a)[:, 0, :]
        return f.vsum(f.vmul(VU, V), axis=-1)

    def gram(self) -> Mat:
        return self.U + self.U.T

    def polar(self, u: Sequence[Any], v: Sequence[Any]) -> Any:
        f = self.field
        J = self.gram()
        uu = f.asarray([list(u)])
        vv = f.asarray([list(v)])
        return f.matmul(f.matmul(uu, J.a), vv.T)[0, 0]

    def is_nondegenerate(self) -> bool:
        return self.gram().det() != 0

    def __eq__(self, other: object) -> bool:
        return isinstance(other, QuadraticForm) and self.U == other.U

    def __repr__(self) -> str:
        return f"QuadraticForm({self.U!r})"


def eval_Q(Q: QuadraticForm, v: Sequence[Any]) -> Any:
    return Q(v)


def polar_gram(Q: QuadraticForm) -> Mat:
    return Q.gram()


def isometry_mask(Q: QuadraticForm, As: np.ndarray) -> np.ndarray:
    """Batched isometry test for an (N, m, m) array of matrices.

    A is an isometry iff A J A^T = J and Q(e_i A) = Q(e_i) for every i;
    the diagonal values and the polar form determine Q completely.
    """
    f = Q.field
    m = Q.m
    J = Q.gram().a
    AJAt = f.matmul(f.matmul(As, J), np.swapaxes(As, -1, -2))
    polar_ok = np.all(AJAt == J, axis=(-2, -1))
    diag_Q = np.array([Q.U.a[i, i] for i in range(m)], dtype=f.dtype)
    rows = As.reshape(-1, m)
    row_Q = Q.batch(rows).reshape(As.shape[0], m)
    diag_ok = np.all(row_Q == diag_Q, axis=-1)
    return polar_ok & diag_ok


def is_isometry(Q: QuadraticForm, A: Mat) -> bool:
    if A.shape != (Q.m, Q.m):
        raise DimensionError(f"{A.shape} matrix against a form on F^{Q.m}")
    return bool(isometry_mask(Q, A.a[None])[0])


class SubspaceBasis:
    """Vectors of F^k that are independent over the prime field."""

    def __init__(self, field: Any, k: int, vectors: Sequence[Sequence[Any]] = ()):
        self.field = field
        self.k = k
        vecs = []
        for v in vectors:
            if len(v) != k:
                raise DimensionError(f"basis vector of length {len(v)} in F^{k}")
            vecs.append(tuple(field(x) for x in v))
        self.vectors = tuple(vecs)
        if vecs:
            if not field.is_finite:
                raise ValueError("only the zero subspace is supported over QQ")
            if self._prime_matrix().rank() != len(vecs):
                raise ValueError("basis vectors are dependent over the prime field")

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def _prime_matrix(self) -> Mat:
        return Mat.from_rows(make_field(self.field.p), [prime_row(self.field, v) for v in self.vectors])

    def span(self) -> list[tuple]:
        """All prime-field combinations of the basis, in coefficient-lexicographic order."""
        f = self.field
        zero = tuple(f.zero for _ in range(self.k))
        if not self.vectors:
            return [zero]
        out = []
        for cs in itertools.product(range(f.p), repeat=self.dim):
            acc = list(zero)
            for c, v in zip(cs, self.vectors):
                for i, x in enumerate(v):
                    acc[i] = f.add(acc[i], f.mul(f.integer(c), x))
            out.append(tuple(acc))
        return out

    def __repr__(self) -> str:
        return f"SubspaceBasis({self.field}, k={self.k}, {list(self.vectors)})"


def prime_row(field: Any, v: Sequence[int]) -> list[int]:
    """Concatenated prime-field coordinates of a vector of F^k."""
    return [c for x in v for c in field.prime_coords(x)]


class AdditiveHom:
    """A homomorphism (F^k, +) -> GL_m(F) given by a batched evaluation rule.

    ``rule`` maps an (N, k) array of arguments to an (N, m, m) array.
    """

    def __init__(self, field: Any, k: int, m: int, rule: Callable[[np.ndarray], np.ndarray], kind: str,
                 W: SubspaceBasis | None = None):
        self.field = field
        self.k = k
        self.m = m
        self.rule = rule
        self.kind = kind
        self.W = W if W is not None else SubspaceBasis(field, k)

    def batch(self, S: np.ndarray) -> np.ndarray:
        return self.rule(S)

    def __call__(self, a: Sequence[Any]) -> Mat:
        if len(a) != self.k:
            raise DimensionError(f"argument of length {len(a)} for a map on F^{self.k}")
        S = self.field.asarray([[self.field(x) for x in a]])
        return Mat(self.field, self.batch(S)[0])

    def __repr__(self) -> str:
        return f"AdditiveHom({self.kind}, F={self.field}, k={self.k}, m={self.m}, dim W={self.W.dim})"


def _eye_batch(field: Any, N: int, m: int) -> np.ndarray:
    return np.broadcast_to(field.eye(m), (N, m, m)).copy()


def _example1(field: Any, n: int) -> tuple[QuadraticForm, AdditiveHom]:
    f = field
    m = n - 1
    half = f.inv(f.integer(2))
    terms = {(1, 3): f.one, (2, 2): f.neg(f.one)}
    for i in range(4, m + 1):
        terms[(i, i)] = half
    Q = QuadraticForm.from_terms(f, m, terms)
    two = f.integer(2)

    def rule(S: np.ndarray) -> np.ndarray:
        a = S[:, 0]
        P = _eye_batch(f, len(a), m)
        P[:, 1, 0] = f.vmul(two, a)
        P[:, 2, 0] = f.vmul(a, a)
        P[:, 2, 1] = a
        return P

    return Q, AdditiveHom(f, 1, m, rule, "example1")


def _hyperbolic(field: Any, t: int) -> QuadraticForm:
    return QuadraticForm.from_terms(field, 2 * t, {(i, t + i): field.one for i in range(1, t + 1)})


def _example2_odd(field: Any, n: int) -> tuple[QuadraticForm, AdditiveHom]:
    f = field
    t = (n - 1) // 2
    m = 2 * t
    Q = _hyperbolic(f, t)

    def rule(S: np.ndarray) -> np.ndarray:
        a = S[:, 0]
        P = _eye_batch(f, len(a), m)
        P[:, 0, t - 1] = f.vadd(P[:, 0, t - 1], a)
        P[:, m - 1, t] = f.vadd(P[:, m - 1, t], a)
        return P

    return Q, AdditiveHom(f, 1, m, rule, "example2_odd")


def _example2_n3q2(field: Any, n: int) -> tuple[QuadraticForm, AdditiveHom]:
    f = field
    Q = _hyperbolic(f, 1)
    swap = np.array([[0, 1], [1, 0]], dtype=f.dtype)

    def rule(S: np.ndarray) -> np.ndarray:
        a = S[:, 0]
        P = _eye_batch(f, len(a), 2)
        P[a != 0] = swap
        return P

    return Q, AdditiveHom(f, 1, 2, rule, "example2_n3q2")


def _example3(field: Any, n: int) -> tuple[QuadraticForm, AdditiveHom]:
    f = field
    t = (n - 2) // 2
    m = 2 * t
    Q = _hyperbolic(f, t)

    def rule(S: np.ndarray) -> np.ndarray:
        a = S[:, 0]
        b = S[:, 1]
        P = _eye_batch(f, len(a), m)
        for (i, j), c in (
            ((1, t), a),
            ((m, t + 1), a),
            ((1, m), b),
            ((t, t + 1), b),
            ((1, t + 1), f.vmul(a, b)),
        ):
            P[:, i - 1, j - 1] = f.vadd(P[:, i - 1, j - 1], c)
        return P

    return Q, AdditiveHom(f, 2, m, rule, "example3")


def builtin(kind: str, field: Any, n: int) -> tuple[QuadraticForm, AdditiveHom, int, int]:
    """One of the explicit (Q, phi) families; returns (Q, phi, m, k)."""
    char = field.characteristic
    if kind == "example1":
        if char == 2:
            raise InadmissibleError("example1 needs characteristic different from 2 (it uses 1/2)")
        if n < 4:
            raise InadmissibleError(f"example1 needs n >= 4, got n = {n}")
        Q, phi = _example1(field, n)
    elif kind == "example2_odd":
        if char != 2:
            raise InadmissibleError("example2_odd needs characteristic 2")
        if n % 2 == 0:
            raise InadmissibleError(f"example2_odd needs odd n = 2t+1, got n = {n}")
        if n < 5:
            raise InadmissibleError(f"example2_odd needs n >= 5, got n = {n}")
        Q, phi = _example2_odd(field, n)
    elif kind == "example2_n3q2":
        if field != make_field(2):
            raise InadmissibleError("example2_n3q2 is defined over GF(2) only")
        if n != 3:
            raise InadmissibleError(f"example2_n3q2 needs n = 3, got n = {n}")
        Q, phi = _example2_n3q2(field, n)
    elif kind == "example3":
        if char != 2:
            raise InadmissibleError("example3 needs characteristic 2")
        if n % 2 == 1:
            raise InadmissibleError(f"example3 needs even n = 2t+2, got n = {n}")
        if n < 6:
            raise InadmissibleError(f"example3 needs n >= 6, got n = {n}")
        Q, phi = _example3(field, n)
    else:
        raise ValueError(f"unknown family {kind!r}; choose from {BUILTIN_KINDS}")
    return Q, phi, phi.m, phi.k


def complement_projection(field: Any, W: SubspaceBasis) -> np.ndarray:
    """Prime-field matrix of the projection of F^k onto a complement U of W.

    U is spanned by the standard prime-field basis vectors that remain
    independent when appended greedily, in order, to the basis of W.  The
    returned (k*ell) x (k*ell) matrix P satisfies coords(u_a) = coords(a) P.
    """
    Fp = make_field(field.p)
    kl = W.k * field.ell
    rows = [prime_row(field, v) for v in W.vectors]
    for i in range(kl):
        e = [0] * kl
        e[i] = 1
        if Mat.from_rows(Fp, rows + [e]).rank() == len(rows) + 1:
            rows.append(e)
    B = Mat.from_rows(Fp, rows)
    D = np.diag([0] * W.dim + [1] * (kl - W.dim))
    return (B.inv().a @ D @ B.a) % field.p


def with_kernel(psi: AdditiveHom, W: SubspaceBasis) -> AdditiveHom:
    """phi = psi o proj_U, whose kernel is the prime-field span of W."""
    f = psi.field
    if W.k != psi.k:
        raise DimensionError(f"W lives in F^{W.k} but psi is defined on F^{psi.k}")
    if W.dim == 0:
        return AdditiveHom(f, psi.k, psi.m, psi.rule, psi.kind, W)
    P = complement_projection(f, W)
    k, ell, p = psi.k, f.ell, f.p

    def rule(S: np.ndarray) -> np.ndarray:
        X = f._digits(S).reshape(len(S), k * ell)
        U = (X @ P) % p
        return psi.rule(f._undigits(U.reshape(len(S), k, ell)))

    return AdditiveHom(f, k, psi.m, rule, psi.kind, W)


def all_vectors(field: Any, k: int) -> np.ndarray:
    """Every vector of F^k as rows of a (q^k, k) array, lexicographic order."""
    q = field.order
    idx = np.arange(q**k, dtype=np.int64)
    cols = [(idx // q ** (k - 1 - j)) % q for j in range(k)]
    return np.stack(cols, axis=1)


def check_additive(phi: AdditiveHom, seed: int = 0, trials: int = 256) -> Check:
    """phi(0) = I and phi(a + b) = phi(a) phi(b).

    Exhaustive over all pairs for a finite field, otherwise ``trials``
    seeded random pairs.
    """
    f = phi.field
    zero = f.zeros((1, phi.k))
    if not np.array_equal(phi.batch(zero)[0], f.eye(phi.m)):
        return Check("additive", False, witness=("phi(0)", tuple([f.zero] * phi.k)), detail="phi(0) != I")
    if f.is_finite:
        V = all_vectors(f, phi.k)
        vals = phi.batch(V)
        N = len(V)
        mode = "exhaustive"
        for i in range(N):
            A = np.broadcast_to(V[i], V.shape)
            sums = f.vadd(A, V)
            lhs = phi.batch(sums)
            rhs = f.matmul(vals[i], vals)
            bad = np.nonzero(~np.all(lhs == rhs, axis=(-2, -1)))[0]
            if len(bad):
                j = bad[0]
                return Check("additive", False, witness=(tuple(V[i]), tuple(V[j])), mode=mode,
                             detail=f"phi(a+b) != phi(a)phi(b) at a={tuple(V[i])}, b={tuple(V[j])}")
        return Check("additive", True, mode=mode, detail=f"{N * N} pairs")
    rng = np.random.default_rng(seed)
    A = f.random(rng, (trials, phi.k))
    B = f.random(rng, (trials, phi.k))
    lhs = phi.batch(f.vadd(A, B))
    rhs = f.matmul(phi.batch(A), phi.batch(B))
    ok = np.all(lhs == rhs, axis=(-2, -1))
    mode = sampled(seed, trials)
    if not ok.all():
        j = int(np.nonzero(~ok)[0][0])
        return Check("additive", False, witness=(tuple(A[j]), tuple(B[j])), mode=mode)
    return Check("additive", True, mode=mode, detail=f"{trials} pairs")


def kernel(phi: AdditiveHom) -> list[tuple]:
    """All a in F^k with phi(a) = I (finite fields only)."""
    f = phi.field
    V = all_vectors(f, phi.k)
    mask = np.all(phi.batch(V) == f.eye(phi.m), axis=(-2, -1))
    return [tuple(int(x) for x in v) for v in V[mask]]


__all__ = [
    "AdditiveHom",
    "QuadraticForm",
    "SubspaceBasis",
    "builtin",
    "check_additive",
    "eval_Q",
    "is_isometry",
    "isometry_mask",
    "kernel",
    "polar_gram",
    "with_kernel",
]
