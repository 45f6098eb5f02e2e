"""Property checks for explicit subgroups and for constructed R = M x| N.

Closure of a finite set S is proved without the |S|^2 product table: pick
generators G in S greedily until every element is reachable from the
identity by left multiplication with G, checking on the way that g s stays
in S for every g in G and every s in S.  Then S is the monoid generated by
G, so S S = S.

For a constructed group the same argument runs over the map (v, a) -> r(v, a):
each product g r is compared with r(first row of g r).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Any, Iterable

import numpy as np

from .affine import AffineElem, stack
from .checks import Check, sampled
from .construct import RegularSubgroupDesc
from .linalg import Mat, encode_matrix, is_unipotent_array
from .quadform import all_vectors, check_additive, isometry_mask

# Above this many elements a constructed group is verified on random samples.
EXHAUSTIVE_LIMIT = 1 << 20
CHUNK = 4096


def _key(arr: np.ndarray) -> Any:
    if arr.dtype == object:
        return tuple(arr.flat)
    return np.ascontiguousarray(arr).tobytes()


def _elems_list(S: Iterable[AffineElem]) -> list[AffineElem]:
    return sorted(S, key=lambda g: _key(g.mat.a)) if not isinstance(S, list) else S


def format_witness(w: Any) -> str:
    """Readable rendering of a witness; elements and matrices become encoded matrices."""
    if isinstance(w, AffineElem):
        return encode_matrix(w.mat)
    if isinstance(w, Mat):
        return encode_matrix(w)
    if isinstance(w, tuple):
        return "(" + " | ".join(format_witness(x) for x in w) + ")"
    return repr(w)


def check_closed(S: Iterable[AffineElem]) -> Check:
    """Closure of a finite set under multiplication, with a witness pair on failure."""
    elems = _elems_list(S)
    if not elems:
        return Check("closed", False, detail="empty set")
    f = elems[0].field
    E = stack(elems)
    index = {_key(a): i for i, a in enumerate(E)}
    eye = f.eye(E.shape[-1])
    if _key(eye) not in index:
        return Check("closed", False, witness=None, detail="identity missing")
    N = len(elems)
    reached = np.zeros(N, dtype=bool)
    reached[index[_key(eye)]] = True
    gens: list[int] = []

    def apply(g: int, idxs: np.ndarray) -> np.ndarray | Check:
        P = f.matmul(E[g], E[idxs])
        out = np.empty(len(idxs), dtype=np.int64)
        for j, a in enumerate(P):
            i = index.get(_key(a))
            if i is None:
                return Check("closed", False, witness=(elems[g], elems[int(idxs[j])]),
                             detail="product of witness pair escapes the set")
            out[j] = i
        return out

    while not reached.all():
        g = int(np.argmin(reached))
        gens.append(g)
        res = apply(g, np.nonzero(reached)[0])
        if isinstance(res, Check):
            return res
        frontier = np.unique(res[~reached[res]])
        reached[frontier] = True
        while len(frontier):
            found = []
            for h in gens:
                res = apply(h, frontier)
                if isinstance(res, Check):
                    return res
                found.append(res[~reached[res]])
            frontier = np.unique(np.concatenate(found))
            reached[frontier] = True
    return Check("closed", True, detail=f"{N} elements, {len(gens)} generators")


def check_regular(S: Iterable[AffineElem], field: Any, n: int) -> Check:
    """S is a subgroup of order q^n whose first rows are pairwise distinct."""
    elems = _elems_list(S)
    closed = check_closed(elems)
    if not closed:
        return Check("regular", False, witness=closed.witness, detail=f"not closed: {closed.detail}")
    q_n = field.order**n
    if len(elems) != q_n:
        return Check("regular", False, detail=f"order {len(elems)} != q^n = {q_n}")
    seen: dict[tuple, AffineElem] = {}
    for g in elems:
        row = g.first_row
        if row in seen:
            return Check("regular", False, witness=(seen[row], g), detail="two elements share a first row")
        seen[row] = g
    return Check("regular", True, detail=f"{q_n} distinct first rows")


def translation_subgroup(obj: RegularSubgroupDesc | Iterable[AffineElem]) -> frozenset[AffineElem]:
    """S meet Tr.

    For a constructed group only r(0, a) can be a translation (J is
    invertible and d != 0), so q^k elements are scanned instead of q^n.
    """
    if isinstance(obj, RegularSubgroupDesc):
        desc = obj
        f = desc.field
        if not f.is_finite:
            raise ValueError("translation scan needs a finite field")
        A = all_vectors(f, desc.k)
        V = f.zeros((len(A), desc.m))
        E = desc.r_batch(V, A)
        mask = np.all(E[:, 1:, 1:] == f.eye(desc.n), axis=(-2, -1))
        return frozenset(AffineElem(Mat(f, a), check=False) for a in E[mask])
    return frozenset(g for g in obj if g.linear.is_identity())


def translations_match_W(desc: RegularSubgroupDesc) -> Check:
    """w -> r(0, w) is an additive bijection from span(W) onto R meet Tr."""
    f = desc.field
    span = desc.W.span()
    zero_v = [f.zero] * desc.m
    image = {w: desc.r_element(zero_v, w) for w in span}
    T = translation_subgroup(desc)
    if len(set(image.values())) != len(span):
        return Check("W-match", False, detail="w -> r(0, w) is not injective")
    if set(image.values()) != T:
        extra = T - set(image.values())
        witness = next(iter(extra)) if extra else None
        return Check("W-match", False, witness=witness,
                     detail=f"|R meet Tr| = {len(T)} but |W| = {len(span)}")
    for w1 in span:
        for w2 in span:
            s = tuple(f.add(x, y) for x, y in zip(w1, w2))
            if image[w1] @ image[w2] != image[s]:
                return Check("W-match", False, witness=(w1, w2), detail="r(0, w) is not additive")
    return Check("W-match", True, detail=f"|R meet Tr| = |W| = {len(span)}")


def _first_mismatch(mask: np.ndarray) -> int | None:
    bad = np.nonzero(~mask)[0]
    return int(bad[0]) if len(bad) else None


def semidirect_identities(desc: RegularSubgroupDesc, seed: int = 0, trials: int = 256) -> list[Check]:
    """n(u)n(v) = n(u+v), m(a)m(b) = m(a+b), m(a)^-1 n(v) m(a) = n(v phi(a)).

    Exhaustive over all pairs for finite fields (chunked), seeded samples over QQ.
    """
    f = desc.field
    m, k = desc.m, desc.k
    out = []
    if f.is_finite:
        V = all_vectors(f, m)
        A = all_vectors(f, k)
        mode = "exhaustive"
        NV = desc.n_batch(V)
        MA = desc.m_batch(A)
        q = f.order

        def idx(X: np.ndarray) -> np.ndarray:
            r = np.zeros(X.shape[:-1], dtype=np.int64)
            for j in range(X.shape[-1]):
                r = r * q + X[..., j]
            return r

        for name, vecs, mats in (("N closure", V, NV), ("M closure", A, MA)):
            check = Check(name, True, mode=mode, detail=f"{len(vecs) ** 2} pairs")
            step = max(1, CHUNK // len(vecs))
            for s in range(0, len(vecs), step):
                L = mats[s : s + step]
                prod = f.matmul(L[:, None], mats[None, :])
                sums = f.vadd(vecs[s : s + step, None, :], vecs[None, :, :])
                ok = np.all(prod == mats[idx(sums)], axis=(-2, -1))
                if not ok.all():
                    i, j = map(int, np.argwhere(~ok)[0])
                    check = Check(name, False, witness=(tuple(vecs[s + i]), tuple(vecs[j])), mode=mode)
                    break
            out.append(check)
        check = Check("normalization", True, mode=mode, detail=f"{len(A) * len(V)} pairs")
        PA = desc.phi.batch(A)
        MAinv = desc.m_batch(f.vneg(A))
        for i in range(len(A)):
            conj = f.matmul(f.matmul(MAinv[i], NV), MA[i])
            vphi = f.matmul(V[:, None, :], PA[i])[:, 0, :]
            j = _first_mismatch(np.all(conj == desc.n_batch(vphi), axis=(-2, -1)))
            if j is not None:
                check = Check("normalization", False, witness=(tuple(A[i]), tuple(V[j])), mode=mode)
                break
        out.append(check)
        return out
    rng = np.random.default_rng(seed)
    mode = sampled(seed, trials)
    U1, U2 = f.random(rng, (trials, m)), f.random(rng, (trials, m))
    A1, A2 = f.random(rng, (trials, k)), f.random(rng, (trials, k))
    lhs = f.matmul(desc.n_batch(U1), desc.n_batch(U2))
    j = _first_mismatch(np.all(lhs == desc.n_batch(f.vadd(U1, U2)), axis=(-2, -1)))
    out.append(Check("N closure", j is None, mode=mode,
                     witness=None if j is None else (tuple(U1[j]), tuple(U2[j]))))
    lhs = f.matmul(desc.m_batch(A1), desc.m_batch(A2))
    j = _first_mismatch(np.all(lhs == desc.m_batch(f.vadd(A1, A2)), axis=(-2, -1)))
    out.append(Check("M closure", j is None, mode=mode,
                     witness=None if j is None else (tuple(A1[j]), tuple(A2[j]))))
    conj = f.matmul(f.matmul(desc.m_batch(f.vneg(A1)), desc.n_batch(U1)), desc.m_batch(A1))
    vphi = f.matmul(U1[:, None, :], desc.phi.batch(A1))[:, 0, :]
    j = _first_mismatch(np.all(conj == desc.n_batch(vphi), axis=(-2, -1)))
    out.append(Check("normalization", j is None, mode=mode,
                     witness=None if j is None else (tuple(A1[j]), tuple(U1[j]))))
    return out


@dataclass
class VerifyReport:
    """Aggregated verdicts for one group."""

    order: int | None
    regular: bool
    unipotent: bool
    translations: list[AffineElem]
    w_match: bool | None
    closure_verified: str
    checks: list[Check] = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c]

    def render(self) -> str:
        lines = [
            f"order: {self.order if self.order is not None else 'infinite'}",
            f"regular: {'yes' if self.regular else 'no'}",
            f"unipotent: {'yes' if self.unipotent else 'no'}",
            f"translations found: {len(self.translations)}",
            f"W-match: {'n/a' if self.w_match is None else ('yes' if self.w_match else 'no')}",
            f"closure-verified: {self.closure_verified}",
        ]
        for c in self.checks:
            lines.append(c.line())
            if not c and c.witness is not None:
                lines.append(f"  witness: {format_witness(c.witness)}")
        lines.append(f"verdict: {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(lines)


def _desc_exhaustive(desc: RegularSubgroupDesc) -> tuple[list[Check], list[AffineElem]]:
    f = desc.field
    N = desc.order
    s = desc.n + 1
    gens = np.stack([g.mat.a for g in desc.generators()])
    succ = np.empty((len(gens), N), dtype=np.int64)
    first_row = Check("first-row law", True, detail=f"{N} distinct first rows (1, v, a)")
    unip = Check("unipotent", True, detail=f"(r - I)^{s} = 0 for all {N} elements")
    law = Check("group law", True, detail=f"{len(gens)} generators x {N} elements")
    scanned: list[AffineElem] = []
    for start in range(0, N, CHUNK):
        stop = min(start + CHUNK, N)
        X = desc.points(start, stop)
        E = desc.from_rows(X)
        if first_row and not np.array_equal(E[:, 0, 1:], X):
            j = _first_mismatch(np.all(E[:, 0, 1:] == X, axis=-1))
            first_row = Check("first-row law", False, witness=tuple(X[j]))
        if unip:
            j = _first_mismatch(is_unipotent_array(f, E))
            if j is not None:
                unip = Check("unipotent", False, witness=AffineElem(Mat(f, E[j]), check=False))
        tmask = np.all(E[:, 1:, 1:] == f.eye(desc.n), axis=(-2, -1))
        scanned.extend(AffineElem(Mat(f, a), check=False) for a in E[tmask])
        for gi, g in enumerate(gens):
            P = f.matmul(g, E)
            Y = P[:, 0, 1:]
            succ[gi, start:stop] = desc.point_index(Y)
            if law:
                j = _first_mismatch(np.all(P == desc.from_rows(Y), axis=(-2, -1)))
                if j is not None:
                    law = Check("group law", False, witness=(AffineElem(Mat(f, g), check=False),
                                                             AffineElem(Mat(f, E[j]), check=False)),
                                detail="g r is not r(first row of g r)")
    reached = np.zeros(N, dtype=bool)
    reached[0] = True
    frontier = np.array([0])
    while len(frontier):
        nxt = np.unique(succ[:, frontier].ravel())
        frontier = nxt[~reached[nxt]]
        reached[frontier] = True
    identity_ok = np.array_equal(desc.from_rows(desc.points(0, 1))[0], f.eye(s))
    gen_ok = bool(reached.all()) and identity_ok
    generated = Check("generated", gen_ok,
                      detail=f"{int(reached.sum())}/{N} elements reachable from I",
                      witness=None if gen_ok else tuple(desc.points(int(np.argmin(reached)),
                                                                   int(np.argmin(reached)) + 1)[0]))
    return [first_row, unip, law, generated], scanned


def _desc_sampled(desc: RegularSubgroupDesc, seed: int, trials: int) -> list[Check]:
    f = desc.field
    rng = np.random.default_rng(seed)
    mode = sampled(seed, trials)
    X = f.random(rng, (trials, desc.n))
    Y = f.random(rng, (trials, desc.n))
    EX = desc.from_rows(X)
    EY = desc.from_rows(Y)
    out = []
    j = _first_mismatch(np.all(EX[:, 0, 1:] == X, axis=-1))
    out.append(Check("first-row law", j is None, mode=mode, witness=None if j is None else tuple(X[j])))
    j = _first_mismatch(is_unipotent_array(f, EX))
    out.append(Check("unipotent", j is None, mode=mode, witness=None if j is None else tuple(X[j])))
    P = f.matmul(EX, EY)
    j = _first_mismatch(np.all(P == desc.from_rows(P[:, 0, 1:]), axis=(-2, -1)))
    out.append(Check("group law", j is None, mode=mode, detail=f"{trials} products",
                     witness=None if j is None else (tuple(X[j]), tuple(Y[j]))))
    return out


def _isometry_check(desc: RegularSubgroupDesc, seed: int, trials: int) -> Check:
    f = desc.field
    if f.is_finite and f.order**desc.k <= EXHAUSTIVE_LIMIT:
        A = all_vectors(f, desc.k)
        mode = "exhaustive"
    else:
        A = f.random(np.random.default_rng(seed), (trials, desc.k))
        mode = sampled(seed, trials)
    j = _first_mismatch(isometry_mask(desc.Q, desc.phi.batch(A)))
    return Check("isometry", j is None, mode=mode, witness=None if j is None else tuple(A[j]),
                 detail=f"phi(a) in O(Q) for {len(A)} values of a")


def _translation_free_sampled(desc: RegularSubgroupDesc, seed: int, trials: int) -> Check:
    """Over QQ with W = 0: random r(v, a) with (v, a) != 0 are never translations."""
    f = desc.field
    X = f.random(np.random.default_rng(seed), (trials, desc.n))
    X = X[np.any(X != 0, axis=1)]
    E = desc.from_rows(X)
    mask = np.all(E[:, 1:, 1:] == f.eye(desc.n), axis=(-2, -1))
    j = _first_mismatch(~mask)
    return Check("translation-free", j is None, mode=sampled(seed, trials),
                 witness=None if j is None else tuple(X[j]))


def full_suite(desc: RegularSubgroupDesc, seed: int = 0, trials: int = 256) -> VerifyReport:
    """Every structural check on a constructed group.

    Exhaustive when the group is finite with at most EXHAUSTIVE_LIMIT
    elements, otherwise ``trials`` seeded samples.
    """
    f = desc.field
    checks = [Check("non-degenerate", desc.Q.is_nondegenerate(), detail="det(U + U^T) != 0")]
    checks.append(check_additive(desc.phi, seed=seed, trials=trials))
    checks.append(_isometry_check(desc, seed, trials))
    exhaustive = f.is_finite and desc.order <= EXHAUSTIVE_LIMIT
    if exhaustive:
        group_checks, scanned = _desc_exhaustive(desc)
        mode = "exhaustive"
    else:
        group_checks = _desc_sampled(desc, seed, trials)
        scanned = None
        mode = sampled(seed, trials)
    checks.extend(group_checks)
    w_match = None
    translations: list[AffineElem]
    if f.is_finite and f.order**desc.k <= EXHAUSTIVE_LIMIT:
        T = translation_subgroup(desc)
        translations = sorted(T, key=lambda g: _key(g.mat.a))
        if scanned is not None:
            agree = set(scanned) == T
            checks.append(Check("translation shortcut", agree,
                                detail="v = 0 scan equals the full scan" if agree else "scans disagree"))
        wm = translations_match_W(desc)
        checks.append(wm)
        w_match = wm.ok
    else:
        tf = _translation_free_sampled(desc, seed, trials)
        checks.append(tf)
        translations = [AffineElem(Mat.identity(f, desc.n + 1), check=False)]
        w_match = tf.ok if desc.W.dim == 0 else None
    by_name = {c.name: c for c in checks}
    regular = bool(by_name["first-row law"]) and bool(by_name["group law"]) and (
        not exhaustive or bool(by_name["generated"]))
    return VerifyReport(
        order=desc.order,
        regular=regular,
        unipotent=bool(by_name["unipotent"]),
        translations=translations,
        w_match=w_match,
        closure_verified=mode,
        checks=checks,
    )


def verify_elements(S: Iterable[AffineElem], field: Any, n: int,
                    desc: RegularSubgroupDesc | None = None) -> VerifyReport:
    """Checks on an explicit finite element set (e.g. read from a group file)."""
    elems = _elems_list(S)
    reg = check_regular(elems, field, n)
    checks = [reg]
    E = stack(elems)
    unip_mask = is_unipotent_array(field, E)
    j = _first_mismatch(unip_mask)
    checks.append(Check("unipotent", j is None, witness=None if j is None else elems[j]))
    T = sorted(translation_subgroup(elems), key=lambda g: _key(g.mat.a))
    if len(T) == 1:
        images = {g.linear for g in elems}
        checks.append(Check("pi injective", len(images) == len(elems),
                            detail=f"|pi(S)| = {len(images)}, |S| = {len(elems)}"))
    w_match = None
    if desc is not None:
        wm = translations_match_W(desc)
        same = set(T) == translation_subgroup(desc)
        checks.append(wm)
        checks.append(Check("matches construction", same and set(elems) == set(desc.elements()),
                            detail="element set equals the construction's"))
        w_match = wm.ok
    return VerifyReport(
        order=len(elems),
        regular=reg.ok,
        unipotent=j is None,
        translations=T,
        w_match=w_match,
        closure_verified="exhaustive",
        checks=checks,
    )
