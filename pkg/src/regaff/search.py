"""Exhaustive search for regular subgroups in unitriangular shape.

In positive characteristic every regular subgroup of AGL_n(q) is unipotent,
and every unipotent subgroup is conjugate under AGL_n(q) into the upper
unitriangular matrices U_{n+1}(q).  Conjugation preserves regularity and
preserves meeting the translations trivially (Tr is normal).  So it is
enough to search for regular subgroups inside U_{n+1}(q), i.e. for maps
A: F^n -> U_n(q) with A(0) = I satisfying the closure law

    A(w + u A(w)) = A(u) A(w)   for all u, w,

which is the first-row rule (1 u; 0 A)(1 w; 0 B) = (1, w + uB; 0, AB).

The search assigns A(v) at the first unassigned point v (lexicographic on
coordinate tuples), closes the partial group under multiplication, and
backtracks on any conflict.  Every node is a subgroup with distinct first
rows, and each regular subgroup is reached along exactly one branch.
"""

from __future__ import annotations

import itertools
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .affine import AffineElem, closure, make_affine
from .construct import admissibility, build_rw
from .errors import FormatError
from .field import QQ, FiniteField, field_of_order, parse_field_header
from .linalg import Mat

MODES = ("enumerate_all", "find_translation_free")
DEFAULT_MAX_POINTS = 64
# Precompute full tables when both |U_n(q)|^2 and (q^n)^2 stay below this.
DENSE_LIMIT = 1 << 20


class BudgetExceeded(Exception):
    """Raised internally when the node budget runs out."""


class SearchSpace:
    """Points of F^n, candidates U_n(q) and memoised products, all as indices."""

    def __init__(self, field: FiniteField, n: int):
        if not field.is_finite:
            raise ValueError("search needs a finite field")
        self.field = field
        self.n = n
        q = field.order
        self.points = list(itertools.product(range(q), repeat=n))
        self.point_index = {v: i for i, v in enumerate(self.points)}
        self.upper = [(i, j) for i in range(n) for j in range(i + 1, n)]
        self.cands = list(itertools.product(range(q), repeat=len(self.upper)))
        self.cand_index = {c: i for i, c in enumerate(self.cands)}
        self.identity = 0
        self._gf2 = field.p == 2 and field.ell == 1
        if self._gf2:
            self._rows = [self._pack(c) for c in self.cands]
            self._row_index = {r: i for i, r in enumerate(self._rows)}
            self._pbits = [sum(b << k for k, b in enumerate(v)) for v in self.points]
            self._pbits_index = {b: i for i, b in enumerate(self._pbits)}
        self._mul: dict[int, int] = {}
        self._act: dict[int, int] = {}
        self._add: dict[int, int] = {}
        self.dense: tuple[list[int], list[int], list[int]] | None = None
        if max(len(self.cands), len(self.points)) ** 2 <= DENSE_LIMIT:
            self.dense = self._dense_tables()

    def _dense_tables(self) -> tuple[list[int], list[int], list[int]]:
        """Flat product, action and addition tables indexed like the memo keys."""
        f = self.field
        q = f.order
        n = self.n
        C = len(self.cands)
        mats = np.stack([self.matrix(c) for c in range(C)])
        pts = np.array(self.points, dtype=np.int64).reshape(len(self.points), n)
        up_w = q ** np.arange(len(self.upper) - 1, -1, -1, dtype=np.int64)
        pt_w = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
        iu = tuple(np.array(ix, dtype=np.int64) for ix in zip(*self.upper)) if self.upper else None
        mul = np.empty((C, C), dtype=np.int64)
        for a in range(C):
            prod = f.matmul(mats[a][None], mats)
            mul[a] = prod[:, iu[0], iu[1]] @ up_w if iu is not None else 0
        act = np.empty((len(pts), C), dtype=np.int64)
        for u in range(len(pts)):
            act[u] = f.matmul(pts[u][None, None, :], mats)[:, 0, :] @ pt_w
        add = f.vadd(pts[:, None, :], pts[None, :, :]) @ pt_w
        return mul.ravel().tolist(), act.ravel().tolist(), add.ravel().tolist()

    # GF(2) fast path: a unitriangular matrix is a tuple of row bitmasks.

    def _pack(self, c: Sequence[int]) -> tuple[int, ...]:
        rows = [1 << i for i in range(self.n)]
        for (i, j), x in zip(self.upper, c):
            if x:
                rows[i] |= 1 << j
        return tuple(rows)

    @staticmethod
    def _xor_rows(bits: int, rows: Sequence[int]) -> int:
        acc = 0
        k = 0
        while bits:
            if bits & 1:
                acc ^= rows[k]
            bits >>= 1
            k += 1
        return acc

    def matrix(self, ci: int) -> np.ndarray:
        f = self.field
        a = f.eye(self.n)
        for (i, j), x in zip(self.upper, self.cands[ci]):
            a[i, j] = x
        return a

    def mul(self, a: int, b: int) -> int:
        key = a * len(self.cands) + b
        r = self._mul.get(key)
        if r is None:
            if self._gf2:
                rb = self._rows[b]
                r = self._row_index[tuple(self._xor_rows(x, rb) for x in self._rows[a])]
            else:
                prod = self.field.matmul(self.matrix(a), self.matrix(b))
                r = self.cand_index[tuple(int(prod[i, j]) for i, j in self.upper)]
            self._mul[key] = r
        return r

    def act(self, u: int, b: int) -> int:
        """Index of the point u A_b."""
        key = u * len(self.cands) + b
        r = self._act.get(key)
        if r is None:
            if self._gf2:
                r = self._pbits_index[self._xor_rows(self._pbits[u], self._rows[b])]
            else:
                row = self.field.matmul(np.array([self.points[u]]), self.matrix(b))[0]
                r = self.point_index[tuple(int(x) for x in row)]
            self._act[key] = r
        return r

    def add(self, u: int, w: int) -> int:
        key = u * len(self.points) + w
        r = self._add.get(key)
        if r is None:
            if self._gf2:
                r = self._pbits_index[self._pbits[u] ^ self._pbits[w]]
            else:
                f = self.field
                r = self.point_index[tuple(f.add(x, y) for x, y in zip(self.points[u], self.points[w]))]
            self._add[key] = r
        return r

    def element(self, point: int, ci: int) -> AffineElem:
        f = self.field
        a = f.eye(self.n + 1)
        a[0, 1:] = self.points[point]
        a[1:, 1:] = self.matrix(ci)
        return AffineElem(Mat(f, a), check=False)

    def group(self, amap: Sequence[int]) -> frozenset[AffineElem]:
        return frozenset(self.element(v, c) for v, c in enumerate(amap))


class _State:
    __slots__ = ("amap", "members", "gens")

    def __init__(self, amap: list[int], members: list[int], gens: list[tuple[int, int]]):
        self.amap = amap
        self.members = members
        self.gens = gens


class _Lazy:
    """Flat-index view over a memoised binary function, matching the dense tables."""

    __slots__ = ("fn", "width")

    def __init__(self, fn: Any, width: int):
        self.fn = fn
        self.width = width

    def __getitem__(self, key: int) -> int:
        return self.fn(*divmod(key, self.width))


def _extend(space: SearchSpace, st: _State, v: int, c: int, translation_free: bool) -> _State | None:
    """Close the partial group after setting A(v) = c; None on conflict.

    Every node is a closed subgroup, so a repeated linear part would already
    show up as a nontrivial translation; checking for A = I is enough.
    """
    if translation_free and c == space.identity:
        return None
    amap = st.amap.copy()
    members = st.members.copy()
    gens = st.gens + [(v, c)]
    amap[v] = c
    members.append(v)
    work = deque((x, ((v, c),)) for x in st.members)
    work.append((v, gens))
    ident = space.identity
    C = len(space.cands)
    P = len(space.points)
    if space.dense is not None:
        mtab, atab, ptab = space.dense
    else:
        mtab = _Lazy(space.mul, C)
        atab = _Lazy(space.act, C)
        ptab = _Lazy(space.add, P)
    while work:
        x, gs = work.popleft()
        ax = amap[x] * C
        xc = x * C
        for w, b in gs:
            t = ptab[w * P + atab[xc + b]]
            cc = mtab[ax + b]
            cur = amap[t]
            if cur < 0:
                if translation_free and cc == ident:
                    return None
                amap[t] = cc
                members.append(t)
                work.append((t, gens))
            elif cur != cc:
                return None
    return _State(amap, members, gens)


def _next_point(st: _State) -> int:
    for i, a in enumerate(st.amap):
        if a < 0:
            return i
    return -1


@dataclass
class SearchResult:
    """Outcome of a search; ``maps`` lists each group as A-indices in point order."""

    mode: str
    field: Any
    n: int
    maps: list[tuple[int, ...]]
    nodes: int
    wall_time: float
    complete: bool = True
    frames: list[tuple[int, int]] = dc_field(default_factory=list)
    explicit: list[frozenset[AffineElem]] | None = None

    @property
    def total(self) -> int:
        return len(self.explicit) if self.explicit is not None else len(self.maps)

    def groups(self) -> list[frozenset[AffineElem]]:
        if self.explicit is not None:
            return list(self.explicit)
        space = SearchSpace(self.field, self.n)
        return [space.group(m) for m in self.maps]

    @property
    def translation_free(self) -> int:
        return sum(1 for g in self.groups() if _is_translation_free(g))

    def witnesses(self) -> list[frozenset[AffineElem]]:
        return [g for g in self.groups() if _is_translation_free(g)]

    def summary(self) -> str:
        status = "complete" if self.complete else "INCOMPLETE (budget exhausted)"
        return (f"{self.mode} n={self.n} F={self.field}: {self.total} regular subgroup(s), "
                f"{self.translation_free} translation-free; {self.nodes} nodes, "
                f"{self.wall_time:.2f}s, {status}")


def _is_translation_free(group: Iterable[AffineElem]) -> bool:
    return sum(1 for g in group if g.linear.is_identity()) == 1


class _Searcher:
    def __init__(self, field: FiniteField, n: int, mode: str, budget_nodes: int | None = None,
                 root_filter: Sequence[int] | None = None):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        self.space = SearchSpace(field, n)
        self.mode = mode
        self.tf = mode == "find_translation_free"
        self.budget = budget_nodes
        self.root_filter = None if root_filter is None else set(root_filter)
        self.nodes = 0
        self.found: list[tuple[int, ...]] = []

    def root(self) -> _State:
        amap = [-1] * len(self.space.points)
        amap[0] = self.space.identity
        return _State(amap, [0], [])

    def run(self, frames: Sequence[tuple[int, int]] | None = None) -> list[tuple[int, int]]:
        """Depth-first search; returns [] when finished, else the frames to resume from."""
        sp = self.space
        ncand = len(sp.cands)
        st = self.root()
        stack: list[list[Any]] = []
        if frames:
            for depth, (v, ci) in enumerate(frames):
                stack.append([st, v, ci])
                if depth + 1 < len(frames):
                    st = _extend(sp, st, v, ci - 1, self.tf)
                    if st is None:
                        raise FormatError("checkpoint frames do not replay")
        else:
            stack.append([st, _next_point(st), 0])
        while stack:
            top = stack[-1]
            st, v, ci = top
            if len(stack) == 1 and self.root_filter is not None:
                while ci < ncand and ci not in self.root_filter:
                    ci += 1
                top[2] = ci
            if ci >= ncand:
                stack.pop()
                continue
            if self.budget is not None and self.nodes >= self.budget:
                return [(fr[1], fr[2]) for fr in stack]
            top[2] = ci + 1
            self.nodes += 1
            new = _extend(sp, st, v, ci, self.tf)
            if new is None:
                continue
            nxt = _next_point(new)
            if nxt < 0:
                self.found.append(tuple(new.amap))
                continue
            stack.append([new, nxt, 0])
        return []


def _worker(args: tuple) -> tuple[list[tuple[int, ...]], int]:
    p, ell, modulus, n, mode, root = args
    s = _Searcher(FiniteField(p, ell, modulus), n, mode, root_filter=root)
    s.run()
    return s.found, s.nodes


def search_regular(n: int, field: FiniteField, mode: str = "enumerate_all",
                   budget_nodes: int | None = None, checkpoint: str | Path | None = None,
                   resume: str | Path | None = None, threads: int = 1) -> SearchResult:
    """Enumerate regular subgroups of AGL_n(q) inside U_{n+1}(q).

    ``find_translation_free`` prunes every branch that forces a nontrivial
    translation, so its result lists exactly the translation-free ones.
    On budget exhaustion the result is flagged incomplete and, if
    ``checkpoint`` is given, the DFS frames are written there.
    """
    t0 = time.perf_counter()
    if threads > 1:
        if budget_nodes is not None or checkpoint or resume:
            raise ValueError("budget/checkpoint/resume need single-threaded mode")
        space = SearchSpace(field, n)
        chunks = [list(range(j, len(space.cands), threads)) for j in range(threads)]
        args = [(field.p, field.ell, field.modulus, n, mode, c) for c in chunks]
        maps: list[tuple[int, ...]] = []
        nodes = 0
        with ProcessPoolExecutor(max_workers=threads) as ex:
            for found, cnt in ex.map(_worker, args):
                maps.extend(found)
                nodes += cnt
        return SearchResult(mode, field, n, sorted(set(maps)), nodes, time.perf_counter() - t0)
    s = _Searcher(field, n, mode, budget_nodes)
    frames = None
    if resume:
        ck = read_checkpoint(resume)
        if (ck["field"], ck["n"], ck["mode"]) != (field, n, mode):
            raise ValueError("checkpoint was written for a different search")
        s.nodes = ck["nodes"]
        s.found = list(ck["maps"])
        frames = ck["frames"]
    left = s.run(frames)
    result = SearchResult(mode, field, n, sorted(set(s.found)), s.nodes, time.perf_counter() - t0,
                          complete=not left, frames=left)
    if left and checkpoint:
        write_checkpoint(checkpoint, result)
    return result


# -- checkpoints ---------------------------------------------------------------


def write_checkpoint(path: str | Path, result: SearchResult) -> None:
    lines = [
        "REGAFF v1",
        result.field.header(),
        f"SEARCH {result.n} {result.mode}",
        "ORDER lex",
        f"NODES {result.nodes}",
    ]
    lines += ["FOUND " + ",".join(map(str, m)) for m in result.maps]
    lines += [f"FRAME {v} {ci}" for v, ci in result.frames]
    Path(path).write_text("\n".join(lines) + "\n")


def read_checkpoint(path: str | Path) -> dict[str, Any]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != "REGAFF v1":
        raise FormatError("missing REGAFF v1 header", 1)
    out: dict[str, Any] = {"maps": [], "frames": []}
    for no, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if not parts:
            continue
        tag = parts[0]
        try:
            if tag == "FIELD":
                out["field"] = parse_field_header(line)
            elif tag == "SEARCH":
                out["n"] = int(parts[1])
                out["mode"] = parts[2]
            elif tag == "ORDER":
                if parts[1] != "lex":
                    raise FormatError(f"unsupported point order {parts[1]!r}", no)
            elif tag == "NODES":
                out["nodes"] = int(parts[1])
            elif tag == "FOUND":
                out["maps"].append(tuple(int(x) for x in parts[1].split(",")))
            elif tag == "FRAME":
                out["frames"].append((int(parts[1]), int(parts[2])))
            else:
                raise FormatError(f"unknown directive {tag!r}", no)
        except (IndexError, ValueError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"malformed {tag} line", no) from None
    for key in ("field", "n", "mode", "nodes"):
        if key not in out:
            raise FormatError(f"checkpoint lacks {key}")
    return out


# -- brute-force oracle ------------------------------------------------------------

ORACLE_SIZES = {(1, 2), (1, 3), (2, 2)}


def full_affine_group(field: FiniteField, n: int) -> list[AffineElem]:
    """Every element of AGL_n(q)."""
    out = []
    for entries in itertools.product(range(field.order), repeat=n * n):
        A = Mat(field, np.array(entries, dtype=np.int64).reshape(n, n))
        if A.det() == 0:
            continue
        for v in itertools.product(range(field.order), repeat=n):
            out.append(make_affine(v, A))
    return out


def naive_oracle(n: int, field: FiniteField) -> SearchResult:
    """All regular subgroups of the full AGL_n(q), found by closing generator tuples.

    A group of order p^r needs at most r generators, so closing every tuple
    of at most r elements finds every subgroup of order q^n.
    """
    if (n, field.order) not in ORACLE_SIZES:
        raise ValueError(f"naive oracle supports (n, q) in {sorted(ORACLE_SIZES)}")
    t0 = time.perf_counter()
    G = full_affine_group(field, n)
    target = field.order**n
    r = n * field.ell
    groups = set()
    tried = 0
    for size in range(1, r + 1):
        for gens in itertools.combinations(G, size):
            tried += 1
            try:
                H = closure(gens, limit=target)
            except ValueError:
                continue
            if len(H) == target and len({g.first_row for g in H}) == target:
                groups.add(H)
    return SearchResult("oracle", field, n, [], tried, time.perf_counter() - t0,
                        explicit=sorted(groups, key=_group_key))


def _group_key(g: frozenset[AffineElem]) -> tuple:
    return tuple(sorted(e.mat.a.tobytes() for e in g))


def in_unitriangular(group: Iterable[AffineElem]) -> bool:
    """Every element is upper unitriangular."""
    for g in group:
        a = g.mat.a
        if np.any(np.tril(a, -1) != 0) or np.any(np.diag(a) != 1):
            return False
    return True


def canonical(groups: Iterable[frozenset[AffineElem]]) -> list[tuple]:
    return sorted(_group_key(g) for g in groups)


# -- existence table ---------------------------------------------------------------


@dataclass
class Cell:
    n: int
    field: Any
    verdict: str
    provenance: str
    detail: str = ""

    @property
    def q_label(self) -> str:
        return "Q" if not self.field.is_finite else str(self.field.order)

    def row(self) -> str:
        return "\t".join(["ROW", str(self.n), self.q_label, self.verdict, self.provenance, self.detail])


def existence_cell(n: int, field: Any, max_points: int = DEFAULT_MAX_POINTS,
                   budget_nodes: int | None = None, seed: int = 0) -> Cell:
    """Verdict for one (n, F): construction where it applies, else search within budget."""
    from .verify import full_suite

    if admissibility(field, n) is None:
        desc = build_rw(field, n)
        report = full_suite(desc, seed=seed)
        if not report.ok:
            return Cell(n, field, "ERROR", "construction failed verification", report.render())
        detail = f"{desc.kind}, |R meet Tr| = {len(report.translations)}, {report.closure_verified}"
        if field.is_finite and field.order**n <= max_points and n <= 3:
            res = search_regular(n, field, "find_translation_free", budget_nodes=budget_nodes)
            if res.complete and res.maps:
                return Cell(n, field, "EXISTS(constructed+witness)", "construction and search",
                            detail + f"; search: {len(res.maps)} witness(es), {res.nodes} nodes")
        return Cell(n, field, "EXISTS(constructed)", "construction", detail)
    if not field.is_finite:
        return Cell(n, field, "NONE(theory, unverified)", "known result for unipotent R, not machine-checked")
    if field.order**n > max_points:
        return Cell(n, field, "NONE(theory, unverified)", "known result, beyond search budget",
                    f"q^n = {field.order ** n} > {max_points}")
    res = search_regular(n, field, "find_translation_free", budget_nodes=budget_nodes)
    if not res.complete:
        return Cell(n, field, "NONE(theory, unverified)", "known result, search budget exhausted",
                    f"{res.nodes} nodes")
    if res.maps:
        return Cell(n, field, "EXISTS(witness)", "exhaustive search", f"{len(res.maps)} witness(es)")
    return Cell(n, field, "NONE(exhaustive)", "exhaustive search",
                f"{res.nodes} nodes")


def existence_table(n_range: Iterable[int], fields: Iterable[Any], max_points: int = DEFAULT_MAX_POINTS,
                    budget_nodes: int | None = None, seed: int = 0) -> list[Cell]:
    return [existence_cell(n, f, max_points, budget_nodes, seed) for f in fields for n in n_range]


def parse_field_list(text: str) -> list[Any]:
    """Comma-separated prime powers and/or ``Q``."""
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        out.append(QQ if tok.upper() == "Q" else field_of_order(int(tok)))
    return out
