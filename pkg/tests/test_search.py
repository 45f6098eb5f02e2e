from __future__ import annotations

import itertools

import pytest

from regaff.field import make_field
from regaff.search import (MODES, SearchSpace, canonical, existence_cell, in_unitriangular,
                           naive_oracle, read_checkpoint, search_regular)
from regaff.verify import check_regular

F2 = make_field(2)
F3 = make_field(3)


def _lattice_oracle(n: int, p: int) -> set[frozenset]:
    """Regular subgroups of U_{n+1}(p) by growing subgroups one generator at a time.

    Matrices are tuples of tuples with arithmetic mod p, independent of the package.
    """
    s = n + 1
    upper = [(i, j) for i in range(s) for j in range(i + 1, s)]

    def mat(entries):
        a = [[int(i == j) for j in range(s)] for i in range(s)]
        for (i, j), x in zip(upper, entries):
            a[i][j] = x
        return tuple(map(tuple, a))

    def mul(a, b):
        return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(s)) % p for j in range(s)) for i in range(s))

    U = [mat(e) for e in itertools.product(range(p), repeat=len(upper))]
    eye = mat([0] * len(upper))
    target = p**n

    def grow(H, g):
        seen = set(H) | {g}
        frontier = list(seen)
        while frontier:
            nxt = []
            for x in frontier:
                for y in list(seen):
                    for z in (mul(x, y), mul(y, x)):
                        if z not in seen:
                            seen.add(z)
                            nxt.append(z)
                if len(seen) > target:
                    return None
            frontier = nxt
        return frozenset(seen)

    level = {frozenset([eye])}
    done = set()
    while level:
        nxt = set()
        for H in level:
            for g in U:
                if g in H:
                    continue
                K = grow(H, g)
                if K is None or K in done or K in nxt:
                    continue
                nxt.add(K)
        done |= nxt
        level = {K for K in nxt if len(K) < target}
    return {K for K in done if len(K) == target and len({k[0] for k in K}) == target}


def _as_tuples(groups):
    return {frozenset(tuple(map(tuple, g.mat.a.tolist())) for g in G) for G in groups}


@pytest.mark.parametrize("n,p", [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2)])
def test_enumerate_all_matches_lattice_oracle(n, p):
    res = search_regular(n, make_field(p), "enumerate_all")
    assert _as_tuples(res.groups()) == _lattice_oracle(n, p)


def test_frozen_counts():
    # counts frozen from the independent lattice oracle above
    expect = {(2, 2): (2, 0), (2, 3): (3, 0), (3, 2): (28, 4)}
    for (n, p), (total, tf) in expect.items():
        r = search_regular(n, make_field(p), "enumerate_all")
        assert (r.total, r.translation_free) == (total, tf)


def test_naive_oracle_small():
    for p in (2, 3):
        r = naive_oracle(1, make_field(p))
        assert r.total == 1 and r.translation_free == 0
    full = naive_oracle(2, F2)
    assert full.total == 4
    tri = [g for g in full.groups() if in_unitriangular(g)]
    assert canonical(tri) == canonical(search_regular(2, F2).groups())
    with pytest.raises(ValueError):
        naive_oracle(3, F2)


def test_emitted_groups_are_regular_and_match_their_maps():
    res = search_regular(3, F2, "enumerate_all")
    space = SearchSpace(F2, 3)
    for amap in res.maps:
        G = space.group(amap)
        assert check_regular(G, F2, 3).ok
        for g in G:
            v = space.point_index[g.vector]
            assert g.linear.a.tolist() == space.matrix(amap[v]).tolist()


def test_translation_free_witnesses():
    res = search_regular(3, F2, "find_translation_free")
    assert res.total == 4 and res.translation_free == 4
    for G in res.witnesses():
        assert check_regular(G, F2, 3).ok
        assert sum(g.linear.is_identity() for g in G) == 1


@pytest.mark.parametrize("n,q", [(1, 2), (1, 3), (1, 4), (1, 5), (2, 2), (2, 3), (2, 4), (2, 5), (3, 3)])
def test_no_translation_free_groups(n, q):
    f = make_field(*{2: (2, 1), 3: (3, 1), 4: (2, 2), 5: (5, 1)}[q])
    res = search_regular(n, f, "find_translation_free")
    assert res.complete and res.total == 0


def test_determinism():
    a = search_regular(3, F3, "find_translation_free")
    b = search_regular(3, F3, "find_translation_free")
    assert (a.nodes, a.maps) == (b.nodes, b.maps)


def test_checkpoint_resume(tmp_path):
    full = search_regular(3, F2, "enumerate_all")
    ck = tmp_path / "ck.txt"
    part = search_regular(3, F2, "enumerate_all", budget_nodes=50, checkpoint=ck)
    assert not part.complete and ck.exists()
    data = read_checkpoint(ck)
    assert data["nodes"] == 50 and data["field"] == F2
    rest = search_regular(3, F2, "enumerate_all", resume=ck)
    assert rest.complete
    assert rest.maps == full.maps and rest.nodes == full.nodes


def test_resume_rejects_other_search(tmp_path):
    ck = tmp_path / "ck.txt"
    search_regular(3, F2, "enumerate_all", budget_nodes=10, checkpoint=ck)
    with pytest.raises(ValueError):
        search_regular(3, F2, "find_translation_free", resume=ck)


def test_threads_give_same_groups():
    a = search_regular(3, F2, "enumerate_all")
    b = search_regular(3, F2, "enumerate_all", threads=2)
    assert a.maps == b.maps


def test_dense_and_memo_paths_agree(monkeypatch):
    import regaff.search as S

    dense = search_regular(2, make_field(2, 2), "enumerate_all")
    monkeypatch.setattr(S, "DENSE_LIMIT", 0)
    memo = search_regular(2, make_field(2, 2), "enumerate_all")
    assert dense.maps == memo.maps and dense.nodes == memo.nodes


def test_bad_mode():
    with pytest.raises(ValueError):
        search_regular(2, F2, "everything")
    assert set(MODES) == {"enumerate_all", "find_translation_free"}


def test_existence_cells():
    assert existence_cell(3, F2).verdict == "EXISTS(constructed+witness)"
    assert existence_cell(4, F3).verdict == "EXISTS(constructed)"
    assert existence_cell(4, F2).verdict == "NONE(exhaustive)"
    assert existence_cell(4, F2, max_points=8).verdict == "NONE(theory, unverified)"
    assert existence_cell(3, F3).verdict == "NONE(exhaustive)"
    assert existence_cell(5, F2).verdict == "EXISTS(constructed)"
