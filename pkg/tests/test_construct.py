from __future__ import annotations

import itertools

import numpy as np
import pytest

from regaff.affine import closure, identity, is_translation
from regaff.construct import admissibility, build_rw, embed_W, hegedus_agl32
from regaff.errors import DimensionError, InadmissibleError
from regaff.field import QQ, make_field
from regaff.quadform import SubspaceBasis

F2 = make_field(2)
F3 = make_field(3)


def test_identity_elements():
    d = build_rw(F3, 4)
    assert d.n_element([0, 0, 0]) == identity(F3, 4)
    assert d.m_element([0]) == identity(F3, 4)
    assert d.r_element([0, 0, 0], [0]) == identity(F3, 4)
    with pytest.raises(DimensionError):
        d.n_element([0, 0])


def test_n_element_top_row():
    d = build_rw(F3, 4)
    g = d.n_element([0, 1, 0])
    assert list(g.mat.a[0]) == [1, 0, 1, 0, 2]


def test_n_and_m_closure_exhaustive_f3():
    d = build_rw(F3, 4)
    vecs = list(itertools.product(range(3), repeat=3))
    for u in vecs:
        for v in vecs:
            s = [F3.add(a, b) for a, b in zip(u, v)]
            assert d.n_element(u) @ d.n_element(v) == d.n_element(s)
    for a in range(3):
        for b in range(3):
            assert d.m_element([a]) @ d.m_element([b]) == d.m_element([(a + b) % 3])


def test_conjugation_law():
    d = build_rw(F3, 4)
    for v in itertools.product(range(3), repeat=3):
        for a in range(3):
            vphi = (np.array([v]) @ d.phi([a]).a % 3)[0]
            lhs = d.m_element([a]).inverse() @ d.n_element(v) @ d.m_element([a])
            assert lhs == d.n_element(list(vphi))


def test_r_element_is_product_and_first_row():
    d = build_rw(make_field(2, 2), 6)
    rng = np.random.default_rng(0)
    for _ in range(20):
        v = list(rng.integers(0, 4, 4))
        a = list(rng.integers(0, 4, 2))
        r = d.r_element(v, a)
        assert r.first_row == tuple([1] + v + a)
        assert d.r_element([0] * 4, a) == d.m_element(a)


def test_r_translation_criterion():
    f = make_field(2, 3)
    W = SubspaceBasis(f, 1, [[1], [2]])
    d = build_rw(f, 5, W=W)
    for x in d.elements():
        if is_translation(x):
            assert x.vector[:4] == (0, 0, 0, 0)
    T = [x for x in d.elements() if is_translation(x)]
    assert len(T) == 4


def test_small_positive_cases():
    d = build_rw(F2, 3)
    assert d.kind == "example2_n3q2" and d.order == 8
    d = build_rw(F3, 4)
    assert d.kind == "example1" and d.order == 81


def test_auto_family_rule():
    assert build_rw(make_field(2, 2), 6).kind == "example3"
    assert (build_rw(make_field(2, 2), 6).m, build_rw(make_field(2, 2), 6).k) == (4, 2)
    assert build_rw(F2, 5).kind == "example2_odd"
    assert build_rw(make_field(5), 6).kind == "example1"


def test_inadmissible():
    for f, n in [(F3, 2), (F2, 1), (F3, 3), (make_field(2, 2), 3), (F2, 4), (make_field(2, 2), 4), (QQ, 3)]:
        assert admissibility(f, n) is not None
        with pytest.raises(InadmissibleError):
            build_rw(f, n)
    reasons = {admissibility(F3, 2), admissibility(F3, 3), admissibility(F2, 4)}
    assert len(reasons) == 3


def test_explicit_family_selection():
    f = make_field(2, 2)
    with pytest.raises(ValueError):
        build_rw(f, 6, example="example2_odd")
    assert build_rw(f, 7, example="2").kind == "example2_odd"
    assert build_rw(make_field(3), 5, example="1").kind == "example1"


def test_embed_w():
    f = make_field(2, 2)
    assert embed_W(f, 2, None).dim == 0
    W = embed_W(f, 2, [1])
    assert W.vectors == ((1, 0),)


def test_hegedus_generators():
    g1, g2 = hegedus_agl32()
    H = closure([g1, g2])
    assert len(H) == 8
    assert sum(is_translation(x) for x in H) == 1


def test_d_must_be_nonzero():
    with pytest.raises(ValueError):
        build_rw(F3, 4, d=[0])
