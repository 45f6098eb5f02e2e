from __future__ import annotations

import pytest

from regaff.affine import closure, translation
from regaff.construct import build_rw, hegedus_agl32
from regaff.field import QQ, make_field
from regaff.quadform import SubspaceBasis
from regaff.verify import (check_closed, check_regular, full_suite, semidirect_identities,
                           translation_subgroup, translations_match_W, verify_elements)

F2 = make_field(2)
F3 = make_field(3)


def _tr(f, n):
    import itertools
    return {translation(f, v) for v in itertools.product(range(f.order), repeat=n)}


def test_check_regular_examples():
    T = _tr(F2, 2)
    assert check_regular(T, F2, 2).ok
    assert check_regular(closure(hegedus_agl32()), F2, 3).ok
    broken = sorted(T, key=lambda g: g.vector)[:-1]
    c = check_regular(broken, F2, 2)
    assert not c.ok


def test_check_closed_witness_pair():
    T = _tr(F3, 1)
    S = {g for g in T if g.vector != (2,)}
    c = check_closed(S)
    assert not c.ok and len(c.witness) == 2
    g, h = c.witness
    assert g @ h not in S or h @ g not in S


def test_translation_subgroups():
    assert len(translation_subgroup(build_rw(F3, 4))) == 1
    f4 = make_field(2, 2)
    d = build_rw(f4, 5, W=SubspaceBasis(f4, 1, [[1]]))
    assert len(translation_subgroup(d)) == 2
    T = _tr(F3, 2)
    assert translation_subgroup(T) == T


def test_translations_match_w():
    assert translations_match_W(build_rw(F3, 4)).ok
    f8 = make_field(2, 3)
    d = build_rw(f8, 5, W=SubspaceBasis(f8, 1, [[1], [2], [4]]))
    assert translations_match_W(d).ok and len(translation_subgroup(d)) == 8
    f9 = make_field(3, 2)
    d = build_rw(f9, 4, W=SubspaceBasis(f9, 1, [[1]]))
    T = translation_subgroup(d)
    assert len(T) == 3 and all((g @ g @ g).linear.is_identity() and (g @ g @ g).vector == (0,) * 4 for g in T)


@pytest.mark.parametrize("f,n,order", [(F2, 3, 8), (make_field(5), 4, 625), (make_field(2, 2), 6, 4096)])
def test_full_suite_passes(f, n, order):
    rep = full_suite(build_rw(f, n))
    assert rep.ok and rep.order == order and rep.regular and rep.unipotent
    assert len(rep.translations) == 1 and rep.closure_verified == "exhaustive"


def test_full_suite_rationals_sampled():
    rep = full_suite(build_rw(QQ, 4), seed=5)
    assert rep.ok and rep.order is None
    assert rep.closure_verified.startswith("sampled(seed=5")


def test_semidirect_identities_exhaustive():
    checks = semidirect_identities(build_rw(F3, 4))
    assert [c.name for c in checks] == ["N closure", "M closure", "normalization"]
    assert all(c.ok and c.mode == "exhaustive" for c in checks)


def test_verify_elements_detects_mismatch():
    d = build_rw(F3, 4)
    elems = list(d.elements())
    assert verify_elements(elems, F3, 4, desc=d).ok
    other = list(build_rw(F3, 4, d=[2]).elements())
    rep = verify_elements(other, F3, 4, desc=d)
    assert not rep.ok


def test_render_lists_checks():
    text = full_suite(build_rw(F2, 3)).render()
    assert "regular: yes" in text and text.endswith("verdict: PASS")
