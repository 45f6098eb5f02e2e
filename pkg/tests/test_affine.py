from __future__ import annotations

import numpy as np
import pytest

from regaff.affine import (AffineElem, closure, conjugate, direct_product, identity, is_translation,
                           is_unipotent, make_affine, permutation_affine, project_pi, translation)
from regaff.construct import hegedus_agl32
from regaff.errors import FieldMismatchError, SingularMatrixError
from regaff.field import make_field
from regaff.linalg import Mat, elementary

F2 = make_field(2)
F3 = make_field(3)


def _unit(field, size, *positions):
    M = Mat.identity(field, size)
    for i, j in positions:
        M = M + elementary(field, size, i, j)
    return M


def test_make_affine_identity_and_generator():
    assert make_affine([0, 0], Mat.identity(F3, 2)) == identity(F3, 2)
    g = make_affine([1, 0, 0], _unit(F2, 3, (1, 2), (2, 3)))
    assert g.mat == _unit(F2, 4, (1, 2), (2, 3), (3, 4))
    assert g == hegedus_agl32()[0]


def test_make_affine_rejects_singular():
    with pytest.raises(SingularMatrixError):
        make_affine([1, 0], Mat.from_rows(F3, [[1, 1], [1, 1]]))


def test_projection():
    A = Mat.from_rows(F3, [[2, 1], [0, 1]])
    assert project_pi(identity(F3, 2)).is_identity()
    assert project_pi(translation(F3, [1, 2])).is_identity()
    assert project_pi(make_affine([1, 1], A)) == A


def test_is_translation_examples():
    assert is_translation(identity(F2, 3))
    assert not is_translation(hegedus_agl32()[0])
    assert is_translation(AffineElem(_unit(F2, 5, (1, 3))))


def test_is_unipotent_examples():
    assert is_unipotent(identity(F3, 2))
    assert is_unipotent(translation(F3, [2, 1]))
    assert not is_unipotent(make_affine([0], Mat.from_rows(F3, [[2]])))


def test_conjugation():
    g = make_affine([1, 2], Mat.from_rows(F3, [[1, 1], [0, 1]]))
    h = make_affine([2, 0], Mat.from_rows(F3, [[2, 0], [1, 1]]))
    assert conjugate(g, identity(F3, 2)) == g
    assert is_translation(conjugate(translation(F3, [1, 1]), h))
    assert conjugate(g, h) == h.inverse() @ g @ h


def test_product_rule_on_first_row():
    u, w = [1, 2], [2, 2]
    A = Mat.from_rows(F3, [[1, 1], [0, 2]])
    B = Mat.from_rows(F3, [[2, 1], [1, 1]])
    g = make_affine(u, A) @ make_affine(w, B)
    uB = Mat.from_rows(F3, [u]) @ B
    assert list(g.vector) == [F3.add(a, b) for a, b in zip(w, uB.a[0])]
    assert g.linear == A @ B


def test_direct_product():
    one = identity(F2, 1)
    assert direct_product({one}, {one}) == {identity(F2, 2)}
    with pytest.raises(FieldMismatchError):
        direct_product({one}, {identity(F3, 1)})


def test_hegedus_closure_order():
    H = closure(hegedus_agl32())
    assert len(H) == 8
    assert [g for g in H if is_translation(g)] == [identity(F2, 3)]


def test_closure_limit():
    with pytest.raises(ValueError):
        closure([make_affine([0], Mat.from_rows(make_field(7), [[3]]))], limit=3)


def test_permutation_affine():
    P = permutation_affine(F2, [2, 1, 3])
    assert (P @ P) == identity(F2, 3)
    with pytest.raises(ValueError):
        permutation_affine(F2, [1, 1, 2])


def test_invalid_first_column():
    with pytest.raises(ValueError):
        AffineElem(Mat(F3, np.array([[1, 0], [1, 1]])))
