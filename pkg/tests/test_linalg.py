from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
import sympy

from regaff.errors import DimensionError, FormatError, SingularMatrixError
from regaff.field import QQ, make_field
from regaff.linalg import (Mat, block, col_vector, decode_matrix, diag, elementary, encode_matrix,
                           jordan_block, mat_ops, outer, row_vector)

F2 = make_field(2)
F3 = make_field(3)
F5 = make_field(5)


def test_inverse_examples():
    for f in (F2, F3, QQ):
        assert mat_ops("inv", Mat.identity(f, 3)) == Mat.identity(f, 3)
    A = Mat.from_rows(F3, [[1, 0, 0], [2, 1, 0], [1, 1, 1]])
    assert mat_ops("mul", mat_ops("inv", A), A).is_identity()


def test_square_of_shear_in_char_2():
    assert mat_ops("pow", Mat.from_rows(F2, [[1, 1], [0, 1]]), 2).is_identity()


def test_elementary_products():
    assert elementary(F3, 2, 1, 2) == Mat.from_rows(F3, [[0, 1], [0, 0]])
    assert elementary(F3, 3, 3, 2) @ elementary(F3, 3, 2, 1) == elementary(F3, 3, 3, 1)
    assert (elementary(F3, 3, 2, 1) @ elementary(F3, 3, 3, 2)).is_zero()
    with pytest.raises(IndexError):
        elementary(F3, 2, 3, 1)


def test_jordan_block():
    assert jordan_block(F2, 1) == Mat.identity(F2, 1)
    assert jordan_block(F3, 2) == Mat.from_rows(F3, [[1, 1], [0, 1]])
    N = jordan_block(F5, 3) - Mat.identity(F5, 3)
    assert (N**3).is_zero() and not (N**2).is_zero()


def test_outer():
    assert outer(col_vector(F3, [0, 0]), row_vector(F3, [1, 2])).is_zero()
    assert outer(col_vector(F3, [0, 0, 1]), row_vector(F3, [1])) == col_vector(F3, [0, 0, 1])
    assert outer(col_vector(F3, [1, 2]), row_vector(F3, [1, 2])) == Mat.from_rows(F3, [[1, 2], [2, 1]])
    with pytest.raises(DimensionError):
        outer(row_vector(F3, [1, 2]), row_vector(F3, [1, 2]))


def test_dimension_and_singularity_errors():
    with pytest.raises(DimensionError):
        Mat.identity(F3, 2) @ Mat.identity(F3, 3)
    with pytest.raises(SingularMatrixError):
        Mat.from_rows(F3, [[1, 2], [2, 1]]).inv()


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_det_inv_rank_match_sympy(p):
    f = make_field(p)
    rng = np.random.default_rng(p)
    for _ in range(40):
        n = int(rng.integers(1, 5))
        a = rng.integers(0, p, (n, n))
        M = Mat(f, a)
        S = sympy.Matrix(a.tolist())
        assert M.det() == int(S.det()) % p
        if int(S.det()) % p:
            assert M.inv().a.tolist() == (S.inv_mod(p) % p).tolist()


def test_rank_over_fp_against_sympy_gf():
    from sympy.polys.matrices import DomainMatrix
    from sympy import GF
    rng = np.random.default_rng(7)
    for p in (2, 3, 5):
        for _ in range(30):
            a = rng.integers(0, p, (3, 4))
            dm = DomainMatrix([[GF(p)(int(x)) for x in row] for row in a], (3, 4), GF(p))
            assert Mat(make_field(p), a).rank() == dm.rank()


def test_rational_inverse_matches_sympy():
    rows = [[Fraction(1, 2), 3, 0], [1, Fraction(-1, 3), 2], [0, 4, 5]]
    M = Mat.from_rows(QQ, rows)
    S = sympy.Matrix([[sympy.Rational(str(x)) for x in r] for r in rows])
    assert M.det() == Fraction(str(S.det()))
    inv = S.inv()
    assert M.inv().tolist() == [[Fraction(str(inv[i, j])) for j in range(3)] for i in range(3)]


def test_gf4_inverse():
    f = make_field(2, 2)
    M = Mat.from_rows(f, [[1, 2], [2, 1]])
    assert (M @ M.inv()).is_identity()


def test_block_and_diag():
    I2 = Mat.identity(F3, 2)
    Z = Mat.zeros(F3, 2)
    assert block([[I2, Z], [Z, I2]]) == diag(I2, I2) == Mat.identity(F3, 4)


def test_negative_power():
    A = Mat.from_rows(F5, [[1, 2], [3, 4]])
    assert (A**-1) @ A == Mat.identity(F5, 2)
    assert A**0 == Mat.identity(F5, 2)


def test_matrix_text_round_trip():
    f = make_field(3, 2)
    M = Mat.from_rows(f, [[0, 4], [8, 1]])
    assert decode_matrix(f, encode_matrix(M)) == M
    Mq = Mat.from_rows(QQ, [[Fraction(1, 2), -3]])
    assert decode_matrix(QQ, encode_matrix(Mq)) == Mq
    with pytest.raises(FormatError):
        decode_matrix(F3, "1,2;1")


def test_read_only_storage():
    M = Mat.identity(F3, 2)
    with pytest.raises(ValueError):
        M.a[0, 0] = 2
