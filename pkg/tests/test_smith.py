import random

import pytest
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from iwtower.smith import (AbelianGroup, IntMatrix, det, kernel_basis, lattice_quotient, matmul,
                           p_exponent, p_part, smith_form, smith_normal_form, solve_in_lattice)


def test_examples():
    assert smith_normal_form([[2, 0], [0, 3]])[0].invariant_factors == (6,)
    assert smith_normal_form([[1, 0, 0], [0, 1, 0], [0, 0, 1]])[0].invariant_factors == ()
    assert smith_normal_form([[0]])[0].invariant_factors == (0,)


def test_cokernel_shape():
    # Z^2 -> Z^3 with one free summand left over
    g, _ = smith_normal_form([[2, 0], [0, 4], [0, 0]])
    assert g.invariant_factors == (2, 4, 0)
    assert str(g) == "Z/2 + Z/4 + Z"


def test_int_matrix_roundtrip():
    M = IntMatrix.from_rows([[1, 2], [3, 4]])
    assert M.to_rows() == [[1, 2], [3, 4]] and M[1, 0] == 3


def test_p_part():
    assert p_part(AbelianGroup((6,)), 3).invariant_factors == (3,)
    assert p_part(AbelianGroup((4, 12)), 2).invariant_factors == (4, 4)
    assert p_part(AbelianGroup((0,)), 2).invariant_factors == (0,)
    assert p_exponent(AbelianGroup((4, 12)), 2) == 4
    assert p_exponent(AbelianGroup((0,)), 2) is None


def test_from_orders_normalizes():
    assert AbelianGroup.from_orders([2, 3, 0, 1]).invariant_factors == (6, 0)
    assert str(AbelianGroup(())) == "0"
    with pytest.raises(ValueError):
        AbelianGroup((4, 2))


def test_against_sympy_snf():
    rng = random.Random(7)
    for _ in range(60):
        m, n = rng.randint(1, 5), rng.randint(1, 5)
        A = [[rng.randint(-6, 6) for _ in range(n)] for _ in range(m)]
        diag, U, V = smith_form(A, m, n, transforms=True)
        D = matmul(matmul(U, A), V)
        assert all(D[i][j] == (diag[i] if i == j else 0) for i in range(m) for j in range(n))
        ref = sympy_snf(Matrix(A), domain=ZZ)
        ref_diag = sorted(abs(ref[i, i]) for i in range(min(m, n)))
        assert sorted(abs(x) for x in diag) == ref_diag


def test_determinant_preserved():
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(1, 5)
        A = [[rng.randint(-5, 5) for _ in range(n)] for _ in range(n)]
        g, diag = smith_normal_form(A)
        d = det(A)
        prod = 1
        for x in diag:
            prod *= x
        assert abs(d) == abs(prod)
        if d:
            assert g.order() == abs(d)


def test_kernel_and_lattice_helpers():
    A = [[1, 1, 0], [0, 2, 2]]
    ker = kernel_basis(A, 3)
    assert len(ker) == 1 and all(sum(a * b for a, b in zip(row, ker[0])) == 0 for row in A)
    basis = [[2, 0], [0, 3]]
    assert solve_in_lattice(basis, [4, 9]) == [2, 3]
    assert solve_in_lattice(basis, [1, 0]) is None
    assert lattice_quotient([[1, 0], [0, 1]], [[2, 0], [0, 3]]).invariant_factors == (6,)
