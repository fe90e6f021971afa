import random

import pytest
from sympy.polys.domains import GF, QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors

from core.errors import ValidationError
from core.exactlinalg import (
    INTEGERS,
    RATIONALS,
    CoefficientRing,
    as_matrix,
    as_rows,
    homology,
    identity,
    matmul,
    rank,
    smith_normal_form,
)
from core.simplicial import augmented_cochain_complex, empty, k_sigma_omega, polygon, rp2


def _zz(rows):
    return as_matrix([[ZZ(x) for x in r] for r in rows], (len(rows), len(rows[0])), ZZ)


def test_snf_small_examples():
    assert smith_normal_form(_zz([[2]])).invariants == (2,)
    assert smith_normal_form(_zz([[2, 4], [6, 8]])).invariants == (2, 4)
    assert smith_normal_form(_zz([[2, 0], [0, 3]])).invariants == (1, 6)


def test_snf_zero_matrix_keeps_identity_transforms():
    snf = smith_normal_form(_zz([[0, 0, 0], [0, 0, 0]]))
    assert snf.invariants == ()
    assert as_rows(snf.U) == [[1, 0], [0, 1]]
    assert as_rows(snf.V) == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_snf_over_a_field_is_identity_block():
    A = as_matrix([[QQ(2), QQ(4)], [QQ(6), QQ(8)]], (2, 2), QQ)
    assert smith_normal_form(A).invariants == (QQ(1), QQ(1))


def test_snf_random_matrices_match_sympy():
    rng = random.Random(20240)
    for _ in range(200):
        rows, cols = rng.randint(1, 5), rng.randint(1, 5)
        data = [[rng.choice([0, 0, rng.randint(-6, 6)]) for _ in range(cols)] for _ in range(rows)]
        A = _zz(data)
        snf = smith_normal_form(A)
        assert as_rows(matmul(matmul(snf.U, A), snf.V)) == as_rows(snf.S)
        expected = tuple(int(x) for x in invariant_factors(DomainMatrix(A.to_dense().to_list(), A.shape, ZZ)) if x)
        assert tuple(int(x) for x in snf.invariants) == expected
        assert rank(A) == len(snf.invariants)


def test_coefficient_ring_rejects_composite_characteristic():
    with pytest.raises(ValidationError):
        CoefficientRing("Fp", 4)


def test_rational_values_survive_python_conversion():
    half = QQ(1, 2)
    assert RATIONALS.to_python(half) == "1/2"
    assert RATIONALS.from_python("1/2") == half
    assert INTEGERS.from_python(-3) == ZZ(-3)


def test_empty_complex_has_one_class_in_degree_zero():
    summary = homology(augmented_cochain_complex(empty(2)).complex)
    assert summary.betti() == {0: 1}


def test_polygon_degree_two_is_free_of_rank_one():
    summary = homology(augmented_cochain_complex(polygon(6)).complex)
    assert summary.betti() == {2: 1}
    assert summary.torsion() == {}


def test_rp2_has_two_torsion_in_degree_three():
    cochains = augmented_cochain_complex(rp2())
    assert homology(cochains.complex).torsion() == {3: (2,)}
    assert homology(cochains.complex).betti() == {}


def test_rp2_universal_coefficients_over_f2():
    cochains = augmented_cochain_complex(rp2(), ring=CoefficientRing("Fp", 2))
    assert homology(cochains.complex).betti() == {2: 1, 3: 1}


def test_coordinates_of_a_coboundary_vanish():
    L = k_sigma_omega(polygon(6), (), (1, 3, 5))
    cochains = augmented_cochain_complex(L, (1, 3, 5))
    summary = homology(cochains.complex)
    z = cochains.coboundary_of(0, [ZZ(1)])
    assert all(c == 0 for c in summary.degrees[1].coordinates(z))


def test_coordinates_of_representatives_are_unit_vectors():
    L = k_sigma_omega(polygon(6), (), (1, 3, 5))
    cochains = augmented_cochain_complex(L, (1, 3, 5))
    s = homology(cochains.complex).degrees[1]
    assert s.size == 2
    for i, rep in enumerate(s.reps):
        assert s.coordinates(rep) == [1 if j == i else 0 for j in range(s.size)]


def test_coordinates_reject_non_cycles():
    L = k_sigma_omega(polygon(6), (), (1, 2))
    cochains = augmented_cochain_complex(L, (1, 2))
    s = homology(cochains.complex).degrees[1]
    with pytest.raises(ValidationError):
        s.coordinates([ZZ(1), ZZ(0)])


@pytest.mark.parametrize("K", [QQ, GF(3)])
def test_field_diagonalization_tracks_inverse_transforms(K):
    rng = random.Random(811)
    for _ in range(60):
        rows, cols = rng.randint(1, 5), rng.randint(1, 5)
        data = [[K.convert(rng.choice([0, rng.randint(-4, 4)])) for _ in range(cols)] for _ in range(rows)]
        A = as_matrix(data, (rows, cols), K)
        snf = smith_normal_form(A)
        r = rank(A)
        assert snf.invariants == (K.one,) * r
        assert as_rows(matmul(snf.U, snf.U_inv)) == as_rows(identity(rows, K))
        assert as_rows(matmul(snf.V, snf.V_inv)) == as_rows(identity(cols, K))
        expected = [[K.one if i == j and i < r else K.zero for j in range(cols)] for i in range(rows)]
        assert as_rows(snf.S) == expected


def test_integer_transforms_are_unimodular():
    A = _zz([[2, 4], [6, 8]])
    snf = smith_normal_form(A)
    assert as_rows(snf.S) == [[2, 0], [0, 4]]
    assert as_rows(matmul(snf.U, snf.U_inv)) == [[1, 0], [0, 1]]
    assert as_rows(matmul(snf.V_inv, snf.V)) == [[1, 0], [0, 1]]
