import pytest

from core.engine import ring
from core.errors import ValidationError
from core.exactlinalg import RATIONALS, CoefficientRing
from core.koszul_oracle import (
    KoszulDGA,
    KoszulMonomial,
    compare,
    guarded_compare,
    koszul_ring,
    non_comparable_reason,
)
from core.pairs import disk_sphere
from core.simplicial import points, polygon, rp2, simplex, simplex_boundary, void


def test_simplex_gives_a_contractible_space():
    assert koszul_ring(simplex(2)).betti() == {0: 1}


def test_two_points():
    assert koszul_ring(points(2)).betti() == {0: 1, 3: 1}


def test_hexagon_betti():
    assert koszul_ring(polygon(6)).betti() == {0: 1, 3: 9, 4: 16, 5: 9, 8: 1}


def test_differential_squares_to_zero():
    KoszulDGA(rp2()).check_square_zero()
    KoszulDGA(simplex_boundary(4)).check_square_zero()


def test_monomial_products():
    dga = KoszulDGA(points(2))
    u1, u2 = KoszulMonomial((1,), ()), KoszulMonomial((2,), ())
    assert dga.product(u1, u2) == (1, KoszulMonomial((1, 2), ()))
    assert dga.product(u2, u1) == (-1, KoszulMonomial((1, 2), ()))
    assert dga.product(u1, u1) is None
    # x1·x2 needs the edge {1, 2}
    assert dga.product(KoszulMonomial((), (1,)), KoszulMonomial((), (2,))) is None


def test_void_complex_has_no_oracle_ring():
    with pytest.raises(ValidationError):
        koszul_ring(void(3))


def test_oracle_ring_has_a_unit():
    R = koszul_ring(polygon(5))
    u = {R.unit: 1}
    for i in range(len(R.basis)):
        assert R.multiply(u, {i: 1}) == {i: 1}


@pytest.mark.parametrize("K", [polygon(5), polygon(6), rp2(), simplex_boundary(4)], ids=["5gon", "6gon", "rp2", "tetra"])
def test_engine_matches_oracle(K):
    result = compare(ring(K, [disk_sphere(2)]), koszul_ring(K))
    assert result.equal, result.differences


def test_engine_matches_oracle_over_f2():
    F2 = CoefficientRing("Fp", 2)
    result = compare(ring(rp2(), [disk_sphere(2).with_ring(F2)]), koszul_ring(rp2(), F2))
    assert result.equal, result.differences


def test_other_pairs_are_not_comparable():
    assert non_comparable_reason([disk_sphere(2).with_ring(RATIONALS)]) is None
    assert "disk_sphere:3" in non_comparable_reason([disk_sphere(3)])
    K = points(2)
    result = guarded_compare(ring(K, [disk_sphere(3)]), koszul_ring(K), [disk_sphere(3)])
    assert not result.comparable and not result.equal
    assert result.to_json()["comparable"] is False
