import random

import pytest

from core.errors import ValidationError
from core.exactlinalg import CoefficientRing
from core.pairs import example_2_9
from core.trials import all_complexes, oracle_check, random_complex, separate


def test_random_complexes_are_seeded_and_never_void():
    first = [random_complex(5, random.Random(42)) for _ in range(3)]
    second = [random_complex(5, random.Random(42)) for _ in range(3)]
    assert first == second
    rng = random.Random(0)
    assert not any(random_complex(rng.randint(1, 6), rng).is_void for _ in range(50))
    with pytest.raises(ValidationError):
        random_complex(0, rng)


@pytest.mark.parametrize("m, count", [(1, 2), (2, 5), (3, 19), (4, 167)])
def test_all_complexes_counts(m, count):
    complexes = list(all_complexes(m))
    assert len(complexes) == count
    assert len({K.facets for K in complexes}) == count


def test_all_complexes_is_limited():
    with pytest.raises(ValidationError):
        next(all_complexes(5))


@pytest.mark.parametrize("ring", [CoefficientRing("Z"), CoefficientRing("Fp", 2)], ids=["Z", "F2"])
def test_oracle_check_passes(ring):
    report = oracle_check(m=6, trials=25, seed=11, ring_=ring)
    assert report.all_equal, [r.details for r in report.mismatches]
    assert len(report.results) == 25
    assert report.to_json()["ring"] == ring.label


def test_oracle_check_is_reproducible():
    a = oracle_check(m=3, trials=4, seed=9).to_json()
    b = oracle_check(m=3, trials=4, seed=9).to_json()
    assert a == b


def test_separate_keeps_additive_groups_equal():
    report = separate(example_2_9(1), example_2_9(2), max_m=2)
    assert 1 <= report.candidates <= 7
    assert all(e["groups_equal"] for e in report.evidence)
    assert not report.separated
    data = report.to_json()
    assert data["separated"] == report.separated
    assert data["verdict"]
