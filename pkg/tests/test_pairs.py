import pytest

from core.errors import ParseError, ValidationError
from core.exactlinalg import RATIONALS
from core.pairs import (
    ALPHA,
    ETA,
    PairData,
    PairGenerator,
    builtin,
    classify,
    cone_pair,
    cp_truncated,
    disk_sphere,
    dual_product,
    example_2_9,
    homology_coproduct,
    pair_from_json,
    pair_to_json,
    sphere_pair,
    suspended_cone_pair,
    validate,
)

RIGHT_FLAGS = {"right_normal", "right_special", "right_strictly_normal", "right_weakly_special"}


def _flags(p):
    return set(classify(p).flags)


@pytest.mark.parametrize(
    "pair",
    [disk_sphere(1), disk_sphere(3), sphere_pair(4, 2), sphere_pair(3, 0), cone_pair([0, 2]),
     suspended_cone_pair([0, 1]), cp_truncated(3), example_2_9(1), example_2_9(2)],
    ids=lambda p: p.name,
)
def test_builtin_pairs_are_valid(pair):
    assert validate(pair) == []


def test_term_outside_character_sectors_is_reported():
    gens = dict(
        eta=(PairGenerator("1", 0, ETA), PairGenerator("e", 2, ETA)),
        gamma=(),
        alpha=(PairGenerator("c", 2, ALPHA),),
    )
    psi = {("1", "1", "1"): 1, ("e", "e", "1"): 1, ("e", "1", "e"): 1,
           ("c", "c", "1"): 1, ("c", "1", "c"): 1, ("e", "c", "1"): 1}
    problems = validate(PairData("bad", psi=psi, **gens))
    assert any("outside the allowed sectors" in p for p in problems)
    with pytest.raises(ValidationError):
        classify(PairData("bad", psi=psi, **gens))


def test_degree_breaking_term_is_reported():
    p = disk_sphere(2)
    psi = dict(p.psi)
    psi[("g", "g", "g")] = 1
    problems = validate(PairData("bad", p.eta, p.gamma, p.alpha, psi))
    assert any("does not preserve degree" in x for x in problems)


def test_unknown_generators_in_psi():
    p = disk_sphere(2)
    psi = {**p.psi, ("g", "zzz", "1"): 1}
    assert validate(PairData("bad", p.eta, p.gamma, p.alpha, psi)) == ["psi mentions unknown generators ['zzz']"]


def test_labels_are_checked():
    with pytest.raises(ValidationError):
        PairData("bad", (PairGenerator("1", 0, ETA), PairGenerator("1", 1, ETA)), (), (), {})
    with pytest.raises(ValidationError):
        PairData("bad", (PairGenerator("~x", 0, ETA),), (), (), {})


def test_disk_sphere_two_has_every_flag():
    assert _flags(disk_sphere(2)) == {"normal", "special", "mono"} | RIGHT_FLAGS


def test_point_classes_break_specialness():
    for p in (disk_sphere(1), cone_pair([0])):
        flags = _flags(p)
        assert {"normal", "right_normal", "right_strictly_normal"} <= flags
        assert not flags & {"special", "right_special", "right_weakly_special"}


def test_cone_pairs_on_positive_degrees_are_right_special():
    for p in (cone_pair([1, 3]), suspended_cone_pair([0, 2])):
        assert RIGHT_FLAGS <= _flags(p)


def test_example_pairs():
    assert _flags(example_2_9(1)) == {"normal", "special", "mono"} | RIGHT_FLAGS
    assert _flags(example_2_9(2)) == {"right_weakly_special", "mono"}


def test_truncated_projective_space_is_normal_epi():
    flags = _flags(cp_truncated(2))
    assert {"normal", "epi"} <= flags
    assert "special" not in flags and "mono" not in flags
    assert not flags & RIGHT_FLAGS


def test_sphere_pairs():
    assert {"normal", "special"} <= _flags(sphere_pair(4, 2))
    flags = _flags(sphere_pair(3, 0))
    assert "normal" in flags and "special" not in flags


def test_homology_coproduct_picks_up_the_correction():
    assert homology_coproduct(example_2_9(2))[("b", "a", "a")] == 1
    assert ("b", "a", "a") not in homology_coproduct(example_2_9(1))


def test_dual_products():
    assert dual_product(disk_sphere(2)).product("g", "g") == {}
    assert dual_product(disk_sphere(1)).product("g", "g") == {"g": 1}
    cp = dual_product(cp_truncated(3))
    assert cp.product("c1", "c2") == {"c3": 1}
    assert cp.product("c1", "c1") == {"c2": 1}
    assert cp.product("c2", "c2") == {}
    assert cp.product("1", "c2") == {"c2": 1}


def test_shifting_terms():
    assert dual_product(example_2_9(2)).shifting_terms() == [("a", "a", "b")]
    assert dual_product(example_2_9(1)).shifting_terms() == []


def test_json_round_trip():
    p = example_2_9(2).with_ring(RATIONALS)
    data = pair_to_json(p)
    assert data["ring"] == "Q"
    q = pair_from_json(data, name=p.name, ring=RATIONALS)
    assert (q.eta, q.gamma, q.alpha) == (p.eta, p.gamma, p.alpha)
    assert {k: v for k, v in q.psi.items() if v} == {k: v for k, v in p.psi.items() if v}


def test_json_errors():
    with pytest.raises(ParseError):
        pair_from_json([])
    with pytest.raises(ParseError):
        pair_from_json({"eta": [{"label": "1"}]})
    with pytest.raises(ValidationError):
        pair_from_json({"eta": [{"label": "1", "deg": 0}], "psi": []})


def test_builtin_lookup():
    assert builtin("sphere_pair", [3, 1]).name == "sphere_pair:3:1"
    assert builtin("cone_pair", [0, 1]).name == "cone_pair:0:1"
    with pytest.raises(ValidationError):
        builtin("nope")
    with pytest.raises(ValidationError):
        builtin("disk_sphere", [1, 2])
    with pytest.raises(ValidationError):
        disk_sphere(0)
    with pytest.raises(ValidationError):
        sphere_pair(2, 2)
    with pytest.raises(ValidationError):
        example_2_9(3)


TORUS_DIAGONAL = {("g3", "g1", "g2"): 1, ("g3", "g2", "g1"): -1}


def test_cone_on_a_torus_carries_its_diagonal():
    p = cone_pair([1, 1, 2], TORUS_DIAGONAL)
    assert validate(p) == []
    assert p.psi[("~g3", "~g1", "g2")] == 1
    assert p.psi[("~g3", "~g2", "g1")] == -1
    flags = _flags(p)
    assert {"normal", "right_normal", "right_strictly_normal", "mono"} <= flags
    assert not flags & {"special", "right_special", "right_weakly_special"}


def test_cone_diagonal_must_preserve_degree():
    with pytest.raises(ValidationError, match="does not preserve degree"):
        cone_pair([1, 1, 2], {("g3", "g1", "g3"): 1})
