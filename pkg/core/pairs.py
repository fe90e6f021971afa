# core/pairs.py
"""Algebraic data of a homology split pair (X, A).

Generators come in three families on the homology side:
    eta   = im i_*      gamma = ker i_*      alpha = coker i_*
and every gamma generator g has a partner "~g" (the β letter, degree |g|+1,
d(~g) = g). ``psi`` holds the character coproduct on all four families as
(source, left, right) -> integer coefficient.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from core.errors import ParseError, ValidationError
from core.exactlinalg import INTEGERS, CoefficientRing

LOGGER = logging.getLogger(__name__)

BETA_PREFIX = "~"
UNIT = "1"

ALPHA, BETA, GAMMA, ETA = "alpha", "beta", "gamma", "eta"
LETTER_CODE = {ALPHA: "α", BETA: "β", GAMMA: "γ", ETA: "η"}

Psi = Dict[Tuple[str, str, str], int]


def bar(label: str) -> str:
    return BETA_PREFIX + label


@dataclass(frozen=True)
class PairGenerator:
    label: str
    degree: int
    letter: str


@dataclass
class PairData:
    name: str
    eta: Tuple[PairGenerator, ...]
    gamma: Tuple[PairGenerator, ...]
    alpha: Tuple[PairGenerator, ...]
    psi: Psi
    ring: CoefficientRing = INTEGERS

    def __post_init__(self):
        self._by_label: Dict[str, PairGenerator] = {}
        for g in self.eta + self.gamma + self.alpha:
            if g.label in self._by_label:
                raise ValidationError(f"Pair {self.name}: duplicate generator label '{g.label}'.")
            if g.label.startswith(BETA_PREFIX):
                raise ValidationError(f"Pair {self.name}: labels may not start with '{BETA_PREFIX}'.")
            self._by_label[g.label] = g
        for g in self.gamma:
            self._by_label[bar(g.label)] = PairGenerator(bar(g.label), g.degree + 1, BETA)

    def generator(self, label: str) -> PairGenerator:
        try:
            return self._by_label[label]
        except KeyError:
            raise ValidationError(f"Pair {self.name}: unknown generator '{label}'.")

    def knows(self, label: str) -> bool:
        return label in self._by_label

    def letter(self, label: str) -> str:
        return self.generator(label).letter

    def degree(self, label: str) -> int:
        return self.generator(label).degree

    def homology_generators(self) -> Tuple[PairGenerator, ...]:
        """η, γ and α generators: a basis of H^X_*(X, A)."""
        return self.eta + self.gamma + self.alpha

    def character_basis(self) -> List[PairGenerator]:
        return list(self.eta) + list(self.gamma) + [self.generator(bar(g.label)) for g in self.gamma] + list(self.alpha)

    def psi_of(self, src: str) -> Dict[Tuple[str, str], int]:
        return {(l, r): c for (s, l, r), c in self.psi.items() if s == src and c}

    def with_ring(self, ring: CoefficientRing) -> "PairData":
        return PairData(self.name, self.eta, self.gamma, self.alpha, dict(self.psi), ring)


@dataclass(frozen=True)
class PairClass:
    flags: FrozenSet[str]

    def has(self, flag: str) -> bool:
        return flag in self.flags


@dataclass
class PairProduct:
    """π_{(X,A)} on the dual basis: (left, right) -> {target: coefficient}."""
    pair: PairData
    table: Dict[Tuple[str, str], Dict[str, int]] = field(default_factory=dict)

    def product(self, left: str, right: str) -> Dict[str, int]:
        return self.table.get((left, right), {})

    def shifting_terms(self) -> List[Tuple[str, str, str]]:
        """Constants with deg(target) != deg(left) + deg(right)."""
        p = self.pair
        return [
            (l, r, t)
            for (l, r), out in sorted(self.table.items())
            for t in sorted(out)
            if p.degree(t) != p.degree(l) + p.degree(r)
        ]


# --- sector rules ---------------------------------------------------------------------

def _pairs(*codes: str) -> FrozenSet[Tuple[str, str]]:
    names = {"α": ALPHA, "β": BETA, "γ": GAMMA, "η": ETA}
    return frozenset((names[c[0]], names[c[1]]) for c in codes)


CHARACTER_SECTORS = {
    ETA: _pairs("ηη", "γη", "ηγ", "γγ"),
    GAMMA: _pairs("γγ", "γη", "ηγ"),
    BETA: _pairs("βγ", "βη", "ηβ", "αα", "αη", "ηα", "ηη"),
    ALPHA: _pairs("αα", "αη", "ηα", "ηη"),
}

CORRECTION_SECTOR = _pairs("αα", "αη", "ηα", "ηη")

CLASS_SECTORS = {
    "normal": {
        ETA: _pairs("ηη", "ηγ", "γη", "γγ"), GAMMA: _pairs("γγ", "γη", "ηγ"),
        BETA: _pairs("βγ", "βη", "ηβ"), ALPHA: _pairs("αα", "αη", "ηα", "ηη"),
    },
    "special": {
        ETA: _pairs("ηη"), GAMMA: _pairs("γη", "ηγ"),
        BETA: _pairs("βη", "ηβ"), ALPHA: _pairs("αη", "ηα"),
    },
    "right_normal": {
        ETA: _pairs("ηη", "ηγ", "γη", "γγ"), GAMMA: _pairs("γγ", "γη", "ηγ"),
        BETA: _pairs("βγ", "βη", "ηβ"),
    },
    "right_special": {
        ETA: _pairs("ηη"), GAMMA: _pairs("γη", "ηγ"), BETA: _pairs("βη", "ηβ"),
    },
    "right_strictly_normal": {
        ETA: _pairs("ηη"), GAMMA: _pairs("γγ", "γη", "ηγ"), BETA: _pairs("βγ", "βη", "ηβ"),
    },
    "right_weakly_special": {
        ETA: _pairs("ηη"), GAMMA: _pairs("γη", "ηγ"), BETA: _pairs("βη", "ηβ", "ηη"),
    },
}


def _sector_violations(p: PairData, rules: Dict[str, FrozenSet[Tuple[str, str]]]) -> List[str]:
    out = []
    for (src, left, right), c in sorted(p.psi.items()):
        if not c:
            continue
        letter = p.letter(src)
        allowed = rules.get(letter)
        if allowed is None:
            continue
        shape = (p.letter(left), p.letter(right))
        if shape not in allowed:
            out.append(
                f"psi({src}) has a {LETTER_CODE[shape[0]]}⊗{LETTER_CODE[shape[1]]} term "
                f"{left}⊗{right} outside the allowed sectors for {LETTER_CODE[letter]}"
            )
    return out


def _differential(p: PairData, terms: Dict[Tuple[str, str], int]) -> Dict[Tuple[str, str], int]:
    """d on C⊗C with d(~g) = g and Koszul sign on the right factor."""
    out: Dict[Tuple[str, str], int] = defaultdict(int)
    for (left, right), c in terms.items():
        if p.letter(left) == BETA:
            out[(left[len(BETA_PREFIX):], right)] += c
        if p.letter(right) == BETA:
            out[(left, right[len(BETA_PREFIX):])] += c * (-1) ** p.degree(left)
    return {k: v for k, v in out.items() if v}


def validate(p: PairData) -> List[str]:
    """Every rule the pair breaks, as readable sentences; empty when valid."""
    violations = []
    unknown = sorted({lab for key in p.psi for lab in key if not p.knows(lab)})
    if unknown:
        return [f"psi mentions unknown generators {unknown}"]
    for g in p.homology_generators():
        if g.degree < 0:
            violations.append(f"generator {g.label} has negative degree {g.degree}")
    if not p.knows(UNIT) or p.letter(UNIT) != ETA or p.degree(UNIT) != 0:
        violations.append(f"the unit '{UNIT}' must be a degree-0 eta generator")
        return violations
    if p.psi_of(UNIT) != {(UNIT, UNIT): 1}:
        violations.append("psi(1) must be exactly 1⊗1")
    for (src, left, right), c in sorted(p.psi.items()):
        if c and p.degree(src) != p.degree(left) + p.degree(right):
            violations.append(f"psi({src}) term {left}⊗{right} does not preserve degree")
    violations.extend(_sector_violations(p, CHARACTER_SECTORS))
    for g in p.gamma:
        if _differential(p, p.psi_of(bar(g.label))) != p.psi_of(g.label):
            violations.append(f"psi is not a chain map on {bar(g.label)} (d psi({bar(g.label)}) != psi({g.label}))")
    if not violations:
        coproduct = homology_coproduct(p, check=False)
        labels = [g.label for g in p.homology_generators()]
        for x in labels:
            for y in labels:
                want = 1 if x == y else 0
                if coproduct.get((y, UNIT, x), 0) != want or coproduct.get((y, x, UNIT), 0) != want:
                    violations.append(f"1 is not a two-sided unit against {x} (checked on psi({y}))")
    return violations


def _require_valid(p: PairData):
    problems = validate(p)
    if problems:
        raise ValidationError(f"Pair {p.name} is invalid: " + "; ".join(problems))


def classify(p: PairData) -> PairClass:
    _require_valid(p)
    flags = set()
    for name, rules in CLASS_SECTORS.items():
        if name.startswith("right_") and p.alpha:
            continue
        if not _sector_violations(p, rules):
            flags.add(name)
    if not p.gamma:
        flags.add("epi")
    if not p.alpha:
        flags.add("mono")
    return PairClass(frozenset(flags))


def homology_coproduct(p: PairData, check: bool = True) -> Psi:
    """ψ_{(X,A)}: the character coproduct on α ⊕ η, and on γ the character
    coproduct plus the (α⊕η)⊗(α⊕η) part of ψ(~g)."""
    if check:
        _require_valid(p)
    out: Psi = {}
    for g in p.homology_generators():
        for (left, right), c in p.psi_of(g.label).items():
            out[(g.label, left, right)] = c
    for g in p.gamma:
        for (left, right), c in p.psi_of(bar(g.label)).items():
            if (p.letter(left), p.letter(right)) in CORRECTION_SECTOR:
                key = (g.label, left, right)
                out[key] = out.get(key, 0) + c
    return {k: v for k, v in out.items() if v}


def dual_product(p: PairData) -> PairProduct:
    """Transpose of ψ_{(X,A)}: target* appears in left*·right* with the
    coefficient of left⊗right in ψ(target)."""
    table: Dict[Tuple[str, str], Dict[str, int]] = defaultdict(dict)
    for (src, left, right), c in homology_coproduct(p).items():
        table[(left, right)][src] = table[(left, right)].get(src, 0) + c
    return PairProduct(p, dict(table))


# --- built-in pairs -------------------------------------------------------------------

def _gen(label: str, degree: int, letter: str) -> PairGenerator:
    return PairGenerator(label, degree, letter)


def _primitive(psi: Psi, label: str, point_class: bool = False):
    psi[(label, label, UNIT)] = 1
    psi[(label, UNIT, label)] = 1
    if point_class:
        psi[(label, label, label)] = 1


def _lift_gamma(p_psi: Psi, gamma: Sequence[PairGenerator], degrees: Dict[str, int]):
    """Fill ψ(~g) from ψ(g): c'⊗c'' gives ~c'⊗c'' when c' ∈ γ, else (-1)^|c'| c'⊗~c''."""
    gamma_labels = {g.label for g in gamma}
    for g in gamma:
        for (src, left, right), c in list(p_psi.items()):
            if src != g.label:
                continue
            if left in gamma_labels:
                p_psi[(bar(g.label), bar(left), right)] = c
            else:
                p_psi[(bar(g.label), left, bar(right))] = c * (-1) ** degrees[left]


def _assemble(name, eta, gamma, alpha, psi, extra: Optional[Psi] = None) -> PairData:
    degrees = {g.label: g.degree for g in eta + gamma + alpha}
    _lift_gamma(psi, gamma, degrees)
    if extra:
        psi.update(extra)
    pair = PairData(name, tuple(eta), tuple(gamma), tuple(alpha), psi)
    _require_valid(pair)
    return pair


def disk_sphere(n: int) -> PairData:
    """(D^n, S^{n-1}), n ≥ 1; for n = 1 the sphere is two points."""
    if n < 1:
        raise ValidationError("disk_sphere needs n >= 1.")
    psi: Psi = {(UNIT, UNIT, UNIT): 1}
    _primitive(psi, "g", point_class=(n == 1))
    return _assemble(f"disk_sphere:{n}", [_gen(UNIT, 0, ETA)], [_gen("g", n - 1, GAMMA)], [], psi)


def sphere_pair(r: int, p: int) -> PairData:
    """(S^r, S^p) with S^p ⊂ S^r, 0 ≤ p < r."""
    if r < 1 or p < 0 or p >= r:
        raise ValidationError(f"sphere_pair needs 0 <= p < r, got r={r}, p={p}.")
    psi: Psi = {(UNIT, UNIT, UNIT): 1}
    _primitive(psi, "g", point_class=(p == 0))
    _primitive(psi, "c")
    return _assemble(
        f"sphere_pair:{r}:{p}",
        [_gen(UNIT, 0, ETA)], [_gen("g", p, GAMMA)], [_gen("c", r, ALPHA)], psi,
    )


def cone_pair(degrees: Sequence[int], coproduct: Optional[Psi] = None) -> PairData:
    """(CX, X) with reduced generators g1, g2, ... of the given degrees.

    Without ``coproduct`` X is a wedge of spheres and points. ``coproduct``
    adds reduced diagonal terms (src, left, right) -> coef among the g's,
    e.g. the torus: degrees [1, 1, 2] with g3 -> g1⊗g2 - g2⊗g1.
    """
    if not degrees or any(d < 0 for d in degrees):
        raise ValidationError("cone_pair needs a nonempty list of nonnegative degrees.")
    psi: Psi = {(UNIT, UNIT, UNIT): 1}
    gamma = []
    for i, d in enumerate(degrees, start=1):
        gamma.append(_gen(f"g{i}", d, GAMMA))
        _primitive(psi, f"g{i}", point_class=(d == 0))
    name = "cone_pair:" + ":".join(map(str, degrees))
    if coproduct:
        psi.update(coproduct)
        name += ":diagonal"
    return _assemble(name, [_gen(UNIT, 0, ETA)], gamma, [], psi)


def suspended_cone_pair(degrees: Sequence[int]) -> PairData:
    """(CΣX, ΣX): reduced degrees shifted up by one, all primitive."""
    if not degrees or any(d < 0 for d in degrees):
        raise ValidationError("suspended_cone_pair needs a nonempty list of nonnegative degrees.")
    psi: Psi = {(UNIT, UNIT, UNIT): 1}
    gamma = []
    for i, d in enumerate(degrees, start=1):
        gamma.append(_gen(f"s{i}", d + 1, GAMMA))
        _primitive(psi, f"s{i}")
    name = "suspended_cone_pair:" + ":".join(map(str, degrees))
    return _assemble(name, [_gen(UNIT, 0, ETA)], gamma, [], psi)


def cp_truncated(N: int) -> PairData:
    """(CP^N, *): i* is onto and c_a·c_b = c_{a+b} below N+1."""
    if N < 1:
        raise ValidationError("cp_truncated needs N >= 1.")
    label = lambda j: UNIT if j == 0 else f"c{j}"
    psi: Psi = {(UNIT, UNIT, UNIT): 1}
    for j in range(1, N + 1):
        for a in range(j + 1):
            psi[(label(j), label(a), label(j - a))] = 1
    alpha = [_gen(label(j), 2 * j, ALPHA) for j in range(1, N + 1)]
    return _assemble(f"cp_truncated:{N}", [_gen(UNIT, 0, ETA)], [], alpha, psi)


def example_2_9(variant: int) -> PairData:
    """Generators 1, a (|a| = 2) in im, b (|b| = 3) in ker; variant 2 adds a⊗a to ψ(~b)."""
    if variant not in (1, 2):
        raise ValidationError("example_2_9 has variants 1 and 2.")
    psi: Psi = {(UNIT, UNIT, UNIT): 1}
    _primitive(psi, "a")
    _primitive(psi, "b")
    extra = {(bar("b"), "a", "a"): 1} if variant == 2 else None
    return _assemble(
        f"example_2_9:{variant}",
        [_gen(UNIT, 0, ETA), _gen("a", 2, ETA)], [_gen("b", 3, GAMMA)], [], psi, extra,
    )


BUILTINS = {
    "disk_sphere": (disk_sphere, 1),
    "sphere_pair": (sphere_pair, 2),
    "cone_pair": (lambda *ds: cone_pair(ds), None),
    "suspended_cone_pair": (lambda *ds: suspended_cone_pair(ds), None),
    "cp_truncated": (cp_truncated, 1),
    "example_2_9": (example_2_9, 1),
}


def builtin(name: str, params: Sequence[int] = ()) -> PairData:
    if name not in BUILTINS:
        raise ValidationError(f"Unknown built-in pair '{name}'. Known: {sorted(BUILTINS)}")
    factory, arity = BUILTINS[name]
    if arity is not None and len(params) != arity:
        raise ValidationError(f"Built-in pair '{name}' takes {arity} parameter(s), got {len(params)}.")
    return factory(*params)


# --- file format ----------------------------------------------------------------------

def pair_from_json(data: dict, name: str = "pair", ring: CoefficientRing = INTEGERS) -> PairData:
    """Pair from its JSON object; the "ring" field is parsed by the caller."""
    if not isinstance(data, dict):
        raise ParseError("Pair JSON must be an object.")
    try:
        families = {}
        for key, letter in (("eta", ETA), ("gamma", GAMMA), ("alpha", ALPHA)):
            families[key] = tuple(
                PairGenerator(str(g["label"]), int(g["deg"]), letter) for g in data.get(key, [])
            )
        psi: Psi = {}
        for term in data.get("psi", []):
            key = (str(term["src"]), str(term["left"]), str(term["right"]))
            psi[key] = psi.get(key, 0) + int(term["coef"])
    except (KeyError, TypeError) as e:
        raise ParseError(f"Invalid pair JSON: missing or malformed field {e}")
    except ValueError as e:
        if isinstance(e, (ParseError, ValidationError)):
            raise
        raise ParseError(f"Invalid pair JSON: {e}")
    pair = PairData(name, families["eta"], families["gamma"], families["alpha"], psi, ring)
    _require_valid(pair)
    return pair


def pair_to_json(p: PairData) -> dict:
    def gens(family):
        return [{"label": g.label, "deg": g.degree} for g in family]

    return {
        "eta": gens(p.eta),
        "gamma": gens(p.gamma),
        "alpha": gens(p.alpha),
        "psi": [
            {"src": s, "left": l, "right": r, "coef": c}
            for (s, l, r), c in sorted(p.psi.items()) if c
        ],
        "ring": p.ring.label,
    }
