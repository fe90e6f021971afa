# core/indexed.py
"""Groups indexed by X_m (or its σ = ∅ part R_m), diagonal tensor products
and the sign of the interleaving isomorphism."""
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Sequence, Tuple

from core.errors import ValidationError
from core.exactlinalg import INTEGERS, CoefficientRing
from core.simplicial import VertexSet, subsets, vertex_set


@dataclass(frozen=True, order=True)
class IndexPair:
    sigma: VertexSet
    omega: VertexSet

    def __post_init__(self):
        object.__setattr__(self, "sigma", vertex_set(self.sigma))
        object.__setattr__(self, "omega", vertex_set(self.omega))
        if set(self.sigma) & set(self.omega):
            raise ValidationError(f"Index pair ({list(self.sigma)}, {list(self.omega)}) is not disjoint.")

    @property
    def in_right_world(self) -> bool:
        return not self.sigma

    def label(self) -> str:
        return f"({','.join(map(str, self.sigma))}|{','.join(map(str, self.omega))})"

    def to_json(self) -> dict:
        return {"sigma": list(self.sigma), "omega": list(self.omega)}


def index_pairs(m: int, world: str = "X") -> List[IndexPair]:
    """Every index of X_m (world "X") or R_m (world "R"), sorted."""
    ground = tuple(range(1, m + 1))
    out = []
    for omega in subsets(ground):
        if world == "R":
            out.append(IndexPair((), omega))
            continue
        rest = tuple(v for v in ground if v not in omega)
        out.extend(IndexPair(sigma, omega) for sigma in subsets(rest))
    return sorted(out)


@dataclass(frozen=True)
class Generator:
    index: Hashable
    label: Hashable
    degree: int


@dataclass
class IndexedGradedGroup:
    """Direct sum over an index set of free graded modules given by generator lists."""
    ring: CoefficientRing = INTEGERS
    components: Dict[Hashable, List[Generator]] = field(default_factory=dict)

    def add(self, index, label, degree: int) -> Generator:
        g = Generator(index, label, degree)
        self.components.setdefault(index, []).append(g)
        return g

    def rank(self, index, degree=None) -> int:
        return sum(1 for g in self.components.get(index, []) if degree is None or g.degree == degree)

    def generators(self) -> List[Generator]:
        return [g for gens in self.components.values() for g in gens]

    def dual(self) -> "IndexedGradedGroup":
        """Dual group, indexed by the same set with generators in negated degree."""
        out = IndexedGradedGroup(self.ring)
        for index, gens in self.components.items():
            for g in gens:
                out.add(index, ("dual", g.label), -g.degree)
        return out

    def diagonal_tensor(self, other: "IndexedGradedGroup") -> "IndexedGradedGroup":
        if self.ring != other.ring:
            raise ValidationError("Cannot tensor groups over different coefficient rings.")
        out = IndexedGradedGroup(self.ring)
        for index in sorted(set(self.components) & set(other.components), key=repr):
            for a in self.components[index]:
                for b in other.components[index]:
                    out.add(index, (a.label, b.label), a.degree + b.degree)
        return out


@dataclass(frozen=True)
class DiagonalTensorElement:
    index: Hashable
    left: Generator
    right: Generator

    @property
    def degree(self) -> int:
        return self.left.degree + self.right.degree


Element = Dict[Generator, object]
DiagonalSum = Dict[DiagonalTensorElement, object]


def diagonal_tensor(a: Element, b: Element, ring: CoefficientRing = INTEGERS) -> DiagonalSum:
    """a ⊗̂ b: bilinear, with mixed-index products identically zero."""
    out: DiagonalSum = defaultdict(lambda: ring.domain.zero)
    for ga, ca in a.items():
        for gb, cb in b.items():
            if ga.index != gb.index or not ca or not cb:
                continue
            out[DiagonalTensorElement(ga.index, ga, gb)] += ca * cb
    return {k: v for k, v in out.items() if v}


def interleave_sign(left_degrees: Sequence[int], right_degrees: Sequence[int]) -> int:
    """(-1)^s with s = Σ_{i≥2} (|b_1|+...+|b_{i-1}|)|a_i|."""
    s, passed = 0, 0
    for a, b in zip(left_degrees, right_degrees):
        s += passed * a
        passed += b
    return -1 if s % 2 else 1


def interleave_one(factors: Sequence[DiagonalTensorElement]) -> Tuple[int, DiagonalTensorElement]:
    """(a_1⊗̂b_1)⊗...⊗(a_m⊗̂b_m) -> ±(a_1⊗...⊗a_m)⊗̂(b_1⊗...⊗b_m)."""
    sign = interleave_sign([f.left.degree for f in factors], [f.right.degree for f in factors])
    index = tuple(f.index for f in factors)
    left = Generator(index, tuple(f.left.label for f in factors), sum(f.left.degree for f in factors))
    right = Generator(index, tuple(f.right.label for f in factors), sum(f.right.degree for f in factors))
    return sign, DiagonalTensorElement(index, left, right)


def interleave(factors: Iterable[DiagonalSum], ring: CoefficientRing = INTEGERS) -> DiagonalSum:
    """Multilinear extension of ``interleave_one`` to formal sums."""
    K = ring.domain
    partial: List[Tuple[List[DiagonalTensorElement], object]] = [([], K.one)]
    for factor in factors:
        partial = [(terms + [t], c * tc) for terms, c in partial for t, tc in factor.items() if tc]
    out: DiagonalSum = defaultdict(lambda: K.zero)
    for terms, c in partial:
        sign, elem = interleave_one(terms)
        out[elem] += c * K.convert(sign)
    return {k: v for k, v in out.items() if v}
