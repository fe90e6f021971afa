# core/koszul_oracle.py
"""Independent ring computation for the moment-angle complex Z(K; D², S¹).

Works in the finite dga spanned by u_J·x_I (I a face, J ∩ I = ∅) with
u_i odd of degree 1, x_i even of degree 2, d(u_i) = x_i and
x_i² = u_i·x_i = u_i² = 0. Everything splits by the support J ∪ I.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from core.engine import BasisElement, Fingerprint, RingPresentation, fingerprint
from core.errors import ConsistencyError, ValidationError
from core.exactlinalg import INTEGERS, CochainComplex, CoefficientRing, HomologySummary, as_matrix, homology
from core.indexed import IndexPair
from core.kalgebra import HochsterClass, shuffle_sign
from core.pairs import PairData, disk_sphere, pair_to_json
from core.simplicial import SimplicialComplex, VertexSet, subsets, vertex_set

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class KoszulMonomial:
    J: VertexSet
    I: VertexSet

    @property
    def degree(self) -> int:
        return len(self.J) + 2 * len(self.I)

    @property
    def support(self) -> VertexSet:
        return vertex_set(self.J + self.I)


@dataclass
class SupportBlock:
    support: VertexSet
    bases: Dict[int, List[KoszulMonomial]]
    complex: CochainComplex
    summary: HomologySummary

    @cached_property
    def positions(self) -> Dict[KoszulMonomial, int]:
        return {x: i for basis in self.bases.values() for i, x in enumerate(basis)}


@dataclass
class KoszulDGA:
    K: SimplicialComplex
    ring: CoefficientRing = INTEGERS
    _blocks: Dict[VertexSet, SupportBlock] = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.K.m

    def monomials(self, support: VertexSet) -> List[KoszulMonomial]:
        return sorted(
            (KoszulMonomial(tuple(v for v in support if v not in I), I)
             for I in subsets(support) if I in self.K.face_set),
            key=lambda x: (x.degree, x),
        )

    def differential(self, x: KoszulMonomial) -> Dict[KoszulMonomial, int]:
        out = {}
        for pos, j in enumerate(x.J):
            I = vertex_set(x.I + (j,))
            if I in self.K.face_set:
                out[KoszulMonomial(tuple(v for v in x.J if v != j), I)] = -1 if pos % 2 else 1
        return out

    def product(self, a: KoszulMonomial, b: KoszulMonomial) -> Optional[Tuple[int, KoszulMonomial]]:
        if set(a.support) & set(b.support):
            return None
        I = vertex_set(a.I + b.I)
        if I not in self.K.face_set:
            return None
        return shuffle_sign(a.J, b.J), KoszulMonomial(vertex_set(a.J + b.J), I)

    def block(self, support: Iterable[int]) -> SupportBlock:
        support = vertex_set(support)
        if support not in self._blocks:
            D = self.ring.domain
            bases: Dict[int, List[KoszulMonomial]] = {}
            for x in self.monomials(support):
                bases.setdefault(x.degree, []).append(x)
            top = 2 * len(support)
            full = {d: bases.get(d, []) for d in range(top + 1)}
            index = {x: i for basis in full.values() for i, x in enumerate(basis)}
            maps = {}
            for d in range(top):
                rows = [[D.zero] * len(full[d]) for _ in full[d + 1]]
                for j, x in enumerate(full[d]):
                    for y, c in self.differential(x).items():
                        rows[index[y]][j] = D.convert(c)
                maps[d] = as_matrix(rows, (len(full[d + 1]), len(full[d])), D)
            C = CochainComplex(self.ring, tuple(len(full[d]) for d in range(top + 1)), maps)
            self._blocks[support] = SupportBlock(support, full, C, homology(C))
        return self._blocks[support]

    def check_square_zero(self):
        for W in subsets(self.K.ground):
            self.block(W).complex.check_square_zero()


def _representative(block: SupportBlock, degree: int, slot: int) -> Dict[KoszulMonomial, object]:
    rep = block.summary.degrees[degree].reps[slot]
    return {x: c for x, c in zip(block.bases[degree], rep) if c}


def koszul_ring(K: SimplicialComplex, ring: CoefficientRing = INTEGERS,
                max_degree: Optional[int] = None) -> RingPresentation:
    """H*(Z(K; D², S¹)) as a RingPresentation; the index records the support (∅, W)."""
    if K.is_void:
        raise ValidationError("The moment-angle complex of the void complex is empty; no oracle ring.")
    dga = KoszulDGA(K, ring)
    D = ring.domain
    basis: List[BasisElement] = []
    orders: List[int] = []
    where: List[Tuple[SupportBlock, int, int]] = []
    for W in sorted(subsets(K.ground)):
        block = dga.block(W)
        index = IndexPair((), W)
        for d, s in sorted(block.summary.degrees.items()):
            if max_degree is not None and d > max_degree:
                continue
            for slot in range(s.size):
                coords = tuple(D.one if i == slot else D.zero for i in range(s.size))
                basis.append(BasisElement(index, HochsterClass(index, d, coords), (), d))
                orders.append(0 if slot < s.free_rank else s.torsion[slot - s.free_rank])
                where.append((block, d, slot))
    positions = {b.key: n for n, b in enumerate(basis)}
    R = RingPresentation(ring, basis, orders, {}, None, "", "koszul_oracle", max_degree)
    R.unit = positions.get((IndexPair((), ()), 0, 0, ()))
    for i, (ba, da, sa) in enumerate(where):
        rep_a = _representative(ba, da, sa)
        for j, (bb, db, sb) in enumerate(where):
            if set(ba.support) & set(bb.support):
                continue
            if max_degree is not None and da + db > max_degree:
                continue
            rep_b = _representative(bb, db, sb)
            target = dga.block(ba.support + bb.support)
            z: Dict[KoszulMonomial, object] = {}
            for x, cx in rep_a.items():
                for y, cy in rep_b.items():
                    hit = dga.product(x, y)
                    if hit is not None:
                        sign, xy = hit
                        z[xy] = z.get(xy, D.zero) + D.convert(sign) * cx * cy
            if not any(z.values()):
                continue
            vec = [D.zero] * len(target.bases.get(da + db, []))
            for xy, c in z.items():
                vec[target.positions[xy]] += c
            try:
                coords = target.summary.degrees[da + db].coordinates(vec)
            except ValidationError as e:
                raise ConsistencyError(f"Koszul product is not a cocycle: {e}")
            index = IndexPair((), target.support)
            terms = {positions[(index, da + db, k, ())]: c for k, c in enumerate(coords) if c}
            terms = R.reduce(terms)
            if terms:
                R.products[(i, j)] = terms
    LOGGER.debug("koszul ring: %d basis elements, %d nonzero products", len(basis), len(R.products))
    return R


# --- comparison -----------------------------------------------------------------------

@dataclass
class Comparison:
    equal: bool
    comparable: bool = True
    differences: List[str] = field(default_factory=list)
    left: Optional[Fingerprint] = None
    right: Optional[Fingerprint] = None

    def to_json(self) -> dict:
        return {
            "equal": self.equal,
            "comparable": self.comparable,
            "differences": self.differences,
            "left": self.left.to_json() if self.left else None,
            "right": self.right.to_json() if self.right else None,
        }


def compare(R1: RingPresentation, R2: RingPresentation, primes: Sequence[int] = (2, 3)) -> Comparison:
    """Basis-free comparison: Betti, torsion and every multiplication rank."""
    f1, f2 = fingerprint(R1, primes), fingerprint(R2, primes)
    diffs = f1.differences(f2)
    return Comparison(not diffs, True, diffs, f1, f2)


def non_comparable_reason(pairs: Sequence[PairData]) -> Optional[str]:
    """Why an engine ring for these pairs cannot be checked here, or None."""
    model = pair_to_json(disk_sphere(2))
    model.pop("ring")
    for p in pairs:
        data = pair_to_json(p)
        data.pop("ring")
        if data != model:
            return f"the oracle models (D², S¹) only; pair {p.name} differs"
    return None


def guarded_compare(engine_ring: RingPresentation, oracle_ring: RingPresentation,
                    pairs: Sequence[PairData], primes: Sequence[int] = (2, 3)) -> Comparison:
    reason = non_comparable_reason(pairs)
    if reason is not None:
        result = compare(engine_ring, oracle_ring, primes)
        return Comparison(False, False, [reason] + result.differences, result.left, result.right)
    return compare(engine_ring, oracle_ring, primes)
