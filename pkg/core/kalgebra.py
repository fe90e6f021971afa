# core/kalgebra.py
"""K-side of the model.

T-generators t_{A,B,C,D} are stored as faces B of K_{σ,ω} with
(σ, ω) = (A, B ∪ C); the total complex is the direct sum over indices of
the augmented cochain complexes ΣC̃*(K_{σ,ω}).
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Tuple

from core.errors import ConsistencyError, ValidationError
from core.exactlinalg import INTEGERS, CoefficientRing, HomologySummary, homology
from core.indexed import IndexPair, index_pairs
from core.simplicial import (
    AugmentedCochainComplex,
    SimplicialComplex,
    VertexSet,
    augmented_cochain_complex,
    k_sigma_omega,
    vertex_set,
)

LOGGER = logging.getLogger(__name__)

Cochain = Dict[VertexSet, object]


class ProductFlavor(str, Enum):
    UNIVERSAL = "universal"
    NORMAL = "normal"
    SPECIAL = "special"
    RIGHT_UNIVERSAL = "right_universal"
    RIGHT_NORMAL = "right_normal"
    RIGHT_SPECIAL = "right_special"
    RIGHT_STRICTLY_NORMAL = "right_strictly_normal"
    RIGHT_WEAKLY_SPECIAL = "right_weakly_special"
    RIGHT_SPECIAL_SIGNED = "right_special_signed"

    @property
    def is_right(self) -> bool:
        return self.value.startswith("right_")


@dataclass(frozen=True)
class TGenerator:
    A: VertexSet  # α letters
    B: VertexSet  # β letters
    C: VertexSet  # γ letters
    D: VertexSet  # η letters

    def __post_init__(self):
        parts = [self.A, self.B, self.C, self.D]
        flat = [v for p in parts for v in p]
        if len(flat) != len(set(flat)):
            raise ValidationError("T-generator letters must partition the ground set.")

    @property
    def degree(self) -> int:
        return len(self.B)

    @property
    def index(self) -> IndexPair:
        return IndexPair(self.A, tuple(self.B) + tuple(self.C))

    @classmethod
    def from_face(cls, index: IndexPair, face: Iterable[int], m: int) -> "TGenerator":
        B = vertex_set(face)
        C = tuple(v for v in index.omega if v not in B)
        used = set(index.sigma) | set(index.omega)
        D = tuple(v for v in range(1, m + 1) if v not in used)
        return cls(index.sigma, B, C, D)

    def word(self, m: int) -> str:
        letters = {**{v: "α" for v in self.A}, **{v: "β" for v in self.B},
                   **{v: "γ" for v in self.C}, **{v: "η" for v in self.D}}
        return "".join(letters.get(k, "?") for k in range(1, m + 1))


@dataclass(frozen=True)
class HochsterClass:
    index: IndexPair
    degree: int
    coords: Tuple

    def is_zero(self) -> bool:
        return not any(self.coords)


def sort_sign(*blocks: Iterable[int]) -> int:
    """Sign of the permutation sorting the concatenation of ascending blocks."""
    seq = [v for b in blocks for v in vertex_set(b)]
    if len(seq) != len(set(seq)):
        raise ValidationError(f"Blocks {[list(b) for b in blocks]} overlap.")
    inversions = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inversions % 2 else 1


def shuffle_sign(mu: Iterable[int], nu: Iterable[int]) -> int:
    return sort_sign(mu, nu)


def gate(flavor: ProductFlavor, target: IndexPair, left: IndexPair, right: IndexPair) -> bool:
    """Whether the restriction product left ⊗ right -> target is the diagonal cup product."""
    flavor = ProductFlavor(flavor)
    s, w = set(target.sigma), set(target.omega)
    s1, w1 = set(left.sigma), set(left.omega)
    s2, w2 = set(right.sigma), set(right.omega)
    if flavor.is_right:
        if s or s1 or s2:
            raise ValidationError(f"Flavor {flavor.value} only accepts indices with empty σ.")
        if flavor is ProductFlavor.RIGHT_UNIVERSAL:
            return True
        if flavor is ProductFlavor.RIGHT_NORMAL:
            return w <= w1 | w2
        if flavor in (ProductFlavor.RIGHT_SPECIAL, ProductFlavor.RIGHT_SPECIAL_SIGNED):
            return w == w1 | w2 and not w1 & w2
        if flavor is ProductFlavor.RIGHT_STRICTLY_NORMAL:
            return w == w1 | w2
        return (w1 | w2) <= w and not w1 & w2
    if flavor is ProductFlavor.UNIVERSAL:
        return (s1 | s2) - s <= w - (w1 | w2)
    if flavor is ProductFlavor.NORMAL:
        return (s1 | s2) <= s and w <= w1 | w2
    return s1 | s2 == s and not s1 & s2 and w == w1 | w2 and not w1 & w2


@dataclass
class HochsterPiece:
    """ΣC̃*(K_{σ,ω}) with its cohomology summary."""
    index: IndexPair
    complex: SimplicialComplex
    cochains: AugmentedCochainComplex
    summary: HomologySummary

    @property
    def ring(self) -> CoefficientRing:
        return self.summary.ring

    def rank(self, degree: int) -> int:
        s = self.summary.degrees.get(degree)
        return 0 if s is None else s.size

    def classes(self) -> List[HochsterClass]:
        K = self.ring.domain
        out = []
        for d, s in sorted(self.summary.degrees.items()):
            for i in range(s.size):
                coords = [K.zero] * s.size
                coords[i] = K.one
                out.append(HochsterClass(self.index, d, tuple(coords)))
        return out

    def order(self, degree: int, slot: int) -> int:
        """0 for a free generator, the torsion order otherwise."""
        s = self.summary.degrees[degree]
        if slot < s.free_rank:
            return 0
        return s.torsion[slot - s.free_rank]

    def representative(self, degree: int, coords) -> Cochain:
        K = self.ring.domain
        s = self.summary.degrees[degree]
        vec = [K.zero] * len(self.cochains.basis(degree))
        for c, rep in zip(coords, s.reps):
            if c:
                vec = [x + c * y for x, y in zip(vec, rep)]
        return {f: x for f, x in zip(self.cochains.basis(degree), vec) if x}

    def coordinates(self, degree: int, cochain: Cochain) -> Tuple:
        """Class of a cocycle; raises ConsistencyError on a non-cocycle."""
        if degree not in self.summary.degrees:
            if cochain:
                raise ConsistencyError(f"Cochain in empty degree {degree} at {self.index.label()}.")
            return ()
        z = self.cochains.vector(degree, cochain)
        try:
            return tuple(self.summary.degrees[degree].coordinates(z))
        except ValidationError as e:
            raise ConsistencyError(f"Product at {self.index.label()} is not a cocycle: {e}")


@dataclass
class TotalComplex:
    """T*(K) over X_m or R_m, realized index by index and cached."""
    K: SimplicialComplex
    world: str = "X"
    ring: CoefficientRing = INTEGERS
    _pieces: Dict[IndexPair, Optional[HochsterPiece]] = field(default_factory=dict)

    @cached_property
    def indices(self) -> List[IndexPair]:
        return index_pairs(self.K.m, self.world)

    def piece(self, index: IndexPair) -> Optional[HochsterPiece]:
        """None when σ ∉ K (the piece is void)."""
        if index not in self._pieces:
            L = k_sigma_omega(self.K, index.sigma, index.omega)
            if L.is_void:
                self._pieces[index] = None
            else:
                cochains = augmented_cochain_complex(L, index.omega, self.ring)
                summary = homology(cochains.complex)
                self._pieces[index] = HochsterPiece(index, L, cochains, summary)
                LOGGER.debug("piece %s: %s", index.label(), summary.betti())
        return self._pieces[index]

    def pieces(self) -> Dict[IndexPair, HochsterPiece]:
        return {i: p for i in self.indices if (p := self.piece(i)) is not None}


def total_complex(K: SimplicialComplex, world: str = "X", ring: CoefficientRing = INTEGERS) -> TotalComplex:
    if world not in ("X", "R"):
        raise ValidationError(f"Unknown index world '{world}'.")
    return TotalComplex(K, world, ring)


def free_region(target: IndexPair, left: IndexPair, right: IndexPair) -> VertexSet:
    return tuple(v for v in target.omega if v not in left.omega and v not in right.omega)


def pi_delta(T: TotalComplex, target: IndexPair, left: IndexPair, right: IndexPair,
             mu: Iterable[int], nu: Iterable[int]) -> Cochain:
    """Diagonal cochain product of the faces μ ∈ K_{σ′,ω′} and ν ∈ K_{σ″,ω″}.

    The image is the single face λ = μ ∪ ν ∪ E, E = ω ∖ (ω′ ∪ ω″), with sign
    ⟨μ, ν, E⟩, or zero.
    """
    mu, nu = vertex_set(mu), vertex_set(nu)
    for face, idx in ((mu, left), (nu, right)):
        piece = T.piece(idx)
        if piece is None or face not in piece.complex.face_set:
            raise ValidationError(f"{list(face)} is not a face of K_{idx.label()}.")
    if not gate(ProductFlavor.UNIVERSAL, target, left, right):
        return {}
    omega = set(target.omega)
    if set(target.sigma) & (set(left.omega) | set(right.omega)):
        return {}
    if not set(mu) <= omega or not set(nu) <= omega - set(left.omega):
        return {}
    free = free_region(target, left, right)
    lam = vertex_set(mu + nu + free)
    piece = T.piece(target)
    if piece is None or lam not in piece.complex.face_set:
        return {}
    K = T.ring.domain
    return {lam: K.convert(sort_sign(mu, nu, free))}


def cochain_product(T: TotalComplex, target: IndexPair, left: IndexPair, right: IndexPair,
                    a: Cochain, b: Cochain) -> Cochain:
    K = T.ring.domain
    out: Cochain = {}
    for mu, ca in a.items():
        for nu, cb in b.items():
            for lam, c in pi_delta(T, target, left, right, mu, nu).items():
                out[lam] = out.get(lam, K.zero) + ca * cb * c
    return {f: c for f, c in out.items() if c}


def class_product(T: TotalComplex, target: IndexPair, a: HochsterClass, b: HochsterClass) -> Optional[HochsterClass]:
    """[a] ∪_Δ [b] at one target index, or None when nothing lands there."""
    piece = T.piece(target)
    if piece is None:
        return None
    left, right = T.piece(a.index), T.piece(b.index)
    z = cochain_product(T, target, a.index, b.index,
                        left.representative(a.degree, a.coords),
                        right.representative(b.degree, b.coords))
    degree = a.degree + b.degree + len(free_region(target, a.index, b.index))
    if degree not in piece.summary.degrees:
        if z:
            raise ConsistencyError(f"Product leaves the complex at {target.label()}.")
        return None
    return HochsterClass(target, degree, piece.coordinates(degree, z))


def cup_classes(T: TotalComplex, flavor: ProductFlavor, a: HochsterClass, b: HochsterClass) -> List[HochsterClass]:
    """Sum over every gate-admissible target of the diagonal cup product."""
    flavor = ProductFlavor(flavor)
    K = T.ring.domain
    out = []
    for target in T.indices:
        if not gate(flavor, target, a.index, b.index):
            continue
        c = class_product(T, target, a, b)
        if c is None or c.is_zero():
            continue
        if flavor is ProductFlavor.RIGHT_SPECIAL_SIGNED:
            sign = K.convert(shuffle_sign(a.index.omega, b.index.omega))
            c = HochsterClass(c.index, c.degree, tuple(sign * x for x in c.coords))
        out.append(c)
    return out
