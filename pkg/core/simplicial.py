# core/simplicial.py
import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Tuple

from core.errors import ParseError, ValidationError
from core.exactlinalg import INTEGERS, CochainComplex, CoefficientRing, as_matrix, as_rows, matvec

LOGGER = logging.getLogger(__name__)

VertexSet = Tuple[int, ...]


def vertex_set(items: Iterable[int]) -> VertexSet:
    return tuple(sorted(set(int(v) for v in items)))


def subsets(ground: VertexSet) -> List[VertexSet]:
    """All subsets of ground, by size then lexicographically."""
    return [c for k in range(len(ground) + 1) for c in combinations(ground, k)]


@dataclass(frozen=True)
class SimplicialComplex:
    """Complex on [m] stored by its facets; ``facets is None`` is the void complex."""
    m: int
    facets: Optional[Tuple[VertexSet, ...]]

    def __post_init__(self):
        if self.m < 0:
            raise ValidationError("Ground set size must be nonnegative.")
        if self.facets is None:
            return
        cleaned = {vertex_set(f) for f in self.facets}
        for f in cleaned:
            if f and (f[0] < 1 or f[-1] > self.m):
                raise ValidationError(f"Facet {list(f)} leaves the ground set [1..{self.m}].")
        maximal = [f for f in cleaned if not any(set(f) < set(g) for g in cleaned)]
        if not maximal:
            maximal = [()]
        object.__setattr__(self, "facets", tuple(sorted(maximal, key=lambda f: (len(f), f))))

    @property
    def is_void(self) -> bool:
        return self.facets is None

    @property
    def ground(self) -> VertexSet:
        return tuple(range(1, self.m + 1))

    @cached_property
    def face_set(self) -> frozenset:
        if self.facets is None:
            return frozenset()
        return frozenset(s for f in self.facets for s in subsets(f))

    def faces(self, degree: Optional[int] = None) -> List[VertexSet]:
        """Faces sorted by size then lexicographically; ``degree`` filters by |B|."""
        out = sorted(self.face_set, key=lambda f: (len(f), f))
        if degree is None:
            return out
        return [f for f in out if len(f) == degree]

    def vertices(self) -> VertexSet:
        return tuple(sorted({v for f in self.face_set for v in f}))

    def minimal_nonfaces(self) -> List[VertexSet]:
        if self.facets is None:
            return [()]
        verts = self.ground
        out = []
        for s in subsets(verts):
            if s in self.face_set:
                continue
            if all(s[:i] + s[i + 1:] in self.face_set for i in range(len(s))):
                out.append(s)
        return out

    def dimension(self) -> int:
        if self.facets is None:
            return -2
        return max(len(f) for f in self.facets) - 1

    def describe(self) -> str:
        if self.facets is None:
            return f"void complex on [{self.m}]"
        return f"K on [{self.m}] with facets {[list(f) for f in self.facets]}"


def void(m: int) -> SimplicialComplex:
    return SimplicialComplex(m, None)


def contains_face(K: SimplicialComplex, tau: Iterable[int]) -> bool:
    return vertex_set(tau) in K.face_set


def link(K: SimplicialComplex, sigma: Iterable[int]) -> SimplicialComplex:
    sigma = vertex_set(sigma)
    if not contains_face(K, sigma):
        return void(K.m)
    s = set(sigma)
    facets = [tuple(v for v in f if v not in s) for f in K.facets if s <= set(f)]
    return SimplicialComplex(K.m, tuple(facets))


def restrict(K: SimplicialComplex, omega: Iterable[int]) -> SimplicialComplex:
    if K.is_void:
        return K
    w = set(vertex_set(omega))
    return SimplicialComplex(K.m, tuple(tuple(v for v in f if v in w) for f in K.facets))


def k_sigma_omega(K: SimplicialComplex, sigma: Iterable[int], omega: Iterable[int]) -> SimplicialComplex:
    """(link_K σ)|_ω, void when σ is not a face."""
    sigma, omega = vertex_set(sigma), vertex_set(omega)
    if set(sigma) & set(omega):
        raise ValidationError(f"Index pair ({list(sigma)}, {list(omega)}) is not disjoint.")
    return restrict(link(K, sigma), omega)


def coboundary_sign(face: VertexSet, v: int) -> int:
    """Sign of v inside sorted face ∪ {v}, counted from position one."""
    below = sum(1 for b in face if b < v)
    return 1 if below % 2 == 1 else -1


@dataclass
class AugmentedCochainComplex:
    """ΣC̃*(L): face B sits in degree |B|."""
    ground: VertexSet
    bases: Dict[int, List[VertexSet]]
    complex: CochainComplex

    @cached_property
    def positions(self) -> Dict[VertexSet, int]:
        return {f: i for basis in self.bases.values() for i, f in enumerate(basis)}

    @property
    def top_degree(self) -> int:
        return len(self.complex.dims) - 1

    def basis(self, degree: int) -> List[VertexSet]:
        return self.bases.get(degree, [])

    def vector(self, degree: int, values: Dict[VertexSet, object]) -> List:
        """Dense cochain in ``degree`` from a face -> coefficient map."""
        K = self.complex.ring.domain
        out = [K.zero] * len(self.basis(degree))
        for face, c in values.items():
            out[self.positions[face]] += c
        return out

    def coboundary_of(self, degree: int, z: List) -> List:
        K = self.complex.ring.domain
        return matvec(as_rows(self.complex.outgoing(degree)), z, K)


def augmented_cochain_complex(L: SimplicialComplex, ground: Optional[Iterable[int]] = None,
                              ring: CoefficientRing = INTEGERS) -> AugmentedCochainComplex:
    K = ring.domain
    ground = vertex_set(ground) if ground is not None else L.ground
    if L.is_void:
        return AugmentedCochainComplex(ground, {}, CochainComplex(ring, ()))
    faces = L.faces()
    if any(not set(f) <= set(ground) for f in faces):
        raise ValidationError("Complex has faces outside the chosen ground set.")
    top = max(len(f) for f in faces)
    bases = {d: [f for f in faces if len(f) == d] for d in range(top + 1)}
    index = {f: i for d in bases for i, f in enumerate(bases[d])}
    maps = {}
    for d in range(top):
        rows = [[K.zero] * len(bases[d]) for _ in bases[d + 1]]
        for j, face in enumerate(bases[d]):
            for v in ground:
                if v in face:
                    continue
                bigger = vertex_set(face + (v,))
                if bigger in L.face_set:
                    rows[index[bigger]][j] = K.convert(coboundary_sign(face, v))
        maps[d] = as_matrix(rows, (len(bases[d + 1]), len(bases[d])), K)
    dims = tuple(len(bases[d]) for d in range(top + 1))
    return AugmentedCochainComplex(ground, bases, CochainComplex(ring, dims, maps))


def reduced_euler_characteristic(L: SimplicialComplex) -> int:
    """Σ over faces (∅ included) of (-1)^(|B|-1)."""
    return sum(-1 if (len(f) - 1) % 2 else 1 for f in L.face_set)


# --- file format and named complexes -------------------------------------------------

def complex_from_json(data: dict) -> SimplicialComplex:
    if not isinstance(data, dict) or "m" not in data:
        raise ParseError("Complex JSON needs an integer 'm'.")
    try:
        m = int(data["m"])
        facets = data.get("facets", [])
        if facets is None:
            return void(m)
        return SimplicialComplex(m, tuple(tuple(int(v) for v in f) for f in facets))
    except (TypeError, ValueError) as e:
        if isinstance(e, ValidationError):
            raise
        raise ParseError(f"Invalid complex JSON: {e}")


def complex_to_json(K: SimplicialComplex) -> dict:
    if K.is_void:
        return {"m": K.m, "facets": None}
    return {"m": K.m, "facets": [list(f) for f in K.facets]}


def polygon(m: int) -> SimplicialComplex:
    if m < 3:
        raise ValidationError("A polygon needs at least 3 vertices.")
    return SimplicialComplex(m, tuple((i, i % m + 1) for i in range(1, m + 1)))


def simplex(m: int) -> SimplicialComplex:
    return SimplicialComplex(m, (tuple(range(1, m + 1)),))


def simplex_boundary(m: int) -> SimplicialComplex:
    full = tuple(range(1, m + 1))
    return SimplicialComplex(m, tuple(full[:i] + full[i + 1:] for i in range(m)))


def points(m: int) -> SimplicialComplex:
    return SimplicialComplex(m, tuple((i,) for i in range(1, m + 1)))


def empty(m: int) -> SimplicialComplex:
    return SimplicialComplex(m, ((),))


RP2_FACETS = (
    (1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 2, 6),
    (2, 3, 5), (3, 4, 6), (2, 4, 5), (3, 5, 6), (2, 4, 6),
)


def rp2() -> SimplicialComplex:
    """Six-vertex real projective plane."""
    return SimplicialComplex(6, RP2_FACETS)
