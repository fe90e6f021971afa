# core/engine.py
"""Cohomology groups and rings of polyhedral products Z(K; X, A).

A basis element pairs a class of ΣC̃*(K_{σ,ω}) with one homology generator
label per position: α on σ, γ on ω, η elsewhere. Products combine the
K-side diagonal cup product with the position-wise dual products of the
pairs, signed by the interleaving of the two tensor factors.
"""
import csv
import io
import logging
from collections import Counter
from dataclasses import dataclass, field
from itertools import product as cartesian
from math import prod
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from core.errors import ConsistencyError, ValidationError
from core.exactlinalg import INTEGERS, CoefficientRing, as_matrix, rank, rank_mod
from core.indexed import IndexPair, index_pairs, interleave_sign
from core.kalgebra import (
    HochsterClass,
    ProductFlavor,
    TotalComplex,
    class_product,
    free_region,
    gate,
    total_complex,
)
from core.metadata import parse_ring
from core.pairs import ALPHA, GAMMA, UNIT, PairData, PairProduct, classify, dual_product
from core.simplicial import SimplicialComplex, VertexSet

LOGGER = logging.getLogger(__name__)

Labels = Tuple[str, ...]
Products = Dict[Tuple[int, int], Dict[int, object]]

AUTO = "auto"

RIGHT_PREFERENCE = (
    ProductFlavor.RIGHT_SPECIAL,
    ProductFlavor.RIGHT_STRICTLY_NORMAL,
    ProductFlavor.RIGHT_WEAKLY_SPECIAL,
    ProductFlavor.RIGHT_NORMAL,
)
PREFERENCE = (ProductFlavor.SPECIAL, ProductFlavor.NORMAL)


@dataclass(frozen=True)
class BasisElement:
    index: IndexPair
    k_class: HochsterClass
    pair_labels: Labels
    degree: int

    @property
    def slot(self) -> int:
        return next(i for i, c in enumerate(self.k_class.coords) if c)

    @property
    def key(self) -> Tuple:
        return (self.index, self.k_class.degree, self.slot, self.pair_labels)

    def describe(self) -> str:
        pair = "⊗".join(self.pair_labels) if self.pair_labels else "-"
        return f"{self.index.label()} H{self.k_class.degree}#{self.slot} {pair}"


# --- pair preparation and flavors -----------------------------------------------------

def replicate_pairs(pairs: Sequence[PairData], m: int) -> List[PairData]:
    """One pair per vertex; a single pair stands for Z(K; X, A) and is repeated."""
    pairs = list(pairs)
    if len(pairs) == 1:
        return pairs * m
    if len(pairs) != m:
        raise ValidationError(f"Expected 1 or {m} pairs, got {len(pairs)}.")
    return pairs


def common_ring(pairs: Sequence[PairData]) -> CoefficientRing:
    rings = {p.ring for p in pairs}
    if len(rings) > 1:
        raise ValidationError(f"Pairs use mixed coefficient rings: {sorted(r.label for r in rings)}.")
    return rings.pop() if rings else INTEGERS


def prepare_pairs(K: SimplicialComplex, pairs: Sequence[PairData]) -> List[PairData]:
    pairs = replicate_pairs(pairs, K.m)
    common_ring(pairs)
    return pairs


def all_mono(pairs: Sequence[PairData]) -> bool:
    return all(not p.alpha for p in pairs)


def select_flavor(pairs: Sequence[PairData], requested: Union[str, ProductFlavor] = AUTO) -> ProductFlavor:
    """The requested flavor after an admissibility check, or the most specific one for AUTO."""
    classes = [classify(p) for p in pairs]
    mono = all_mono(pairs)

    def everyone(flag: str) -> bool:
        return all(c.has(flag) for c in classes)

    if requested == AUTO:
        for flavor in RIGHT_PREFERENCE if mono else PREFERENCE:
            if everyone(flavor.value):
                return flavor
        return ProductFlavor.RIGHT_UNIVERSAL if mono else ProductFlavor.UNIVERSAL

    flavor = ProductFlavor(requested)
    if flavor is ProductFlavor.UNIVERSAL:
        return flavor
    if flavor.is_right and not mono:
        raise ValidationError(f"Flavor {flavor.value} needs every pair to have an injective i*.")
    if flavor is ProductFlavor.RIGHT_UNIVERSAL:
        return flavor
    flag = ProductFlavor.RIGHT_SPECIAL.value if flavor is ProductFlavor.RIGHT_SPECIAL_SIGNED else flavor.value
    if not everyone(flag):
        offenders = [p.name for p, c in zip(pairs, classes) if not c.has(flag)]
        raise ValidationError(f"Flavor {flavor.value} is not admissible for pairs {offenders}.")
    return flavor


# --- basis ----------------------------------------------------------------------------

def _family(p: PairData, k: int, index: IndexPair):
    if k in index.sigma:
        return p.alpha
    if k in index.omega:
        return p.gamma
    return p.eta


def label_tuples(pairs: Sequence[PairData], index: IndexPair) -> List[Labels]:
    options = []
    for k, p in enumerate(pairs, start=1):
        family = _family(p, k, index)
        if not family:
            return []
        options.append([g.label for g in family])
    return sorted(cartesian(*options))


def index_of(pairs: Sequence[PairData], labels: Labels) -> IndexPair:
    sigma = tuple(k for k, (p, l) in enumerate(zip(pairs, labels), start=1) if p.letter(l) == ALPHA)
    omega = tuple(k for k, (p, l) in enumerate(zip(pairs, labels), start=1) if p.letter(l) == GAMMA)
    return IndexPair(sigma, omega)


def pair_degree(pairs: Sequence[PairData], labels: Labels) -> int:
    return sum(p.degree(l) for p, l in zip(pairs, labels))


def _world(pairs: Sequence[PairData]) -> str:
    return "R" if all_mono(pairs) else "X"


def build_basis(T: TotalComplex, pairs: Sequence[PairData],
                max_degree: Optional[int] = None) -> Tuple[List[BasisElement], List[int]]:
    """Basis sorted by (σ, ω, K-class position, labels) and the matching orders (0 = free)."""
    basis, orders = [], []
    for index in T.indices:
        tuples = label_tuples(pairs, index)
        if not tuples:
            continue
        piece = T.piece(index)
        if piece is None:
            continue
        for cls in piece.classes():
            slot = next(i for i, c in enumerate(cls.coords) if c)
            for labels in tuples:
                degree = cls.degree + pair_degree(pairs, labels)
                if max_degree is not None and degree > max_degree:
                    continue
                basis.append(BasisElement(index, cls, labels, degree))
                orders.append(piece.order(cls.degree, slot))
    return basis, orders


# --- presentations --------------------------------------------------------------------

@dataclass
class RingPresentation:
    ring: CoefficientRing
    basis: List[BasisElement]
    orders: List[int]
    products: Products
    unit: Optional[int]
    flavor: str = ""
    source: str = "engine"
    max_degree: Optional[int] = None
    relations: List[VertexSet] = field(default_factory=list)

    def degree(self, i: int) -> int:
        return self.basis[i].degree

    def by_degree(self, free_only: bool = False) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {}
        for i, b in enumerate(self.basis):
            if free_only and self.orders[i]:
                continue
            out.setdefault(b.degree, []).append(i)
        return dict(sorted(out.items()))

    def betti(self) -> Dict[int, int]:
        return {d: len(ids) for d, ids in self.by_degree(free_only=True).items()}

    def torsion(self) -> Dict[int, Tuple[int, ...]]:
        out: Dict[int, List[int]] = {}
        for i, b in enumerate(self.basis):
            if self.orders[i]:
                out.setdefault(b.degree, []).append(self.orders[i])
        return {d: tuple(sorted(v)) for d, v in sorted(out.items())}

    def reduce(self, vector: Dict[int, object]) -> Dict[int, object]:
        """Torsion coordinates mod their order; zeros dropped."""
        K = self.ring.domain
        out = {}
        for k, c in vector.items():
            if self.orders[k] and not self.ring.is_field:
                c = K.rem(c, K.convert(self.orders[k]))
            if c:
                out[k] = c
        return out

    def multiply(self, x: Dict[int, object], y: Dict[int, object]) -> Dict[int, object]:
        K = self.ring.domain
        acc: Dict[int, object] = {}
        for i, a in x.items():
            for j, b in y.items():
                for k, c in self.products.get((i, j), {}).items():
                    acc[k] = acc.get(k, K.zero) + a * b * c
        return self.reduce(acc)

    def keyed_products(self) -> Dict[Tuple, Dict[Tuple, object]]:
        """Structure constants keyed by basis keys instead of positions."""
        keys = [b.key for b in self.basis]
        return {
            (keys[i], keys[j]): {keys[k]: c for k, c in terms.items()}
            for (i, j), terms in self.products.items()
        }

    def to_json(self) -> dict:
        py = self.ring.to_python
        return {
            "ring": self.ring.label,
            "source": self.source,
            "flavor": self.flavor,
            "max_degree": self.max_degree,
            "unit": self.unit,
            "basis": [
                {
                    "index": b.index.to_json(),
                    "k_degree": b.k_class.degree,
                    "k_coords": [py(c) for c in b.k_class.coords],
                    "pair": list(b.pair_labels),
                    "degree": b.degree,
                    "order": self.orders[n],
                }
                for n, b in enumerate(self.basis)
            ],
            "torsion": [{"i": n, "order": o} for n, o in enumerate(self.orders) if o],
            "products": [
                {"i": i, "j": j, "terms": [{"k": k, "c": py(c)} for k, c in sorted(terms.items())]}
                for (i, j), terms in sorted(self.products.items())
            ],
            "relations": [list(r) for r in self.relations],
            "betti": {str(d): n for d, n in self.betti().items()},
        }

    @classmethod
    def from_json(cls, data: dict) -> "RingPresentation":
        ring = parse_ring(data["ring"])
        basis, orders = [], []
        for b in data["basis"]:
            index = IndexPair(tuple(b["index"]["sigma"]), tuple(b["index"]["omega"]))
            coords = tuple(ring.from_python(c) for c in b["k_coords"])
            basis.append(BasisElement(index, HochsterClass(index, b["k_degree"], coords), tuple(b["pair"]), b["degree"]))
            orders.append(b["order"])
        products = {
            (p["i"], p["j"]): {t["k"]: ring.from_python(t["c"]) for t in p["terms"]}
            for p in data["products"]
        }
        return cls(
            ring=ring,
            basis=basis,
            orders=orders,
            products=products,
            unit=data.get("unit"),
            flavor=data.get("flavor", ""),
            source=data.get("source", "engine"),
            max_degree=data.get("max_degree"),
            relations=[tuple(r) for r in data.get("relations", [])],
        )


def _unit_position(basis: List[BasisElement]) -> Optional[int]:
    for n, b in enumerate(basis):
        if not b.index.sigma and not b.index.omega and b.k_class.degree == 0 and all(l == UNIT for l in b.pair_labels):
            return n
    return None


# --- groups ---------------------------------------------------------------------------

@dataclass
class GroupTable:
    """Per index: total degree -> (free rank, torsion orders)."""
    ring: CoefficientRing
    entries: Dict[IndexPair, Dict[int, Tuple[int, Tuple[int, ...]]]]

    def betti(self) -> Dict[int, int]:
        out: Counter = Counter()
        for table in self.entries.values():
            for d, (free, _) in table.items():
                out[d] += free
        return {d: n for d, n in sorted(out.items()) if n}

    def torsion(self) -> Dict[int, Tuple[int, ...]]:
        out: Dict[int, List[int]] = {}
        for table in self.entries.values():
            for d, (_, tors) in table.items():
                out.setdefault(d, []).extend(tors)
        return {d: tuple(sorted(v)) for d, v in sorted(out.items()) if v}

    def to_json(self) -> dict:
        return {
            "ring": self.ring.label,
            "indices": [
                {
                    "index": index.to_json(),
                    "degrees": {str(d): {"free": f, "torsion": list(t)} for d, (f, t) in sorted(table.items())},
                }
                for index, table in sorted(self.entries.items())
            ],
            "betti": {str(d): n for d, n in self.betti().items()},
            "torsion": {str(d): list(t) for d, t in self.torsion().items()},
        }


def groups(K: SimplicialComplex, pairs: Sequence[PairData]) -> GroupTable:
    """Additive structure: each Hochster piece tensored with its free pair sector."""
    pairs = prepare_pairs(K, pairs)
    ring = common_ring(pairs)
    for p in pairs:
        classify(p)
    T = total_complex(K, _world(pairs), ring)
    entries = {}
    for index in T.indices:
        tuples = label_tuples(pairs, index)
        if not tuples:
            continue
        piece = T.piece(index)
        if piece is None:
            continue
        sector = Counter(pair_degree(pairs, labels) for labels in tuples)
        table: Dict[int, Tuple[int, Tuple[int, ...]]] = {}
        for d, s in piece.summary.degrees.items():
            if not s.size:
                continue
            for e, n in sector.items():
                free, tors = table.get(d + e, (0, ()))
                table[d + e] = (free + s.free_rank * n, tuple(sorted(tors + s.torsion * n)))
        if table:
            entries[index] = table
    LOGGER.debug("groups: %d contributing indices", len(entries))
    return GroupTable(ring, entries)


# --- ring -----------------------------------------------------------------------------

class _Multiplier:
    """Structure constants for one (K, pairs, flavor)."""

    def __init__(self, T: TotalComplex, pairs: Sequence[PairData], flavor: ProductFlavor,
                 basis: List[BasisElement], max_degree: Optional[int]):
        self.T = T
        self.pairs = list(pairs)
        self.flavor = flavor
        self.tables: List[PairProduct] = [dual_product(p) for p in self.pairs]
        self.positions = {b.key: n for n, b in enumerate(basis)}
        self.max_degree = max_degree
        self.K = T.ring.domain
        self._k_cache: Dict[Tuple, Optional[HochsterClass]] = {}

    def _k_product(self, target: IndexPair, a: HochsterClass, b: HochsterClass) -> Optional[HochsterClass]:
        key = (target, a, b)
        if key not in self._k_cache:
            self._k_cache[key] = class_product(self.T, target, a, b)
        return self._k_cache[key]

    def _pair_sign(self, a: BasisElement, b: BasisElement, labels: Labels, target: IndexPair) -> int:
        left = [p.degree(l) for p, l in zip(self.pairs, a.pair_labels)]
        right = [p.degree(l) for p, l in zip(self.pairs, b.pair_labels)]
        out = [p.degree(l) for p, l in zip(self.pairs, labels)]
        s = b.k_class.degree * sum(left)
        s += sum(sum(out[: i - 1]) for i in free_region(target, a.index, b.index))
        return (-1 if s % 2 else 1) * interleave_sign(left, right)

    def multiply(self, a: BasisElement, b: BasisElement) -> Dict[int, object]:
        options = []
        for table, l, r in zip(self.tables, a.pair_labels, b.pair_labels):
            out = table.product(l, r)
            if not out:
                return {}
            options.append(sorted(out.items()))
        K = self.K
        acc: Dict[int, object] = {}
        for choice in cartesian(*options):
            labels = tuple(t for t, _ in choice)
            target = index_of(self.pairs, labels)
            if not gate(self.flavor, target, a.index, b.index):
                continue
            cls = self._k_product(target, a.k_class, b.k_class)
            if cls is None or cls.is_zero():
                continue
            coef = K.convert(prod(c for _, c in choice) * self._pair_sign(a, b, labels, target))
            for slot, x in enumerate(cls.coords):
                if not x:
                    continue
                n = self.positions.get((target, cls.degree, slot, labels))
                if n is None:
                    if self.max_degree is not None and cls.degree + pair_degree(self.pairs, labels) > self.max_degree:
                        continue
                    raise ConsistencyError(f"Product of {a.describe()} and {b.describe()} left the basis.")
                acc[n] = acc.get(n, K.zero) + coef * x
        return acc


def ring(K: SimplicialComplex, pairs: Sequence[PairData],
         flavor: Union[str, ProductFlavor] = AUTO, max_degree: Optional[int] = None) -> RingPresentation:
    pairs = prepare_pairs(K, pairs)
    coeffs = common_ring(pairs)
    chosen = select_flavor(pairs, flavor)
    T = total_complex(K, _world(pairs), coeffs)
    basis, orders = build_basis(T, pairs, max_degree)
    R = RingPresentation(coeffs, basis, orders, {}, _unit_position(basis), chosen.value, "engine", max_degree)
    mult = _Multiplier(T, pairs, chosen, basis, max_degree)
    for i, a in enumerate(basis):
        for j, b in enumerate(basis):
            if max_degree is not None and a.degree + b.degree > max_degree:
                continue
            terms = R.reduce(mult.multiply(a, b))
            for k in terms:
                if basis[k].degree != a.degree + b.degree:
                    raise ConsistencyError(f"Product {a.describe()} * {b.describe()} does not preserve degree.")
            if terms:
                R.products[(i, j)] = terms
    LOGGER.debug("ring: %d basis elements, %d nonzero products, flavor %s", len(basis), len(R.products), chosen.value)
    return R


def stanley_reisner(K: SimplicialComplex, pairs: Sequence[PairData],
                    max_degree: Optional[int] = None) -> RingPresentation:
    """Tensor product of the H*(X_k) modulo the monomials of non-faces."""
    pairs = prepare_pairs(K, pairs)
    coeffs = common_ring(pairs)
    for p in pairs:
        if not classify(p).has("epi"):
            raise ValidationError(f"Pair {p.name} is not epi (i* is not onto); no Stanley-Reisner form.")
    D = coeffs.domain
    basis, orders = [], []
    for index in index_pairs(K.m, "X"):
        if index.omega or index.sigma not in K.face_set:
            continue
        cls = HochsterClass(index, 0, (D.one,))
        for labels in label_tuples(pairs, index):
            degree = pair_degree(pairs, labels)
            if max_degree is None or degree <= max_degree:
                basis.append(BasisElement(index, cls, labels, degree))
                orders.append(0)
    R = RingPresentation(coeffs, basis, orders, {}, _unit_position(basis), "", "stanley_reisner",
                         max_degree, K.minimal_nonfaces())
    positions = {b.pair_labels: n for n, b in enumerate(basis)}
    tables = [dual_product(p) for p in pairs]
    for i, a in enumerate(basis):
        for j, b in enumerate(basis):
            options = [sorted(t.product(l, r).items()) for t, l, r in zip(tables, a.pair_labels, b.pair_labels)]
            if not all(options):
                continue
            left = [p.degree(l) for p, l in zip(pairs, a.pair_labels)]
            right = [p.degree(l) for p, l in zip(pairs, b.pair_labels)]
            sign = interleave_sign(left, right)
            acc: Dict[int, object] = {}
            for choice in cartesian(*options):
                labels = tuple(t for t, _ in choice)
                n = positions.get(labels)
                if n is None:
                    continue  # support is a non-face, or above max_degree
                acc[n] = acc.get(n, D.zero) + D.convert(sign * prod(c for _, c in choice))
            acc = {k: c for k, c in acc.items() if c}
            if acc:
                R.products[(i, j)] = acc
    return R


# --- fingerprints ---------------------------------------------------------------------

Bidegree = Tuple[int, int]


@dataclass
class Fingerprint:
    ring: str
    betti: Dict[int, int]
    torsion: Dict[int, Tuple[int, ...]]
    mult_ranks: Dict[Bidegree, int]
    right_ranks: Dict[Bidegree, int]
    image_ranks: Dict[Bidegree, int]
    mod_ranks: Dict[int, Dict[Bidegree, int]] = field(default_factory=dict)

    def differences(self, other: "Fingerprint") -> List[str]:
        out = []
        for name in ("betti", "torsion", "mult_ranks", "image_ranks", "mod_ranks"):
            mine, theirs = getattr(self, name), getattr(other, name)
            if mine != theirs:
                keys = sorted(set(mine) | set(theirs), key=repr)
                detail = [f"{k}: {mine.get(k)} vs {theirs.get(k)}" for k in keys if mine.get(k) != theirs.get(k)]
                out.append(f"{name} differ ({'; '.join(detail)})")
        return out

    def to_json(self) -> dict:
        def pq(table):
            return {f"{p},{q}": r for (p, q), r in sorted(table.items())}

        return {
            "ring": self.ring,
            "betti": {str(d): n for d, n in sorted(self.betti.items())},
            "torsion": {str(d): list(t) for d, t in sorted(self.torsion.items())},
            "mult_ranks": pq(self.mult_ranks),
            "right_ranks": pq(self.right_ranks),
            "image_ranks": pq(self.image_ranks),
            "mod_ranks": {str(p): pq(t) for p, t in sorted(self.mod_ranks.items())},
        }


def _flattening(R: RingPresentation, rows_ids, col_ids, target_ids, left: bool) -> List[List]:
    K = R.ring.domain
    out = []
    for r in rows_ids:
        row = []
        for c in col_ids:
            key = (r, c) if left else (c, r)
            terms = R.products.get(key, {})
            row.extend(terms.get(t, K.zero) for t in target_ids)
        out.append(row)
    return out


def _rank_over_ring(R: RingPresentation, rows: List[List], ncols: int) -> int:
    if not rows or not ncols:
        return 0
    return rank(as_matrix(rows, (len(rows), ncols), R.ring.domain))


def fingerprint(R: RingPresentation, primes: Iterable[int] = (2, 3)) -> Fingerprint:
    """Basis-free invariants: Betti and torsion tables, plus ranks of every
    graded multiplication map on the free part."""
    free = R.by_degree(free_only=True)
    primes = list(primes) if not R.ring.is_field else []
    fp = Fingerprint(R.ring.label, R.betti(), R.torsion(), {}, {}, {}, {p: {} for p in primes})
    for p, ids_p in free.items():
        for q, ids_q in free.items():
            if R.max_degree is not None and p + q > R.max_degree:
                continue
            targets = free.get(p + q, [])
            ncols = len(ids_q) * len(targets)
            left = _flattening(R, ids_p, ids_q, targets, left=True)
            right = _flattening(R, ids_q, ids_p, targets, left=False)
            image = [[R.products.get((i, j), {}).get(t, R.ring.domain.zero) for t in targets]
                     for i in ids_p for j in ids_q]
            fp.mult_ranks[(p, q)] = _rank_over_ring(R, left, ncols)
            fp.right_ranks[(p, q)] = _rank_over_ring(R, right, len(ids_p) * len(targets))
            fp.image_ranks[(p, q)] = _rank_over_ring(R, image, len(targets))
            for prime in primes:
                ints = [[int(x) for x in row] for row in left]
                fp.mod_ranks[prime][(p, q)] = rank_mod(ints, (len(ints), ncols), prime) if ints and ncols else 0
    return fp


# --- exports --------------------------------------------------------------------------

def betti_csv(betti: Dict[int, int], torsion: Dict[int, Tuple[int, ...]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["degree", "betti", "torsion"])
    for d in sorted(set(betti) | set(torsion)):
        writer.writerow([d, betti.get(d, 0), " ".join(map(str, torsion.get(d, ())))])
    return buf.getvalue()
