# core/trials.py
import logging
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, List, Optional, Sequence

from core.engine import fingerprint, groups, ring
from core.errors import ConsistencyError, ValidationError
from core.exactlinalg import INTEGERS, CoefficientRing
from core.kalgebra import ProductFlavor
from core.koszul_oracle import compare, koszul_ring
from core.metadata import random_facets
from core.pairs import PairData, disk_sphere
from core.simplicial import SimplicialComplex, complex_to_json, subsets

LOGGER = logging.getLogger(__name__)


def random_complex(m: int, rng: random.Random, density: float = 0.5) -> SimplicialComplex:
    """Never void; vertices missed by every facet are ghosts."""
    if m < 1:
        raise ValidationError("Random complexes need m >= 1.")
    return SimplicialComplex(m, random_facets(m, rng, density))


def all_complexes(m: int) -> Iterator[SimplicialComplex]:
    """Every nonvoid complex on [m], ghost vertices allowed, smallest facet lists first."""
    if m > 4:
        raise ValidationError("Exhaustive enumeration is limited to m <= 4.")
    candidates = [s for s in subsets(tuple(range(1, m + 1))) if s]
    seen = set()
    for count in range(len(candidates) + 1):
        for facets in combinations(candidates, count):
            if any(set(a) < set(b) for a in facets for b in facets):
                continue
            K = SimplicialComplex(m, facets)
            if K.facets in seen:
                continue
            seen.add(K.facets)
            yield K


@dataclass
class TrialResult:
    trial: int
    complex: SimplicialComplex
    status: str  # "ok", "mismatch" or "error"
    details: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"trial": self.trial, "complex": complex_to_json(self.complex),
                "status": self.status, "details": self.details}


@dataclass
class OracleReport:
    m: int
    seed: int
    ring: str
    results: List[TrialResult] = field(default_factory=list)

    @property
    def mismatches(self) -> List[TrialResult]:
        return [r for r in self.results if r.status != "ok"]

    @property
    def all_equal(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {
            "m": self.m, "seed": self.seed, "ring": self.ring,
            "trials": len(self.results), "all_equal": self.all_equal,
            "results": [r.to_json() for r in self.results],
        }


def oracle_check(m: int, trials: int, seed: int, ring_: CoefficientRing = INTEGERS,
                 primes: Sequence[int] = (2, 3)) -> OracleReport:
    """Engine (D², S¹, universal) against the Koszul oracle on seeded random complexes."""
    rng = random.Random(seed)
    pair = disk_sphere(2).with_ring(ring_)
    report = OracleReport(m, seed, ring_.label)
    for t in range(1, trials + 1):
        K = random_complex(rng.randint(1, m), rng)
        try:
            engine_ring = ring(K, [pair], ProductFlavor.UNIVERSAL)
            result = compare(engine_ring, koszul_ring(K, ring_), primes)
            betti = groups(K, [pair]).betti()
            details = list(result.differences)
            if betti != engine_ring.betti():
                details.append(f"groups betti {betti} differ from ring betti {engine_ring.betti()}")
            status = "ok" if not details else "mismatch"
            report.results.append(TrialResult(t, K, status, details))
        except (ValidationError, ConsistencyError) as e:
            LOGGER.warning("trial %d on %s failed: %s", t, K.describe(), e)
            report.results.append(TrialResult(t, K, "error", [str(e)]))
            continue
    return report


@dataclass
class SeparationReport:
    pair_a: str
    pair_b: str
    max_m: int
    ring: str
    candidates: int = 0
    witness: Optional[dict] = None
    evidence: List[dict] = field(default_factory=list)

    @property
    def separated(self) -> bool:
        return self.witness is not None

    def to_json(self) -> dict:
        return {
            "pair_a": self.pair_a, "pair_b": self.pair_b, "max_m": self.max_m, "ring": self.ring,
            "candidates": self.candidates, "separated": self.separated,
            "witness": self.witness,
            "verdict": "separated" if self.separated else "no candidate separated the two rings",
            "evidence": self.evidence,
        }


def separate(pair_a: PairData, pair_b: PairData, max_m: int = 4, ring_: CoefficientRing = INTEGERS,
             primes: Sequence[int] = (2, 3), stop_at_first: bool = True,
             complexes: Optional[Iterable[SimplicialComplex]] = None) -> SeparationReport:
    """Search small complexes for equal Betti tables but different fingerprints.

    Without ``complexes`` every complex on up to ``max_m`` vertices is tried.
    """
    a, b = pair_a.with_ring(ring_), pair_b.with_ring(ring_)
    report = SeparationReport(pair_a.name, pair_b.name, max_m, ring_.label)
    if complexes is None:
        complexes = (K for m in range(1, max_m + 1) for K in all_complexes(m))
    for K in complexes:
        report.candidates += 1
        fa = fingerprint(ring(K, [a], ProductFlavor.UNIVERSAL), primes)
        fb = fingerprint(ring(K, [b], ProductFlavor.UNIVERSAL), primes)
        same_groups = fa.betti == fb.betti and fa.torsion == fb.torsion
        diffs = fa.differences(fb)
        entry = {
            "complex": complex_to_json(K),
            "groups_equal": same_groups,
            "fingerprints_equal": not diffs,
            "differences": diffs,
        }
        report.evidence.append(entry)
        if same_groups and diffs and report.witness is None:
            report.witness = {**entry, "fingerprint_a": fa.to_json(), "fingerprint_b": fb.to_json()}
            LOGGER.info("separating complex found: %s", K.describe())
            if stop_at_first:
                return report
    return report
