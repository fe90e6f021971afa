# core/exactlinalg.py
"""Exact linear algebra over Z, Q and F_p.

Smith normal form with tracked unimodular transforms, (co)homology of a
finite free complex and coordinates of a (co)cycle in the chosen basis.
Matrices travel as sympy ``DomainMatrix``; bookkeeping after the
factorization runs on row lists of domain elements.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from sympy import Rational, isprime
from sympy.polys.domains import GF, QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp

from core.errors import ConsistencyError, ValidationError

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoefficientRing:
    kind: str  # "Z", "Q" or "Fp"
    p: int = 0

    def __post_init__(self):
        if self.kind not in ("Z", "Q", "Fp"):
            raise ValidationError(f"Unknown coefficient ring '{self.kind}'.")
        if self.kind == "Fp" and not isprime(self.p):
            raise ValidationError(f"Fp:{self.p} needs a prime characteristic.")

    @property
    def domain(self):
        if self.kind == "Z":
            return ZZ
        if self.kind == "Q":
            return QQ
        return GF(self.p)

    @property
    def is_field(self) -> bool:
        return self.kind != "Z"

    @property
    def label(self) -> str:
        return f"Fp:{self.p}" if self.kind == "Fp" else self.kind

    def convert(self, n):
        return self.domain.convert(n)

    def to_python(self, x):
        """Domain element -> int (or 'a/b' string for non-integral rationals)."""
        K = self.domain
        if self.kind == "Z":
            return int(x)
        value = K.to_sympy(x)
        if self.kind == "Fp":
            return int(value) % self.p
        if value.q == 1:
            return int(value.p)
        return f"{value.p}/{value.q}"

    def from_python(self, value):
        """Inverse of ``to_python``."""
        if isinstance(value, str):
            return self.domain.from_sympy(Rational(value))
        return self.domain.convert(int(value))


INTEGERS = CoefficientRing("Z")
RATIONALS = CoefficientRing("Q")


def zero_matrix(rows: int, cols: int, K) -> DomainMatrix:
    return DomainMatrix.zeros((rows, cols), K)


def identity(n: int, K) -> DomainMatrix:
    if n == 0:
        return zero_matrix(0, 0, K)
    return DomainMatrix.eye(n, K)


def as_matrix(rows: List[List], shape: Tuple[int, int], K) -> DomainMatrix:
    if 0 in shape:
        return zero_matrix(shape[0], shape[1], K)
    return DomainMatrix([list(r) for r in rows], shape, K)


def as_rows(M: DomainMatrix) -> List[List]:
    nrows, ncols = M.shape
    if nrows == 0 or ncols == 0:
        return [[M.domain.zero] * ncols for _ in range(nrows)]
    return [list(r) for r in M.to_dense().to_list()]


def matvec(rows: Sequence[Sequence], v: Sequence, K) -> List:
    out = []
    for row in rows:
        acc = K.zero
        for a, b in zip(row, v):
            if a and b:
                acc += a * b
        out.append(acc)
    return out


def matmul(A: DomainMatrix, B: DomainMatrix) -> DomainMatrix:
    if A.shape[1] != B.shape[0]:
        raise ConsistencyError(f"Shape mismatch {A.shape} x {B.shape}.")
    if 0 in A.shape or 0 in B.shape:
        return zero_matrix(A.shape[0], B.shape[1], A.domain)
    return A * B


def is_zero(M: DomainMatrix) -> bool:
    if 0 in M.shape:
        return True
    return M.is_zero_matrix


def rank(M: DomainMatrix) -> int:
    """Rank over the fraction field of the matrix domain."""
    if 0 in M.shape:
        return 0
    if M.domain == ZZ:
        return M.convert_to(QQ).rank()
    return M.rank()


def rank_mod(rows: List[List[int]], shape: Tuple[int, int], p: int) -> int:
    K = GF(p)
    M = as_matrix([[K.convert(int(x)) for x in r] for r in rows], shape, K)
    return rank(M)


def rank_over(rows: List[List], shape: Tuple[int, int], ring: CoefficientRing) -> int:
    K = ring.domain
    M = as_matrix([[K.convert(x) for x in r] for r in rows], shape, K)
    return rank(M)


@dataclass
class SNFactorization:
    """U·A·V = S with U, V invertible over the base ring.

    ``invariants`` are the nonzero diagonal entries d_1 | d_2 | ...;
    the inverse transforms are kept for change of basis.
    """
    A: DomainMatrix
    U: DomainMatrix
    S: DomainMatrix
    V: DomainMatrix
    U_inv: DomainMatrix
    V_inv: DomainMatrix
    invariants: Tuple

    @property
    def rank(self) -> int:
        return len(self.invariants)

    def verify(self):
        K = self.A.domain
        rows, cols = self.A.shape
        if as_rows(matmul(matmul(self.U, self.A), self.V)) != as_rows(self.S):
            raise ConsistencyError("U·A·V differs from S.")
        if as_rows(matmul(self.U, self.U_inv)) != as_rows(identity(rows, K)):
            raise ConsistencyError("U_inv is not the inverse of U.")
        if as_rows(matmul(self.V_inv, self.V)) != as_rows(identity(cols, K)):
            raise ConsistencyError("V_inv is not the inverse of V.")
        for a, b in zip(self.invariants, self.invariants[1:]):
            if K.rem(b, a):
                raise ConsistencyError("Diagonal entries break the divisibility chain.")


def _inverse(M: DomainMatrix) -> DomainMatrix:
    """Inverse of a unimodular (or field) matrix, computed over the fraction field."""
    K = M.domain
    n = M.shape[0]
    if n == 0:
        return identity(0, K)
    F = K.get_field()
    inv = M.convert_to(F).inv()
    return inv if F == K else inv.convert_to(K)


def _integer_decomposition(A: DomainMatrix):
    K = A.domain
    nrows, ncols = A.shape
    _, s, t = smith_normal_decomp(A)
    U = [[K.convert(x) for x in row] for row in s.to_list()]
    V = [[K.convert(x) for x in row] for row in t.to_list()]
    S = as_rows(matmul(matmul(as_matrix(U, (nrows, nrows), K), A), as_matrix(V, (ncols, ncols), K)))
    # unit normalization: nonnegative diagonal
    for i in range(min(nrows, ncols)):
        if int(S[i][i]) < 0:
            U[i] = [-x for x in U[i]]
            S[i] = [-x for x in S[i]]
    return U, S, V


def _field_decomposition(A: DomainMatrix):
    """Gaussian elimination: rref of [A | I] gives U with U·A = R, then V clears R's non-pivot columns."""
    K = A.domain
    nrows, ncols = A.shape
    eye = as_rows(identity(nrows, K))
    augmented = as_matrix(
        [row + eye[i] for i, row in enumerate(as_rows(A))], (nrows, ncols + nrows), K
    )
    reduced, pivots = augmented.rref()
    R = as_rows(reduced)
    pivots = [p for p in pivots if p < ncols]
    U = [row[ncols:] for row in R]
    order = pivots + [j for j in range(ncols) if j not in pivots]
    V = [[K.zero] * ncols for _ in range(ncols)]
    for t, j in enumerate(order):
        V[j][t] = K.one
        if t >= len(pivots):
            for i, p in enumerate(pivots):
                V[p][t] = -R[i][j]
    S = as_rows(matmul(matmul(as_matrix(U, (nrows, nrows), K), A), as_matrix(V, (ncols, ncols), K)))
    return U, S, V


def smith_normal_form(A: DomainMatrix, check: bool = True) -> SNFactorization:
    """Smith normal form over Z, or echelon diagonalization over a field.

    Over Z the transforms come from sympy's ``smith_normal_decomp``; over a
    field from ``rref``. Both are deterministic, so identical inputs give
    identical transforms and hence identical bases.
    """
    K = A.domain
    nrows, ncols = A.shape
    if nrows == 0 or ncols == 0 or is_zero(A):
        U = as_rows(identity(nrows, K))
        S = as_rows(zero_matrix(nrows, ncols, K))
        V = as_rows(identity(ncols, K))
    elif K.is_Field:
        U, S, V = _field_decomposition(A)
    else:
        U, S, V = _integer_decomposition(A)
    U_m = as_matrix(U, (nrows, nrows), K)
    V_m = as_matrix(V, (ncols, ncols), K)
    if any(S[i][j] for i in range(nrows) for j in range(ncols) if i != j):
        raise ConsistencyError("U·A·V is not diagonal.")
    diagonal = [S[i][i] for i in range(min(nrows, ncols))]
    invariants = tuple(d for d in diagonal if d)
    if any(diagonal[len(invariants):]):
        raise ConsistencyError("Zero diagonal entries precede nonzero ones.")
    snf = SNFactorization(
        A=A,
        U=U_m,
        S=as_matrix(S, A.shape, K),
        V=V_m,
        U_inv=_inverse(U_m),
        V_inv=_inverse(V_m),
        invariants=invariants,
    )
    if check:
        snf.verify()
    return snf


@dataclass
class CochainComplex:
    """Finite free complex; ``maps[d]`` leaves degree d.

    direction "cochain": maps[d]: C^d -> C^{d+1}, shape (dims[d+1], dims[d]).
    direction "chain":   maps[d]: C_d -> C_{d-1}, shape (dims[d-1], dims[d]).
    Missing maps are zero.
    """
    ring: CoefficientRing
    dims: Tuple[int, ...]
    maps: Dict[int, DomainMatrix] = field(default_factory=dict)
    direction: str = "cochain"

    def outgoing(self, d: int) -> DomainMatrix:
        target = d + 1 if self.direction == "cochain" else d - 1
        if d in self.maps:
            return self.maps[d]
        return zero_matrix(self.dim(target), self.dim(d), self.ring.domain)

    def incoming(self, d: int) -> DomainMatrix:
        source = d - 1 if self.direction == "cochain" else d + 1
        if source in self.maps:
            return self.maps[source]
        return zero_matrix(self.dim(d), self.dim(source), self.ring.domain)

    def dim(self, d: int) -> int:
        return self.dims[d] if 0 <= d < len(self.dims) else 0

    def check_square_zero(self):
        for d in range(len(self.dims)):
            nxt = d + 1 if self.direction == "cochain" else d - 1
            if not is_zero(matmul(self.outgoing(nxt), self.outgoing(d))):
                raise ValidationError(f"Differential squares to a nonzero map at degree {d}.")


@dataclass
class DegreeSummary:
    degree: int
    free_rank: int
    torsion: Tuple[int, ...]
    reps: List[List]  # free representatives, then torsion representatives
    _P: List[List]
    _orders: Tuple
    _kernel_inv: List[List]
    _kernel_rank: int
    _ring: CoefficientRing

    @property
    def size(self) -> int:
        return len(self.reps)

    @property
    def torsion_slots(self) -> List[int]:
        return [i for i, d in enumerate(self._orders) if not self._is_unit(d)]

    def _is_unit(self, d) -> bool:
        return self._ring.is_field or abs(int(d)) == 1

    def coordinates(self, z: Sequence) -> List:
        """Coordinates of cocycle z: free part first, then torsion mod order."""
        K = self._ring.domain
        y = matvec(self._P, z, K)
        r = len(self._orders)
        w = matvec(self._kernel_inv, y[r:], K)
        if any(w[: self._kernel_rank]):
            raise ValidationError(f"Vector is not a cycle in degree {self.degree}.")
        coords = list(w[self._kernel_rank:])
        for i in self.torsion_slots:
            coords.append(K.rem(y[i], self._orders[i]))
        return coords


@dataclass
class HomologySummary:
    ring: CoefficientRing
    degrees: Dict[int, DegreeSummary]

    def betti(self) -> Dict[int, int]:
        return {d: s.free_rank for d, s in self.degrees.items() if s.free_rank}

    def torsion(self) -> Dict[int, Tuple[int, ...]]:
        return {d: s.torsion for d, s in self.degrees.items() if s.torsion}

    def total_size(self) -> int:
        return sum(s.size for s in self.degrees.values())


def _degree_summary(C: CochainComplex, d: int) -> DegreeSummary:
    ring, K = C.ring, C.ring.domain
    n = C.dim(d)
    A, B = C.incoming(d), C.outgoing(d)
    first = smith_normal_form(A)
    r = first.rank
    P, P_inv = as_rows(first.U), as_rows(first.U_inv)
    E = as_rows(matmul(B, first.U_inv))
    if any(E[i][j] for i in range(len(E)) for j in range(r)):
        raise ValidationError(f"Differential squares to a nonzero map at degree {d}.")
    E_rest = [row[r:] for row in E]
    second = smith_normal_form(as_matrix(E_rest, (B.shape[0], n - r), K))
    r2 = second.rank
    V, V_inv = as_rows(second.V), as_rows(second.V_inv)

    reps = []
    for t in range(r2, n - r):
        q = [K.zero] * r + [V[i][t] for i in range(n - r)]
        reps.append(matvec(P_inv, q, K))
    torsion = []
    for i, order in enumerate(first.invariants):
        if ring.is_field or abs(int(order)) == 1:
            continue
        reps.append([P_inv[row][i] for row in range(n)])
        torsion.append(int(order))
    return DegreeSummary(
        degree=d,
        free_rank=n - r - r2,
        torsion=tuple(torsion),
        reps=reps,
        _P=P,
        _orders=first.invariants,
        _kernel_inv=V_inv,
        _kernel_rank=r2,
        _ring=ring,
    )


def homology(C: CochainComplex) -> HomologySummary:
    """(Co)homology of C with representatives and coordinate data per degree."""
    C.check_square_zero()
    degrees = {d: _degree_summary(C, d) for d in range(len(C.dims))}
    LOGGER.debug(
        "homology over %s: free %s torsion %s",
        C.ring.label,
        {d: s.free_rank for d, s in degrees.items()},
        {d: s.torsion for d, s in degrees.items() if s.torsion},
    )
    return HomologySummary(ring=C.ring, degrees=degrees)


def coordinates(summary: HomologySummary, degree: int, z: Sequence) -> List:
    if degree not in summary.degrees:
        if any(z):
            raise ValidationError(f"No cochains in degree {degree}.")
        return []
    return summary.degrees[degree].coordinates(z)
