#!/usr/bin/env python3
"""
Topology Tools - Chern-Class Scans, Seifert Filters and Gysin Betti Numbers

Exact (integer/rational) machinery for building T²-bundles over
Calabi–Yau 3-folds:
  - integral vectors orthogonal to a Kähler class under a rational
    intersection form, with primitive candidates enumerated from the
    kernel lattice
  - the coprimality test deciding smoothness of Seifert bundles over
    weighted projective orbifolds
  - Betti numbers of circle bundles (and T²-bundles, iterating) from cup
    product ranks through the Gysin sequence
  - the necessary admissibility conditions for a pair of Chern classes

No floats are used anywhere in this module.

Usage:
    from topology_tools import IntersectionLattice, KahlerVector, chern_scan
    L = IntersectionLattice.diagonal([1, -1, -1, -1])
    result = chern_scan(L, KahlerVector((3, 1, 1, 1)))
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import sympy as sp
from sympy.core.intfunc import igcdex
from sympy.matrices.normalforms import hermite_normal_form

from exterior_core import GeometryError, to_scalar


# ============================================================================
# ERRORS
# ============================================================================

class DegenerateKahler(GeometryError):
    pass


class NoSolutions(GeometryError):
    pass


class InconsistentRanks(GeometryError):
    pass


class InvalidWeight(GeometryError):
    pass


# ============================================================================
# LATTICES
# ============================================================================

@dataclass(frozen=True)
class IntersectionLattice:
    """Symmetric rational intersection form on H² with optional basis labels."""
    Q: tuple
    labels: tuple = ()

    def __post_init__(self):
        Q = tuple(tuple(to_scalar(x) for x in row) for row in self.Q)
        m = len(Q)
        if m == 0 or any(len(row) != m for row in Q):
            raise GeometryError("intersection form must be a nonempty square matrix")
        if any(isinstance(x, float) for row in Q for x in row):
            raise GeometryError("intersection forms are rational, not floating point")
        if any(Q[i][j] != Q[j][i] for i in range(m) for j in range(m)):
            raise GeometryError("intersection form must be symmetric")
        labels = tuple(self.labels) or tuple(f"x{i + 1}" for i in range(m))
        if len(labels) != m:
            raise GeometryError(f"{len(labels)} labels for a rank-{m} lattice")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def diagonal(cls, entries, labels=()):
        m = len(entries)
        return cls(tuple(tuple(entries[i] if i == j else 0 for j in range(m)) for i in range(m)), labels)

    @property
    def size(self):
        return len(self.Q)

    @property
    def rank(self):
        return sp.Matrix(self.Q).rank()

    @property
    def clearing_factor(self):
        """lcm of the denominators of Q."""
        return math.lcm(*(x.denominator for row in self.Q for x in row))

    def pair(self, a, b):
        return sum((a[i] * self.Q[i][j] * b[j] for i in range(self.size) for j in range(self.size)), Fraction(0))


@dataclass(frozen=True)
class KahlerVector:
    coords: tuple

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        if not any(coords):
            raise DegenerateKahler("the Kähler vector is zero")
        object.__setattr__(self, "coords", coords)


@dataclass(frozen=True)
class ChernCandidate:
    """Integral class with its primitivity and the coprimality moduli it passed."""
    vector: tuple
    moduli: dict = field(default_factory=dict)

    def __post_init__(self):
        vector = tuple(int(c) for c in self.vector)
        if not any(vector):
            raise GeometryError("a Chern candidate must be nonzero")
        object.__setattr__(self, "vector", vector)

    @property
    def primitive(self):
        return math.gcd(*self.vector) == 1


def primitive_part(v):
    g = math.gcd(*v)
    return tuple(x // g for x in v) if g else tuple(v)


# ============================================================================
# INTEGER KERNELS
# ============================================================================

def _column_reduce(rows):
    """
    Unimodular column operations A·U = [H | 0]; returns (rank, U).

    Each step replaces a column pair by an extended-gcd combination, so U
    stays unimodular and the trailing columns of U span the integer kernel.
    """
    A = [list(map(int, row)) for row in rows]
    n = len(A[0])
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def combine(M, c1, c2, x, y, u, v):
        for row in M:
            a, b = row[c1], row[c2]
            row[c1], row[c2] = x * a + y * b, u * a + v * b

    pivot = 0
    for i in range(len(A)):
        if pivot == n:
            break
        for j in range(pivot + 1, n):
            a, b = A[i][pivot], A[i][j]
            if b == 0:
                continue
            x, y, g = igcdex(a, b)
            x, y, g = int(x), int(y), int(g)
            # [[x, −b/g], [y, a/g]] has determinant 1
            combine(A, pivot, j, x, y, -b // g, a // g)
            combine(U, pivot, j, x, y, -b // g, a // g)
        if A[i][pivot] != 0:
            pivot += 1
    return pivot, U


def hermite_kernel(rows):
    """
    Z-basis of {a ∈ Zⁿ : rows·a = 0}, canonicalized by sympy's column
    Hermite normal form. Returned as a tuple of integer tuples.
    """
    if not rows or not rows[0]:
        raise GeometryError("kernel of an empty matrix")
    rank, U = _column_reduce(rows)
    n = len(U)
    if rank == n:
        return ()
    K = sp.Matrix([[U[i][j] for j in range(rank, n)] for i in range(n)])
    H = hermite_normal_form(K)
    return tuple(tuple(int(H[i, j]) for i in range(H.rows)) for j in range(H.cols))


def integer_rank(vectors):
    return sp.Matrix(list(vectors)).rank() if vectors else 0


# ============================================================================
# CHERN-CLASS SCAN
# ============================================================================

def orthogonality_row(L, k):
    """
    The primitive integer row w with {a : aᵀQk = 0} = {a : w·a = 0}.

    Raises:
        DegenerateKahler: Qk = 0
    """
    factor = L.clearing_factor
    w = [sum((L.Q[i][j] * k.coords[j] for j in range(L.size)), Fraction(0)) * factor for i in range(L.size)]
    if not any(w):
        raise DegenerateKahler("Qk = 0: the Kähler vector is null for the intersection form")
    denominator = math.lcm(*(x.denominator for x in w))
    return primitive_part(tuple(int(x * denominator) for x in w)), factor


def seifert_filter(a, k, coordinate=0):
    """
    True iff the given coordinate of a is coprime with the orbifold weight k.

    Raises:
        InvalidWeight: k < 2
    """
    if k < 2:
        raise InvalidWeight(f"orbifold weight must be at least 2, got {k}")
    vector = a.vector if isinstance(a, ChernCandidate) else tuple(a)
    return math.gcd(vector[coordinate], k) == 1


def enumerate_candidates(basis, max_coeff=50, span=2, filters=()):
    """
    Primitive lattice vectors Σ cᵢbᵢ with |cᵢ| ≤ span and entries bounded by
    max_coeff, passing every filter, up to sign, sorted by size.

    filters are (coordinate, weight) pairs for seifert_filter.
    """
    seen = set()
    out = []
    for coeffs in product(range(-span, span + 1), repeat=len(basis)):
        v = tuple(sum(c * b[i] for c, b in zip(coeffs, basis)) for i in range(len(basis[0])))
        if not any(v) or max(abs(x) for x in v) > max_coeff or math.gcd(*v) != 1:
            continue
        # one representative per ± pair: first nonzero entry positive
        lead = next(x for x in v if x)
        if lead < 0:
            v = tuple(-x for x in v)
        if v in seen:
            continue
        if all(seifert_filter(v, weight, coordinate) for coordinate, weight in filters):
            seen.add(v)
            out.append(ChernCandidate(v, {coordinate: weight for coordinate, weight in filters}))
    out.sort(key=lambda c: (max(abs(x) for x in c.vector), sum(abs(x) for x in c.vector), c.vector))
    return out


@dataclass(frozen=True)
class ScanResult:
    row: tuple
    clearing_factor: int
    basis: tuple
    candidates: tuple
    pair: tuple

    @property
    def kernel_rank(self):
        return len(self.basis)


def chern_scan(L, k, filters=(), require_independent=2, max_coeff=50, span=2):
    """
    Integral classes orthogonal to the Kähler class and an independent pair of
    primitive candidates among them.

    Raises:
        DegenerateKahler: Qk = 0
        NoSolutions: fewer than require_independent independent solutions
    """
    row, factor = orthogonality_row(L, k)
    basis = hermite_kernel([row])
    if len(basis) < require_independent:
        raise NoSolutions(f"kernel rank {len(basis)} < {require_independent} required")
    candidates = tuple(enumerate_candidates(basis, max_coeff, span, filters))
    pair = ()
    for i, a in enumerate(candidates):
        partner = next((b for b in candidates[i + 1:] if integer_rank([a.vector, b.vector]) == 2), None)
        if partner is not None:
            pair = (a, partner)
            break
    if require_independent >= 2 and not pair:
        raise NoSolutions("no independent pair of primitive candidates in the search box")
    return ScanResult(row=row, clearing_factor=factor, basis=basis, candidates=candidates, pair=pair)


def weighted_kahler(k, e_tilde, d1, d2):
    """Kähler vector (k·ẽ, d₁, d₂) for the intersection form diag(1/k, −1, −1)."""
    return KahlerVector((k * e_tilde, d1, d2))


def canonical_class(k):
    """−(k+2)E + D₁ + D₂ in the basis (E, D₁, D₂)."""
    return (-(k + 2), 1, 1)


# ============================================================================
# GYSIN SEQUENCE
# ============================================================================

@dataclass(frozen=True)
class GysinInput:
    """
    Betti numbers b₀..b_d of the base and ranks r_j of ∪e : H^j → H^{j+2}
    (missing ranks are zero).
    """
    betti: tuple
    ranks: tuple = ()

    def __post_init__(self):
        betti = tuple(int(b) for b in self.betti)
        ranks = tuple(int(r) for r in self.ranks) + (0,) * (len(betti) - len(self.ranks))
        if any(b < 0 for b in betti):
            raise InconsistentRanks(f"negative Betti number in {betti}")
        if len(ranks) > len(betti):
            raise InconsistentRanks("more cup ranks than cohomology degrees")
        for j, r in enumerate(ranks):
            target = betti[j + 2] if j + 2 < len(betti) else 0
            if r < 0 or r > min(betti[j], target):
                raise InconsistentRanks(f"rank {r} of H^{j} → H^{j + 2} exceeds min({betti[j]}, {target})")
        object.__setattr__(self, "betti", betti)
        object.__setattr__(self, "ranks", ranks)


def gysin_betti(g):
    """
    Betti numbers of the circle bundle over the base:
    b_k(P) = (b_k − r_{k−2}) + (b_{k−1} − r_{k−1}).
    """
    b, r = g.betti, g.ranks
    at = lambda seq, j: seq[j] if 0 <= j < len(seq) else 0
    return tuple(at(b, k) - at(r, k - 2) + at(b, k - 1) - at(r, k - 1) for k in range(len(b) + 1))


def t2_bundle_betti(base_betti, first_ranks, second_ranks):
    """Gysin twice: first over the base, then over the circle bundle with the
    ranks of the second Euler class pulled back to it."""
    middle = gysin_betti(GysinInput(base_betti, first_ranks))
    return middle, gysin_betti(GysinInput(middle, second_ranks))


def euler_characteristic(betti):
    return sum((-1) ** k * b for k, b in enumerate(betti))


def cap_ranks(p):
    """Base Betti numbers and rank tables for the small resolution of cA_p."""
    base = (1, 0, p, 0, 0, 0, 0)
    # both Euler classes nonzero and independent; H⁴ = 0 kills every other map
    return base, (1,), (1,)


def poincare_warnings(betti):
    """Indices j with b_j ≠ b_{d−j} (informational for open manifolds)."""
    d = len(betti) - 1
    return [j for j in range(d // 2 + 1) if betti[j] != betti[d - j]]


# ============================================================================
# ADMISSIBILITY
# ============================================================================

@dataclass(frozen=True)
class AdmissibilityEntry:
    name: str
    status: str         # PASS, FAIL, VACUOUS or UNDETERMINED
    detail: str


@dataclass(frozen=True)
class AdmissibilityReport:
    entries: tuple

    @property
    def passed(self):
        return all(e.status != "FAIL" for e in self.entries)

    def status(self, name):
        return next(e.status for e in self.entries if e.name == name)


def admissibility_report(L, k, candidates, link_b2, h5_dim):
    """
    Necessary conditions on a pair of Chern classes c₁(P₁), c₁(P₂):
    orthogonality to [ω], linear independence, dim H²(B) ≥ 2,
    dim H²(Σ) ≥ 1, and the Massey-product obstruction, which is vacuous
    when H⁵(B) = 0 and undetermined otherwise.
    """
    entries = []
    for i, c in enumerate(candidates):
        vector = c.vector if isinstance(c, ChernCandidate) else tuple(c)
        value = L.pair(vector, k.coords)
        entries.append(AdmissibilityEntry(
            f"orthogonal_{i + 1}", "PASS" if value == 0 else "FAIL", f"aᵀQk = {value}"))
    vectors = [c.vector if isinstance(c, ChernCandidate) else tuple(c) for c in candidates]
    rank = integer_rank(vectors)
    entries.append(AdmissibilityEntry(
        "independent", "PASS" if len(vectors) >= 2 and rank >= 2 else "FAIL",
        f"{len(vectors)} classes spanning rank {rank}"))
    entries.append(AdmissibilityEntry(
        "h2_base", "PASS" if L.size >= 2 else "FAIL", f"dim H²(B) = {L.size}"))
    entries.append(AdmissibilityEntry(
        "h2_link", "PASS" if link_b2 >= 1 else "FAIL", f"dim H²(Σ) = {link_b2}"))
    entries.append(AdmissibilityEntry(
        "massey", "VACUOUS" if h5_dim == 0 else "UNDETERMINED", f"dim H⁵(B) = {h5_dim}"))
    return AdmissibilityReport(tuple(entries))
