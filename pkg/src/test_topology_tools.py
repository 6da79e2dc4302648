"""Tests for topology_tools: integer kernels, Chern scans, Seifert filters and Gysin Betti numbers."""

import math
from fractions import Fraction

import pytest

from exterior_core import GeometryError
from topology_tools import (
    ChernCandidate, DegenerateKahler, GysinInput, InconsistentRanks, IntersectionLattice,
    InvalidWeight, KahlerVector, NoSolutions, admissibility_report, canonical_class, cap_ranks,
    chern_scan, enumerate_candidates, euler_characteristic, gysin_betti, hermite_kernel,
    integer_rank, orthogonality_row, poincare_warnings, seifert_filter, t2_bundle_betti,
    weighted_kahler,
)


def del_pezzo_6():
    return IntersectionLattice.diagonal([1, -1, -1, -1], ("E", "D1", "D2", "D3")), KahlerVector((3, 1, 1, 1))


def weighted_p112(k):
    Q = ((f"1/{k}", 0, 0), (0, -1, 0), (0, 0, -1))
    L = IntersectionLattice(tuple(tuple(Fraction(x) for x in row) for row in Q))
    return L, weighted_kahler(k, 1, 1, 1)


# ============================================================================
# LATTICES
# ============================================================================

def test_lattice_validation():
    with pytest.raises(GeometryError):
        IntersectionLattice(((1, 2), (0, 1)))
    with pytest.raises(GeometryError):
        IntersectionLattice(((1.0, 0), (0, 1)))
    with pytest.raises(GeometryError):
        IntersectionLattice.diagonal([1, -1], labels=("E",))
    with pytest.raises(DegenerateKahler):
        KahlerVector((0, 0, 0))


def test_lattice_properties():
    L, _ = weighted_p112(4)
    assert L.size == 3 and L.rank == 3
    assert L.clearing_factor == 4
    assert L.labels == ("x1", "x2", "x3")


def test_primitive_candidates():
    assert ChernCandidate((2, 4)).primitive is False
    assert ChernCandidate((2, 3)).primitive is True
    with pytest.raises(GeometryError):
        ChernCandidate((0, 0))


# ============================================================================
# INTEGER KERNELS
# ============================================================================

def test_kernel_of_del_pezzo_row():
    basis = hermite_kernel([[3, -1, -1, -1]])
    assert len(basis) == 3
    assert integer_rank(basis) == 3
    for b in basis:
        assert 3 * b[0] - b[1] - b[2] - b[3] == 0


def test_kernel_of_a_single_relation():
    (b,) = hermite_kernel([[1, 1]])
    assert abs(b[0]) == 1 and b[0] + b[1] == 0


def test_kernel_is_saturated():
    # 2a + 4b = 0 has kernel spanned by (2, −1), not (4, −2)
    (b,) = hermite_kernel([[2, 4]])
    assert math.gcd(*b) == 1 and 2 * b[0] + 4 * b[1] == 0


def test_full_rank_kernel_is_empty():
    assert hermite_kernel([[1, 0], [0, 1]]) == ()
    with pytest.raises(GeometryError):
        hermite_kernel([])


def test_orthogonality_row_clears_denominators():
    row, factor = orthogonality_row(*weighted_p112(3))
    assert row == (1, -1, -1)
    assert factor == 3


def test_null_kahler_vector():
    L = IntersectionLattice(((1, 1), (1, 1)))
    with pytest.raises(DegenerateKahler):
        orthogonality_row(L, KahlerVector((1, -1)))


# ============================================================================
# SCANS AND FILTERS
# ============================================================================

def test_del_pezzo_scan():
    L, k = del_pezzo_6()
    result = chern_scan(L, k)
    assert result.kernel_rank == 3
    a, b = result.pair
    assert L.pair(a.vector, k.coords) == 0 and L.pair(b.vector, k.coords) == 0
    assert integer_rank([a.vector, b.vector]) == 2


def test_scan_without_enough_solutions():
    with pytest.raises(NoSolutions):
        chern_scan(IntersectionLattice.diagonal([1, -1]), KahlerVector((1, 1)))


def test_candidates_are_primitive_representatives():
    basis = hermite_kernel([[3, -1, -1, -1]])
    candidates = enumerate_candidates(basis, max_coeff=5, span=1)
    vectors = [c.vector for c in candidates]
    assert len(vectors) == len(set(vectors))
    for v in vectors:
        assert math.gcd(*v) == 1
        assert next(x for x in v if x) > 0
        assert max(abs(x) for x in v) <= 5


@pytest.mark.parametrize("k", range(2, 21))
def test_canonical_class_is_seifert_iff_k_is_odd(k):
    assert seifert_filter(canonical_class(k), k) == (k % 2 == 1)


def test_seifert_weight_must_be_at_least_two():
    with pytest.raises(InvalidWeight):
        seifert_filter((1, 1, 1), 1)


@pytest.mark.parametrize("k", [3, 4, 5, 7])
def test_weighted_scan_finds_a_filtered_pair(k):
    L, kahler = weighted_p112(k)
    result = chern_scan(L, kahler, filters=((0, k),))
    assert result.kernel_rank == 2
    assert all(math.gcd(c.vector[0], k) == 1 for c in result.pair)


# ============================================================================
# ADMISSIBILITY
# ============================================================================

def test_admissible_pair():
    L, k = del_pezzo_6()
    report = admissibility_report(L, k, chern_scan(L, k).pair, link_b2=3, h5_dim=0)
    assert report.passed
    assert report.status("massey") == "VACUOUS"


def test_inadmissible_pair():
    L, k = del_pezzo_6()
    report = admissibility_report(L, k, [(1, 0, 0, 0), (1, 3, 0, 0)], link_b2=0, h5_dim=2)
    assert not report.passed
    assert report.status("orthogonal_1") == "FAIL"
    assert report.status("orthogonal_2") == "PASS"
    assert report.status("h2_link") == "FAIL"
    assert report.status("massey") == "UNDETERMINED"


# ============================================================================
# GYSIN SEQUENCE
# ============================================================================

def test_hopf_fibration():
    assert gysin_betti(GysinInput((1, 0, 1), (1,))) == (1, 0, 0, 1)


def test_trivial_circle_bundle():
    assert gysin_betti(GysinInput((1, 0, 1))) == (1, 1, 1, 1)


@pytest.mark.parametrize("p", range(2, 11))
def test_cap_resolution_bundles(p):
    middle, final = t2_bundle_betti(*cap_ranks(p))
    assert middle == (1, 0, p - 1, p, 0, 0, 0, 0)
    assert final == (1, 0, p - 2, 2 * p - 1, p, 0, 0, 0, 0)
    assert euler_characteristic(final) == 0


def test_rank_tables_are_validated():
    with pytest.raises(InconsistentRanks):
        GysinInput((1, 0, 0), (1,))
    with pytest.raises(InconsistentRanks):
        GysinInput((1, -1, 0))
    with pytest.raises(InconsistentRanks):
        GysinInput((1, 0), (0, 0, 0))


def test_poincare_warnings():
    assert poincare_warnings((1, 0, 0, 1)) == []
    assert poincare_warnings((1, 0, 3, 9, 5, 0, 0, 0, 0)) == [0, 2, 3]
