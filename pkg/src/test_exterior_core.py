"""Tests for exterior_core: forms, products, pullback, metrics and the Hodge star."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from exterior_core import (
    DimensionMismatch, Form, GeometryError, Metric, NotPositiveDefinite, Orientation,
    SingularMatrix, basis_indices, determinant, flat, hodge, horizontal_part, inner, interior,
    inverse, lift, matmul, pullback, random_form, random_vector, sharp, solve_linear,
    sort_with_sign, sqrt_exact, to_scalar, volume_form, wedge, wedge_power,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
fast = settings(max_examples=25, deadline=None)
thorough = settings(max_examples=1000, deadline=None)


def omega_standard():
    return Form.basis(6, 1, 2) + Form.basis(6, 3, 4) + Form.basis(6, 5, 6)


def unitriangular_metric(rng, n):
    """AᵀA for a random integer unitriangular A, so det = 1 and every root stays rational."""
    A = [[Fraction(int(rng.integers(-2, 3))) if j > i else Fraction(int(i == j)) for j in range(n)]
         for i in range(n)]
    return Metric(matmul(tuple(zip(*A)), A))


# ============================================================================
# INDICES AND FORMS
# ============================================================================

def test_basis_indices_are_lexicographic():
    keys = basis_indices(6, 2)
    assert len(keys) == 15
    assert keys[0] == (1, 2) and keys[-1] == (5, 6)


@pytest.mark.parametrize("idx, expected", [
    ((1, 2), ((1, 2), 1)),
    ((2, 1), ((1, 2), -1)),
    ((3, 1, 2), ((1, 2, 3), 1)),
    ((1, 1), (None, 0)),
], ids=["sorted", "swap", "cycle", "repeat"])
def test_sort_with_sign(idx, expected):
    assert sort_with_sign(idx) == expected


def test_form_canonicalizes_keys():
    assert Form(6, 2, {(2, 1): 1}) == -Form.basis(6, 1, 2)
    assert Form(6, 2, {(1, 1): 5}).is_zero()
    assert Form(6, 2, {(1, 2): 1, (2, 1): 1}).is_zero()


@pytest.mark.parametrize("terms", [{(1,): 1}, {(0, 1): 1}, {(1, 7): 1}], ids=["degree", "zero-index", "too-large"])
def test_form_rejects_bad_indices(terms):
    with pytest.raises(DimensionMismatch):
        Form(6, 2, terms)


def test_mixed_degrees_do_not_add():
    with pytest.raises(DimensionMismatch):
        Form.basis(6, 1) + Form.basis(6, 1, 2)


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        Form.basis(6, 1) / 0


def test_scalars():
    assert to_scalar(3) == Fraction(3)
    assert isinstance(to_scalar(np.float64(0.5)), float)
    with pytest.raises(TypeError):
        to_scalar(True)
    assert sqrt_exact(Fraction(9, 4)) == Fraction(3, 2)
    assert isinstance(sqrt_exact(2), float)
    with pytest.raises(GeometryError):
        sqrt_exact(-1)


def test_float_backend_is_contagious():
    a = Form.basis(6, 1, 2)
    assert a.backend == "exact"
    assert (a * 0.5).backend == "float"
    assert a.to_float().is_close(a)


# ============================================================================
# PRODUCTS
# ============================================================================

def test_omega_cubed_is_six_volume():
    assert wedge_power(omega_standard(), 3).top_coefficient() == 6


@thorough
@given(seeds, st.integers(0, 3), st.integers(0, 3))
def test_wedge_graded_commutative(seed, k, l):
    rng = np.random.default_rng(seed)
    a, b = random_form(rng, 6, k), random_form(rng, 6, l)
    assert wedge(a, b) == wedge(b, a) * (-1) ** (k * l)


@thorough
@given(seeds)
def test_wedge_associative(seed):
    rng = np.random.default_rng(seed)
    a, b, c = random_form(rng, 6, 1), random_form(rng, 6, 2), random_form(rng, 6, 2)
    assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))


def test_interior_of_basis_forms():
    e1 = [1, 0, 0, 0, 0, 0]
    e2 = [0, 1, 0, 0, 0, 0]
    assert interior(e1, Form.basis(6, 1, 2)) == Form.basis(6, 2)
    assert interior(e2, Form.basis(6, 1, 2)) == -Form.basis(6, 1)
    assert interior(e1, Form.constant(6, 3)).is_zero()


@fast
@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_interior_is_an_antiderivation(seed, k, l):
    rng = np.random.default_rng(seed)
    v = random_vector(rng, 6)
    a, b = random_form(rng, 6, k), random_form(rng, 6, l)
    lhs = interior(v, wedge(a, b))
    rhs = wedge(interior(v, a), b) + wedge(a, interior(v, b)) * (-1) ** k
    assert lhs == rhs


# ============================================================================
# MATRICES AND PULLBACK
# ============================================================================

def test_matrix_helpers_are_exact():
    A = ((2, 1), (1, 1))
    assert determinant(A) == 1
    assert inverse(A) == ((1, -1), (-1, 2))
    assert solve_linear(A, [3, 2]) == [1, 1]
    with pytest.raises(SingularMatrix):
        inverse(((1, 2), (2, 4)))


def test_float_solve_uses_least_squares():
    x = solve_linear(((2.0, 0.0), (0.0, 4.0)), [1.0, 1.0])
    assert x == pytest.approx([0.5, 0.25])


@fast
@given(seeds)
def test_pullback_is_functorial(seed):
    rng = np.random.default_rng(seed)
    A = tuple(tuple(Fraction(int(x)) for x in row) for row in rng.integers(-2, 3, size=(6, 6)))
    B = tuple(tuple(Fraction(int(x)) for x in row) for row in rng.integers(-2, 3, size=(6, 6)))
    if determinant(A) == 0 or determinant(B) == 0:
        return
    a = random_form(rng, 6, 3)
    assert pullback(matmul(A, B), a) == pullback(B, pullback(A, a))


def test_pullback_commutes_with_wedge(rng):
    A = ((1, 1, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0), (0, 0, 2, 0, 0, 1),
         (0, 0, 0, 1, 0, 0), (0, 0, 0, 0, 1, 0), (1, 0, 0, 0, 0, 1))
    a, b = random_form(rng, 6, 1), random_form(rng, 6, 2)
    assert pullback(A, wedge(a, b)) == wedge(pullback(A, a), pullback(A, b))


def test_pullback_rejects_singular_maps():
    with pytest.raises(SingularMatrix):
        pullback(((1, 1), (1, 1)), Form.basis(2, 1))


# ============================================================================
# METRICS AND HODGE STAR
# ============================================================================

def test_metric_validation():
    with pytest.raises(GeometryError):
        Metric(((1, 2), (0, 1)))
    with pytest.raises(DimensionMismatch):
        Metric(((1, 0),))
    with pytest.raises(GeometryError):
        Orientation(0)


def test_star_of_omega_is_half_square():
    w = omega_standard()
    assert hodge(w, Metric.standard(6)) == wedge(w, w) * Fraction(1, 2)


@pytest.mark.parametrize("k", range(7))
def test_star_squared_on_standard_metric(rng, k):
    g = Metric.standard(6)
    a = random_form(rng, 6, k)
    assert hodge(hodge(a, g), g) == a * (-1) ** (k * (6 - k))


@pytest.mark.parametrize("k", range(5))
def test_star_defining_identity(rng, k):
    g = unitriangular_metric(rng, 6)
    vol = volume_form(g)
    a, b = random_form(rng, 6, k), random_form(rng, 6, k)
    assert wedge(b, hodge(a, g)) == vol * inner(b, a, g)


def test_orientation_flips_the_star():
    a = Form.basis(6, 1, 2)
    g = Metric.standard(6)
    assert hodge(a, g, Orientation(-1)) == -hodge(a, g)


def test_star_needs_positive_definite_metric():
    with pytest.raises(NotPositiveDefinite):
        hodge(Form.basis(6, 1), Metric.diagonal([1, -1, 1, 1, 1, 1]))


def test_inner_is_norm_for_standard_metric(rng):
    a = random_form(rng, 6, 3)
    assert inner(a, a, Metric.standard(6)) == a.norm_sq()


def test_flat_and_sharp_are_inverse(rng):
    g = unitriangular_metric(rng, 6)
    v = random_vector(rng, 6)
    assert sharp(flat(v, g), g) == v


# ============================================================================
# EMBEDDINGS
# ============================================================================

def test_lift_and_horizontal_part(rng):
    a = random_form(rng, 6, 2)
    assert horizontal_part(lift(a, 8), 6) == a
    mixed = lift(a, 8) + Form.basis(8, 1, 7)
    with pytest.raises(DimensionMismatch):
        horizontal_part(mixed, 6)
    assert horizontal_part(mixed, 6, strict=False) == a
