"""Tests for model_geometry: grid calculus, the flat Dirac operator and the model checks."""

import math

import numpy as np
import pytest

from exterior_core import DimensionMismatch, Form, GeometryError, wedge
from model_geometry import (
    AT2CModel, ChartMismatch, GridChart, GridField, NotInvariant, PatchDomain, SasakiEinsteinModel,
    cone_metric, cone_structure, convergence_order, dirac_flat, dirac_laplacian_gap, fd_d,
    fd_dstar, first_order_torus_check, grid_spin7_closure, grid_star, grid_wedge,
    horizontal_limit_gap, sample_sphere, se_structure_check, volume_growth,
)
from spin7_kit import NonPositivePQ, standard_data
from su3_kit import omega0, standard_su3


def plane_chart(n, dim=6):
    return GridChart(dim=dim, n_points=n, grid_axes=2)


def closure_fields(chart, wobble=True):
    """Invariant data on an 8-dimensional chart; constant when wobble is off."""
    x1, x2 = chart.coordinates()[:2]
    a = 1.0 if wobble else 0.0
    d = standard_data()
    const = lambda form: GridField.constant(chart, form)
    eta = GridField.from_components(chart, 1, {(7,): 1.0, (1,): a * 0.1 * np.sin(x2)})
    theta = GridField.from_components(chart, 1, {(8,): 1.0, (3,): a * 0.1 * np.cos(x1)})
    p = GridField.from_components(chart, 0, {(): 1 + a * 0.2 * np.sin(x1)})
    q = GridField.from_components(chart, 0, {(): 1 + a * 0.1 * np.cos(x2)})
    r = GridField.from_components(chart, 0, {(): a * 0.1 * np.sin(x1 + x2)})
    return eta, theta, const(d.omega8), const(d.re8), const(d.im8), p, q, r


# ============================================================================
# CHARTS AND FIELDS
# ============================================================================

@pytest.mark.parametrize("kwargs", [
    dict(dim=7, n_points=8),
    dict(dim=6, n_points=5),
    dict(dim=6, n_points=2),
    dict(dim=6, n_points=8, grid_axes=0),
    dict(dim=6, n_points=8, period=-1.0),
], ids=["dim", "odd", "small", "axes", "period"])
def test_chart_validation(kwargs):
    with pytest.raises(ChartMismatch):
        GridChart(**kwargs)


def test_chart_geometry():
    chart = plane_chart(16)
    assert chart.shape == (16, 16)
    assert chart.h == pytest.approx(2 * math.pi / 16)
    assert chart.with_points(32).shape == (32, 32)


def test_field_validation():
    chart = plane_chart(8)
    with pytest.raises(ChartMismatch):
        GridField(chart, 1, np.zeros((8, 8, 5)))
    with pytest.raises(GeometryError):
        GridField(chart, 0, np.full((8, 8, 1), np.nan))
    with pytest.raises(ChartMismatch):
        GridField.zeros(chart, 1) + GridField.zeros(plane_chart(16), 1)
    with pytest.raises(DimensionMismatch):
        GridField.from_components(chart, 2, {(1, 1): 1.0})


def test_component_sign_follows_index_order():
    chart = plane_chart(8)
    f = GridField.from_components(chart, 2, {(2, 1): 3.0})
    assert np.all(f.component(1, 2) == -3.0)
    assert np.all(f.component(2, 1) == 3.0)


def test_pointwise_wedge_matches_exterior_core():
    chart = plane_chart(4)
    w = GridField.constant(chart, omega0())
    assert grid_wedge(w, w).at((1, 2)).is_close(wedge(omega0(), omega0()))


def test_grid_star_of_constant_omega():
    chart = plane_chart(4)
    star = grid_star(GridField.constant(chart, omega0()))
    assert star.at((0, 0)).is_close(wedge(omega0(), omega0()) * 0.5)


def test_csv_dump(tmp_path):
    chart = GridChart(dim=6, n_points=4, grid_axes=1)
    path = tmp_path / "f.csv"
    GridField.constant(chart, Form.basis(6, 1) * 2).to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "point,component,value"
    assert len(lines) == 1 + 4 * 6


# ============================================================================
# DISCRETE CALCULUS
# ============================================================================

def test_d_squared_vanishes(rng):
    chart = plane_chart(16)
    f = GridField(chart, 2, rng.standard_normal(chart.shape + (15,)))
    assert fd_d(fd_d(f)).max_abs() <= 1e-10


def test_codifferential_is_adjoint_to_d(rng):
    chart = plane_chart(8)
    a = GridField(chart, 1, rng.standard_normal(chart.shape + (6,)))
    b = GridField(chart, 2, rng.standard_normal(chart.shape + (15,)))
    lhs = float(np.sum(fd_d(a).values * b.values))
    rhs = float(np.sum(a.values * fd_dstar(b).values))
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_fd_d_is_second_order():
    errors, ns = [], [16, 32, 64]
    for n in ns:
        chart = plane_chart(n)
        x1, _ = chart.coordinates()
        df = fd_d(GridField.from_components(chart, 0, {(): np.sin(x1)}))
        errors.append(float(np.max(np.abs(df.component(1) - np.cos(x1)))))
    assert errors[-1] < 1e-2
    assert convergence_order(errors, ns) == pytest.approx(2.0, abs=0.1)


def test_convergence_order_fit():
    assert convergence_order([4.0, 1.0, 0.25], [1, 2, 4]) == pytest.approx(2.0)


def test_codifferential_of_function_is_rejected():
    with pytest.raises(DimensionMismatch):
        fd_dstar(GridField.zeros(plane_chart(8), 0))


# ============================================================================
# DIRAC OPERATOR
# ============================================================================

def plane_waves(chart):
    x1, x2 = chart.coordinates()
    wave, other = np.sin(x1) * np.sin(x2), np.cos(x1) * np.sin(x2)
    f = GridField.from_components(chart, 0, {(): wave})
    g = GridField.from_components(chart, 0, {(): other})
    gamma = GridField.from_components(chart, 1, {(1,): other, (2,): wave, (4,): wave})
    return f, g, gamma


def test_dirac_squares_to_the_laplacian():
    assert dirac_laplacian_gap(*plane_waves(plane_chart(16)), standard_su3()) <= 1e-9


def test_dirac_converges_to_analytic_laplacian():
    s = standard_su3()
    errors, ns = [], [16, 32, 64]
    for n in ns:
        fields = plane_waves(plane_chart(n))
        twice = dirac_flat(*dirac_flat(*fields, s), s)
        errors.append(max((a - b * 2).max_abs() for a, b in zip(twice, fields)))
    assert convergence_order(errors, ns) == pytest.approx(2.0, abs=0.2)


def test_dirac_needs_six_dimensional_slots():
    chart = plane_chart(8)
    f = GridField.zeros(chart, 0)
    with pytest.raises(ChartMismatch):
        dirac_flat(f, f, GridField.zeros(chart, 2), standard_su3())
    wide = plane_chart(8, dim=8)
    z = GridField.zeros(wide, 0)
    with pytest.raises(ChartMismatch):
        dirac_flat(z, z, GridField.zeros(wide, 1), standard_su3())


# ============================================================================
# TORSION SYSTEM ON GRIDS
# ============================================================================

def test_closure_is_exact_for_constant_data():
    report = grid_spin7_closure(*closure_fields(plane_chart(8, dim=8), wobble=False))
    assert report.dphi_norm <= 1e-12
    assert report.gap_norm <= 1e-12


def test_closure_gap_shrinks_with_the_grid():
    coarse = grid_spin7_closure(*closure_fields(plane_chart(16, dim=8))).gap_norm
    fine = grid_spin7_closure(*closure_fields(plane_chart(32, dim=8))).gap_norm
    assert 0 < fine <= coarse / 3


def test_closure_rejects_fibre_dependence():
    chart = GridChart(dim=8, n_points=4, grid_axes=7)
    fields = list(closure_fields(chart, wobble=False))
    fields[5] = GridField.from_components(chart, 0, {(): 1 + 0.1 * np.sin(chart.coordinates()[6])})
    with pytest.raises(NotInvariant):
        grid_spin7_closure(*fields)


def test_closure_needs_eight_dimensions():
    z = GridField.zeros(plane_chart(8), 0)
    with pytest.raises(ChartMismatch):
        grid_spin7_closure(z, z, z, z, z, z, z, z)


def test_first_order_torus_check():
    chart = plane_chart(16)
    x1, x2 = chart.coordinates()
    theta1 = GridField.from_components(chart, 1, {(3,): np.sin(x1), (4,): np.cos(x2)})
    residual, non_hym = first_order_torus_check(theta1, 2.0, standard_su3())
    assert residual <= 1e-12
    assert non_hym > 0.1
    with pytest.raises(ChartMismatch):
        first_order_torus_check(GridField.zeros(chart, 2), 2.0, standard_su3())


# ============================================================================
# SASAKI–EINSTEIN LINK AND CONE
# ============================================================================

def test_round_sphere_is_sasaki_einstein(rng):
    worst = se_structure_check(SasakiEinsteinModel(), sample_sphere(rng, 50))
    assert max(worst.values()) <= 1e-10


def test_perturbed_link_fails(rng):
    worst = se_structure_check(SasakiEinsteinModel(eta_scale=2.0), sample_sphere(rng, 5))
    assert worst["d_eta"] > 0.1


def test_patch_domain():
    m = SasakiEinsteinModel()
    with pytest.raises(PatchDomain):
        m.forms(np.zeros(6))
    with pytest.raises(PatchDomain):
        m.forms(np.ones(5))


def test_cone_is_flat_calabi_yau(rng):
    points = sample_sphere(rng, 10) * rng.uniform(0.5, 3.0, size=(10, 1))
    report = cone_structure(SasakiEinsteinModel(), points)
    assert max(report.d_omega, report.d_re, report.d_im) <= 1e-9
    assert report.ma_defect <= 1e-10
    assert report.flat_gap <= 1e-10


def test_cone_metric_is_euclidean():
    g = np.array(cone_metric(SasakiEinsteinModel(), [0.0, 2.0, 0.0, 0.0, 1.0, 0.0]).matrix, dtype=float)
    assert np.allclose(g, np.eye(6), atol=1e-10)


# ============================================================================
# ASYMPTOTICALLY T²-FIBRED CONICAL MODEL
# ============================================================================

def test_at2c_model_validation():
    with pytest.raises(GeometryError):
        AT2CModel(eps=0.0, p0=1.0, q0=1.0)
    with pytest.raises(NonPositivePQ):
        AT2CModel(eps=1.0, p0=-1.0, q0=1.0)


def test_fibres_collapse_in_the_horizontal_limit():
    x = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]
    gaps = [horizontal_limit_gap(AT2CModel(eps=eps, p0=1.0, q0=1.0, eta_twist=1.0), x) for eps in (1e-1, 1e-3)]
    assert gaps[1] < gaps[0]
    assert gaps[1] < 1e-5


def test_volume_grows_with_exponent_six():
    m = AT2CModel(eps=0.5, p0=1.0, q0=2.0, r0=0.3, eta_twist=1.0, theta_twist=-0.5)
    assert volume_growth(m, samples=6) == pytest.approx(6.0, abs=0.1)
