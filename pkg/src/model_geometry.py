#!/usr/bin/env python3
"""
Model Geometry - Discrete Exterior Calculus and Model Spaces

Finite-difference exterior calculus on flat periodic tori, the flat Dirac
operator on Λ⁰ ⊕ Λ⁰ ⊕ Λ¹ of a constant SU(3)-structure, the Sasaki–Einstein
structure of the round S⁵ with its Calabi–Yau cone C³, and the
asymptotically T²-fibred conical model metric.

Grid fields may be declared constant along trailing axes of the chart
(GridChart.grid_axes < dim); those axes carry no grid points and every
derivative along them is zero. This is how T²-invariance is expressed on
T⁸ = T⁶ × T², and it keeps high-dimensional fields small.

Usage:
    from model_geometry import GridChart, GridField, fd_d, dirac_flat
    chart = GridChart(dim=6, n_points=32, grid_axes=2)
    f = GridField.from_components(chart, 0, {(): np.sin(chart.coordinates()[0])})
    df = fd_d(f)
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, stats

from exterior_core import (
    DimensionMismatch, Form, GeometryError, Metric, Orientation, basis_indices,
    hodge, interior, lift, one_form, sort_with_sign, wedge,
)
from spin7_kit import NonPositivePQ, fibration_metric
from su3_kit import IndefiniteMetric, im_omega0, make_su3, omega0, project2, re_omega0


# ============================================================================
# ERRORS
# ============================================================================

class ChartMismatch(GeometryError):
    pass


class PatchDomain(GeometryError):
    pass


class NotInvariant(GeometryError):
    pass


# ============================================================================
# CHARTS AND FIELDS
# ============================================================================

@dataclass(frozen=True)
class GridChart:
    """
    Periodic box [0, L)ⁿ with N points per gridded axis and spacing h = L/N.

    Only the first grid_axes coordinates are sampled (default: all of them).
    """
    dim: int
    n_points: int
    period: float = 2 * math.pi
    grid_axes: int = None

    def __post_init__(self):
        if self.dim not in (6, 8):
            raise ChartMismatch(f"grid dimension must be 6 or 8, got {self.dim}")
        if self.n_points < 4 or self.n_points % 2:
            raise ChartMismatch(f"points per axis must be even and >= 4, got {self.n_points}")
        if self.period <= 0:
            raise ChartMismatch(f"period must be positive, got {self.period}")
        axes = self.dim if self.grid_axes is None else self.grid_axes
        if not 1 <= axes <= self.dim:
            raise ChartMismatch(f"grid_axes must lie in 1..{self.dim}, got {axes}")
        object.__setattr__(self, "grid_axes", axes)

    @property
    def h(self):
        return self.period / self.n_points

    @property
    def shape(self):
        return (self.n_points,) * self.grid_axes

    @property
    def cell_volume(self):
        return self.h ** self.grid_axes

    def coordinates(self):
        x = np.arange(self.n_points) * self.h
        return np.meshgrid(*([x] * self.grid_axes), indexing="ij")

    def with_points(self, n_points):
        return GridChart(self.dim, n_points, self.period, self.grid_axes)


class GridField:
    """
    A k-form on a grid chart: values[point..., component] in binary64, with
    components ordered as exterior_core.basis_indices(n, k).
    """

    __slots__ = ("chart", "degree", "values")

    def __init__(self, chart, degree, values):
        values = np.asarray(values, dtype=float)
        expected = chart.shape + (len(basis_indices(chart.dim, degree)),)
        if values.shape != expected:
            raise ChartMismatch(f"values of shape {values.shape}, expected {expected}")
        if not np.all(np.isfinite(values)):
            raise GeometryError("grid field holds non-finite values")
        self.chart = chart
        self.degree = degree
        self.values = values

    @classmethod
    def zeros(cls, chart, degree):
        return cls(chart, degree, np.zeros(chart.shape + (len(basis_indices(chart.dim, degree)),)))

    @classmethod
    def constant(cls, chart, form):
        if form.dim != chart.dim:
            raise ChartMismatch(f"form on R^{form.dim} on a {chart.dim}-dimensional chart")
        vec = np.array([float(x) for x in form.to_vector()])
        return cls(chart, form.degree, np.broadcast_to(vec, chart.shape + vec.shape).copy())

    @classmethod
    def from_components(cls, chart, degree, components):
        """Build from {index tuple: array or scalar}; unnamed components are zero."""
        out = cls.zeros(chart, degree)
        position = {key: i for i, key in enumerate(basis_indices(chart.dim, degree))}
        for idx, value in components.items():
            key, sign = sort_with_sign(tuple(idx))
            if sign == 0 or key not in position:
                raise DimensionMismatch(f"index {idx} invalid for a {degree}-form on R^{chart.dim}")
            out.values[..., position[key]] += sign * np.broadcast_to(np.asarray(value, dtype=float), chart.shape)
        return out

    @property
    def keys(self):
        return basis_indices(self.chart.dim, self.degree)

    def component(self, *idx):
        key, sign = sort_with_sign(idx)
        if sign == 0:
            return np.zeros(self.chart.shape)
        return sign * self.values[..., self.keys.index(key)]

    def at(self, point):
        """The Form at a grid point (tuple of indices)."""
        return Form.from_vector(self.chart.dim, self.degree, [float(v) for v in self.values[tuple(point)]])

    def _check(self, other):
        if not isinstance(other, GridField):
            raise TypeError(f"expected a GridField, got {type(other).__name__}")
        if other.chart != self.chart or other.degree != self.degree:
            raise ChartMismatch("grid fields live on different charts or degrees")

    def __add__(self, other):
        self._check(other)
        return GridField(self.chart, self.degree, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return GridField(self.chart, self.degree, self.values - other.values)

    def __neg__(self):
        return GridField(self.chart, self.degree, -self.values)

    def __mul__(self, scalar):
        return GridField(self.chart, self.degree, self.values * float(scalar))

    __rmul__ = __mul__

    def norm(self):
        """Discrete L² norm with the flat component inner product."""
        return math.sqrt(float(np.sum(self.values.ravel() ** 2)) * self.chart.cell_volume)

    def max_abs(self):
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def map_linear(self, fn, out_degree):
        """Apply a constant linear map on forms (given on Forms) at every point."""
        M = _linear_matrix(fn, self.chart.dim, self.degree, out_degree)
        return GridField(self.chart, out_degree, self.values @ M.T)

    def to_csv(self, path):
        """Rows (point index, component index, value) in C order."""
        flat = self.values.reshape(-1, self.values.shape[-1])
        points, comps = np.meshgrid(np.arange(flat.shape[0]), np.arange(flat.shape[1]), indexing="ij")
        table = np.column_stack([points.ravel(), comps.ravel(), flat.ravel()])
        np.savetxt(path, table, delimiter=",", fmt=["%d", "%d", "%.17g"],
                   header="point,component,value", comments="")


def _linear_matrix(fn, n, k, out_degree):
    cols = []
    for key in basis_indices(n, k):
        image = fn(Form.basis(n, *key) if key else Form.constant(n, 1))
        if (image.dim, image.degree) != (n, out_degree):
            raise DimensionMismatch(f"map produced a {image.degree}-form, expected {out_degree}")
        cols.append([float(x) for x in image.to_vector()])
    if not cols:
        return np.zeros((len(basis_indices(n, out_degree)), 0))
    return np.array(cols).T


@lru_cache(maxsize=None)
def _wedge_table(n, k, l):
    out = {key: i for i, key in enumerate(basis_indices(n, k + l))}
    table = []
    for i, I in enumerate(basis_indices(n, k)):
        for j, J in enumerate(basis_indices(n, l)):
            key, sign = sort_with_sign(I + J)
            if sign:
                table.append((i, j, out[key], sign))
    return tuple(table)


def grid_wedge(a, b):
    if a.chart != b.chart:
        raise ChartMismatch("wedge of fields on different charts")
    n = a.chart.dim
    out = GridField.zeros(a.chart, a.degree + b.degree)
    for i, j, o, sign in _wedge_table(n, a.degree, b.degree):
        out.values[..., o] += sign * a.values[..., i] * b.values[..., j]
    return out


def grid_wedge_all(*fields):
    result = fields[0]
    for f in fields[1:]:
        result = grid_wedge(result, f)
    return result


# ============================================================================
# FINITE-DIFFERENCE d AND d*
# ============================================================================

@lru_cache(maxsize=None)
def _d_table(n, k, axes):
    out = {key: i for i, key in enumerate(basis_indices(n, k + 1))}
    table = []
    for i, I in enumerate(basis_indices(n, k)):
        for axis in range(axes):
            key, sign = sort_with_sign((axis + 1,) + I)
            if sign:
                table.append((i, axis, out[key], sign))
    return tuple(table)


def _central_difference(v, axis, h):
    return (np.roll(v, -1, axis=axis) - np.roll(v, 1, axis=axis)) / (2 * h)


def fd_d(f):
    """Exterior derivative with second-order central differences."""
    chart = f.chart
    out = GridField.zeros(chart, f.degree + 1)
    for i, axis, o, sign in _d_table(chart.dim, f.degree, chart.grid_axes):
        out.values[..., o] += sign * _central_difference(f.values[..., i], axis, chart.h)
    return out


def _metric_for(chart, metric):
    metric = metric or Metric.standard(chart.dim)
    if metric.dim != chart.dim:
        raise ChartMismatch(f"metric on R^{metric.dim} for a {chart.dim}-dimensional chart")
    return metric


def grid_star(f, metric=None, o=Orientation()):
    metric = _metric_for(f.chart, metric)
    return f.map_linear(lambda a: hodge(a, metric, o), f.chart.dim - f.degree)


def fd_dstar(f, metric=None, o=Orientation()):
    """d* = −⋆d⋆ for a constant metric (the chart dimension is even)."""
    if f.degree == 0:
        raise DimensionMismatch("the codifferential of a function is not a form")
    return -grid_star(fd_d(grid_star(f, metric, o)), metric, o)


def hodge_laplacian(f, metric=None, o=Orientation()):
    out = fd_dstar(fd_d(f), metric, o)
    if f.degree > 0:
        out = out + fd_d(fd_dstar(f, metric, o))
    return out


def convergence_order(errors, ns):
    """Order p of err ~ N^{−p} from a log-log least-squares fit."""
    fit = stats.linregress(np.log(np.asarray(ns, dtype=float)), np.log(np.asarray(errors, dtype=float)))
    return -fit.slope


# ============================================================================
# FLAT DIRAC OPERATOR
# ============================================================================

def grid_j(f, s):
    return f.map_linear(s.j, f.degree)


def grid_curl(gamma, s):
    """curl γ = ⋆(dγ∧ReΩ)."""
    return fd_d(gamma).map_linear(lambda a: s.star(wedge(a, s.re_omega)), 1)


def _require_flat_six(f, g, gamma):
    if not (f.chart == g.chart == gamma.chart):
        raise ChartMismatch("Dirac components live on different charts")
    if f.chart.dim != 6:
        raise ChartMismatch("the Dirac operator acts on six-dimensional charts")
    if (f.degree, g.degree, gamma.degree) != (0, 0, 1):
        raise ChartMismatch("Dirac components must be (0-form, 0-form, 1-form)")


def dirac_flat(f, g, gamma, s):
    """
    Dirac(f, g, γ) = (d*γ, d*Jγ, curl γ + df − J dg) for a constant SU(3)-structure.

    With J acting on forms by pullback this squares to the Hodge Laplacian
    on each component.
    """
    _require_flat_six(f, g, gamma)
    metric, o = s.metric, s.orientation
    first = fd_dstar(gamma, metric, o)
    second = fd_dstar(grid_j(gamma, s), metric, o)
    third = grid_curl(gamma, s) + fd_d(f) - grid_j(fd_d(g), s)
    return first, second, third


def dirac_laplacian_gap(f, g, gamma, s):
    """Max deviation of Dirac² from the Hodge Laplacian over the three slots."""
    twice = dirac_flat(*dirac_flat(f, g, gamma, s), s)
    lap = (hodge_laplacian(f, s.metric), hodge_laplacian(g, s.metric), hodge_laplacian(gamma, s.metric))
    return max((a - b).max_abs() for a, b in zip(twice, lap))


# ============================================================================
# GRID CHECKS OF THE TORSION SYSTEM
# ============================================================================

@dataclass(frozen=True)
class ClosureReport:
    dphi_norm: float
    combination_norm: float
    gap_norm: float


def _require_invariant(fields):
    chart = fields[0].chart
    if chart.dim != 8:
        raise ChartMismatch("Spin(7) closure needs an eight-dimensional chart")
    for f in fields:
        if f.chart != chart:
            raise ChartMismatch("closure fields live on different charts")
        for axis in range(6, chart.grid_axes):
            if np.max(np.abs(np.roll(f.values, 1, axis=axis) - f.values)) > 0:
                raise NotInvariant(f"field varies along axis {axis + 1}")


def grid_spin7_closure(eta, theta, omega, re, im, p, q, r):
    """
    fd_d of the assembled Φ against the combination
    −η∧(b) + θ∧(c) + (d) + η∧θ∧dω + pq ω∧dω of the torsion residuals built
    from fd_d jets. The two agree up to the O(h²) defect of the discrete
    Leibniz rule and coincide exactly for constant data.
    """
    _require_invariant((eta, theta, omega, re, im, p, q, r))
    W = grid_wedge
    n_re = W(r, re) + W(q, im)
    phi = (grid_wedge_all(eta, theta, omega) + W(p, W(eta, re)) - W(theta, n_re)
           + W(W(p, q), W(omega, omega)) * 0.5)
    d = fd_d
    dp, dq, dr = d(p), d(q), d(r)
    d_eta, d_theta, d_omega, d_re, d_im = d(eta), d(theta), d(omega), d(re), d(im)
    w2 = W(omega, omega)
    res_b = W(dp, re) + W(p, d_re) + W(d_theta, omega)
    res_c = W(dr, re) + W(r, d_re) + W(dq, im) + W(q, d_im) + W(d_eta, omega)
    res_d = W(p, W(d_eta, re)) - W(d_theta, n_re) + W(W(p, dq) + W(q, dp), w2) * 0.5
    combination = (-W(eta, res_b) + W(theta, res_c) + res_d
                   + grid_wedge_all(eta, theta, d_omega) + W(W(p, q), W(omega, d_omega)))
    dphi = d(phi)
    return ClosureReport(dphi.norm(), combination.norm(), (dphi - combination).norm())


def first_order_torus_check(theta1, p0, s):
    """
    ρ = −p₀⁻¹ θ₁∧ω₀ solves dρ = −p₀⁻¹ dθ₁∧ω₀ on the torus; returns the max
    residual and the size of the non-Λ²₈ part of dθ₁ (zero for HYM data).
    """
    if theta1.chart.dim != 6 or theta1.degree != 1:
        raise ChartMismatch("θ₁ must be a 1-form on a six-dimensional chart")
    c = -1.0 / float(p0)
    rho = theta1.map_linear(lambda a: wedge(a, s.omega) * c, 3)
    rhs = fd_d(theta1).map_linear(lambda a: wedge(a, s.omega) * c, 3)
    residual = (fd_d(rho) - rhs).max_abs()
    non_hym = fd_d(theta1).map_linear(lambda a: a - project2(a, s).beta8, 2).max_abs()
    return residual, non_hym


# ============================================================================
# SASAKI–EINSTEIN AND CALABI–YAU CONE
# ============================================================================

def _position_forms(x):
    """σ = Σ xᵃdxᵃ = r dr and ρ = Σ (x_j dy_j − y_j dx_j) at x ∈ C³ ≅ R⁶."""
    sigma = one_form(list(x))
    rho = one_form([-x[1], x[0], -x[3], x[2], -x[5], x[4]])
    return sigma, rho


@dataclass(frozen=True)
class SasakiEinsteinModel:
    """
    Round S⁵ ⊂ C³ with η, ω₁, ω₂, ω₃ extended to C³∖{0} as pullbacks under
    x ↦ x/|x|, so exterior derivatives are computed in the Cartesian chart:

        η = ρ/r²,  ω₁ = ω₀/r² − σ∧ρ/r⁴,  ω₂ + iω₃ = (x⌟Ω₀)/r³.

    eta_scale and swap perturb the structure for negative checks.
    """
    eta_scale: float = 1.0
    swap: bool = False
    margin: float = 1e-2

    def _point(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (6,):
            raise PatchDomain(f"sample point must have 6 coordinates, got shape {x.shape}")
        r = float(np.linalg.norm(x))
        if r < self.margin:
            raise PatchDomain(f"sample point at radius {r:.3e} is inside the excluded ball")
        return [float(t) for t in x], r

    def forms(self, x):
        """(η, ω₁, ω₂, ω₃) at x."""
        x, r = self._point(x)
        sigma, rho = _position_forms(x)
        w0 = omega0()
        eta = rho * (self.eta_scale / r ** 2)
        omega1 = w0 * (1 / r ** 2) - wedge(sigma, rho) * (1 / r ** 4)
        omega2 = interior(x, re_omega0()) * (1 / r ** 3)
        omega3 = interior(x, im_omega0()) * (1 / r ** 3)
        if self.swap:
            omega2, omega3 = omega3, omega2
        return eta, omega1, omega2, omega3

    def derivatives(self, x):
        """(dη, dω₁, dω₂, dω₃) at x from the closed-form expressions."""
        x, r = self._point(x)
        sigma, rho = _position_forms(x)
        w0, re0, im0 = omega0(), re_omega0(), im_omega0()
        d_eta = (w0 * (2 / r ** 2) - wedge(sigma, rho) * (2 / r ** 4)) * self.eta_scale
        # d(ω₀/r²) + d(−σ∧ρ/r⁴)
        d_omega1 = wedge(sigma, w0) * (-2 / r ** 4) + wedge(sigma, w0) * (2 / r ** 4)
        d_omega2 = re0 * (3 / r ** 3) - wedge(sigma, interior(x, re0)) * (3 / r ** 5)
        d_omega3 = im0 * (3 / r ** 3) - wedge(sigma, interior(x, im0)) * (3 / r ** 5)
        if self.swap:
            d_omega2, d_omega3 = d_omega3, d_omega2
        return d_eta, d_omega1, d_omega2, d_omega3


def sample_sphere(rng, count, dim=6):
    pts = rng.standard_normal((count, dim))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def _norm(form):
    return math.sqrt(float(form.norm_sq()))


def se_structure_check(m, points):
    """
    Max over the points of ‖dη − 2ω₁‖, ‖dω₂ + 3η∧ω₃‖, ‖dω₃ − 3η∧ω₂‖.

    Raises:
        PatchDomain: a point lies in the excluded ball around the origin
    """
    worst = {"d_eta": 0.0, "d_omega2": 0.0, "d_omega3": 0.0}
    for x in points:
        eta, omega1, omega2, omega3 = m.forms(x)
        d_eta, _, d_omega2, d_omega3 = m.derivatives(x)
        worst["d_eta"] = max(worst["d_eta"], _norm(d_eta - omega1 * 2))
        worst["d_omega2"] = max(worst["d_omega2"], _norm(d_omega2 + wedge(eta, omega3) * 3))
        worst["d_omega3"] = max(worst["d_omega3"], _norm(d_omega3 - wedge(eta, omega2) * 3))
    return worst


def cone_forms(m, x):
    """ω_C = r dr∧η + r²ω₁ and Ω_C = r²(dr + irη)∧(ω₂ + iω₃) at x."""
    x, r = m._point(x)
    sigma, _ = _position_forms(x)
    eta, omega1, omega2, omega3 = m.forms(x)
    omega_c = wedge(sigma, eta) + omega1 * r ** 2
    re_c = wedge(sigma, omega2) * r - wedge(eta, omega3) * r ** 3
    im_c = wedge(sigma, omega3) * r + wedge(eta, omega2) * r ** 3
    return omega_c, re_c, im_c


@dataclass(frozen=True)
class ConeReport:
    d_omega: float
    d_re: float
    d_im: float
    ma_defect: float
    flat_gap: float


def cone_structure(m, points):
    """
    Closure of (ω_C, Ω_C) from the model's derivatives, the Monge–Ampère
    defect of the pointwise SU(3)-structure and its distance to (ω₀, Ω₀).
    """
    worst = dict(d_omega=0.0, d_re=0.0, d_im=0.0, ma_defect=0.0, flat_gap=0.0)
    for x in points:
        xs, r = m._point(x)
        sigma, _ = _position_forms(xs)
        eta, omega1, omega2, omega3 = m.forms(x)
        d_eta, d_omega1, d_omega2, d_omega3 = m.derivatives(x)
        d_omega_c = wedge(sigma, omega1 * 2 - d_eta) + d_omega1 * r ** 2
        t_re = wedge(wedge(sigma, eta), omega2) * (3 * r) + wedge(d_eta, omega2) * r ** 3 - wedge(eta, d_omega2) * r ** 3
        t_im = wedge(wedge(sigma, eta), omega3) * (3 * r) + wedge(d_eta, omega3) * r ** 3 - wedge(eta, d_omega3) * r ** 3
        d_re_c = -wedge(sigma, d_omega2) * r - t_im
        d_im_c = -wedge(sigma, d_omega3) * r + t_re
        omega_c, re_c, im_c = cone_forms(m, x)
        s = make_su3(omega_c, re_c)
        worst["d_omega"] = max(worst["d_omega"], _norm(d_omega_c))
        worst["d_re"] = max(worst["d_re"], _norm(d_re_c))
        worst["d_im"] = max(worst["d_im"], _norm(d_im_c))
        worst["ma_defect"] = max(worst["ma_defect"], abs(float(s.ma_defect)))
        gap = max(_norm(omega_c - omega0()), _norm(re_c - re_omega0()), _norm(im_c - im_omega0()))
        worst["flat_gap"] = max(worst["flat_gap"], gap)
    return ConeReport(**worst)


def cone_metric(m, x):
    omega_c, re_c, _ = cone_forms(m, x)
    return make_su3(omega_c, re_c).metric


# ============================================================================
# ASYMPTOTICALLY T²-FIBRED CONICAL MODEL
# ============================================================================

@dataclass(frozen=True)
class AT2CModel:
    """
    T²-bundle over the cone C³∖{0} with connection forms
    η∞ = e⁷ + eta_twist·η_Σ and θ∞ = e⁸ + theta_twist·η_Σ, both radially
    invariant, and constant fibre data (ε, p₀, q₀, r₀).
    """
    eps: float
    p0: float
    q0: float
    r0: float = 0.0
    eta_twist: float = 0.0
    theta_twist: float = 0.0
    link: SasakiEinsteinModel = field(default_factory=SasakiEinsteinModel)

    def __post_init__(self):
        if self.eps <= 0:
            raise GeometryError(f"ε = {self.eps} must be positive")
        if self.p0 <= 0 or self.q0 <= 0:
            raise NonPositivePQ(f"p0 = {self.p0}, q0 = {self.q0} must be positive")

    def connections(self, x):
        eta_sigma = lift(self.link.forms(x)[0], 8)
        return (Form.basis(8, 7) + eta_sigma * self.eta_twist,
                Form.basis(8, 8) + eta_sigma * self.theta_twist)


def at2c_metric(m, x):
    """
    ε²(A η∞² + 2B η∞⊙θ∞ + C θ∞²) + (p₀q₀)^{1/2} g_C at a point of the cone.

    Raises:
        IndefiniteMetric: the result is not positive-definite
    """
    eta, theta = m.connections(x)
    g = fibration_metric(eta, theta, cone_metric(m.link, x), float(m.p0), float(m.q0), float(m.r0), float(m.eps))
    if not g.is_positive_definite():
        raise IndefiniteMetric("AT²C metric is not positive-definite")
    return g


def horizontal_limit_gap(m, x):
    """Max |g_ε − (p₀q₀)^{1/2} g_C| on the first six coordinates; → 0 with ε."""
    g = np.array(at2c_metric(m, x).matrix, dtype=float)[:6, :6]
    gc = np.array(cone_metric(m.link, x).matrix, dtype=float)
    return float(np.max(np.abs(g - math.sqrt(m.p0 * m.q0) * gc)))


def volume_growth(m, r_min=10.0, r_max=1000.0, samples=8, direction=None):
    """
    Fitted exponent of V(R) = vol{r ≤ R} over R ∈ [r_min, r_max].

    The fibre T² has coordinate period 2π and the link is the round S⁵ of
    volume π³; V is integrated radially with scipy.integrate.quad.
    """
    u = np.asarray(direction if direction is not None else [1, 0, 0, 0, 0, 0], dtype=float)
    u = u / np.linalg.norm(u)
    link_volume = math.pi ** 3
    fibre_area = (2 * math.pi) ** 2

    def density(r):
        g = np.array(at2c_metric(m, r * u).matrix, dtype=float)
        return math.sqrt(np.linalg.det(g)) * link_volume * fibre_area * r ** 5

    radii = np.geomspace(r_min, r_max, samples)
    inner = m.link.margin
    volumes = [integrate.quad(density, inner, R, limit=200)[0] for R in radii]
    fit = stats.linregress(np.log(radii), np.log(volumes))
    return fit.slope
