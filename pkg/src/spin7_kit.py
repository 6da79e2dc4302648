#!/usr/bin/env python3
"""
Spin(7) Kit - T²-Invariant Spin(7)-Structures and Their Torsion

A T²-invariant Spin(7)-structure on a T²-bundle over a six-dimensional base
is encoded pointwise by (η, θ, ω, ReΩ, p, q, r):

    Φ = η∧θ∧ω + p η∧ReΩ − θ∧(r ReΩ + q ImΩ) + ½pq ω²

with vertical directions e₇, e₈ and horizontal forms in indices 1–6. This
module assembles Φ, recovers the data from Φ, computes the induced metric,
evaluates the torsion system dΦ = 0 on first-order jets, carries the
basis-free formulation, the G2 analogue on circle bundles, and the
algebraic pieces of the perturbative construction (adiabatic limit,
first-order system and the change of variables into Dirac form).

Classes:
    Spin7Data: pointwise invariant data
    JetPoint: data plus free first-order jets
    TorsionReport: residuals of the torsion system and derived quantities
    AbstractT2Data: connection/Lie-algebra-valued form formulation
    LinearizationVars: the two variable sets of the linearized system
    G2Jet: jets of the circle-bundle G2 analogue

Usage:
    from spin7_kit import standard_data, assemble_phi, recover_data
    phi = assemble_phi(standard_data())
    data = recover_data(phi)
"""

import math
from dataclasses import dataclass, replace
from fractions import Fraction

from exterior_core import (
    DEFAULT_TOL, DimensionMismatch, Form, GeometryError, Metric, Orientation,
    determinant, horizontal_part, interior, inverse, lift, one_form,
    random_form, sharp, solve_linear, sqrt_exact, to_scalar, unit_vector,
    volume_form, wedge, wedge_all, wedge_power,
)
from su3_kit import (
    IndefiniteMetric, curl_from, hitchin_dual, is_zero_scalar,
    make_su3, project2, project4, pulled_back_standard, random_gl_plus,
    rotate_phase, standard_su3, torsion_classes,
)


# ============================================================================
# ERRORS
# ============================================================================

class NotInvariantShape(GeometryError):
    pass


class NonPositivePQ(GeometryError):
    pass


class InconsistentVerticalData(GeometryError):
    pass


class DegenerateConstants(GeometryError):
    pass


E7 = unit_vector(8, 7)
E8 = unit_vector(8, 8)

# Normalization of the quotient term of the basis-free Φ (see abstract_phi).
QUOTIENT_WEIGHT = Fraction(3, 8)


# ============================================================================
# DATA
# ============================================================================

def _pairing(form, vector):
    return sum((form[(i + 1,)] * vector[i] for i in range(len(vector))), Fraction(0))


@dataclass(frozen=True, eq=False)
class Spin7Data:
    """
    Pointwise data (η, θ, ω, ReΩ, p, q, r) of an invariant Spin(7)-structure.

    η and θ are 1-forms on R⁸ dual to the vertical basis (X, Y), which is
    (e₇, e₈) unless a rotation produced a different one.
    """
    su3: object
    eta: Form
    theta: Form
    p: object
    q: object
    r: object = Fraction(0)
    vertical: tuple = (tuple(E7), tuple(E8))

    def __post_init__(self):
        for name in ("p", "q", "r"):
            object.__setattr__(self, name, to_scalar(getattr(self, name)))
        if self.p <= 0 or self.q <= 0:
            raise NonPositivePQ(f"p = {self.p}, q = {self.q} must both be positive")
        if (self.eta.dim, self.eta.degree, self.theta.dim, self.theta.degree) != (8, 1, 8, 1):
            raise DimensionMismatch("η and θ must be 1-forms on R^8")
        X, Y = self.vertical
        pairings = (_pairing(self.eta, X), _pairing(self.eta, Y), _pairing(self.theta, X), _pairing(self.theta, Y))
        if not all(DEFAULT_TOL.close(a, b) for a, b in zip(pairings, (1, 0, 0, 1))):
            raise NotInvariantShape(f"η, θ are not dual to the vertical basis: {pairings}")

    @property
    def omega8(self):
        return lift(self.su3.omega, 8)

    @property
    def re8(self):
        return lift(self.su3.re_omega, 8)

    @property
    def im8(self):
        return lift(self.su3.im_omega, 8)


def make_data(su3, p, q, r=0, eta_h=None, theta_h=None):
    """Data with η = e⁷ + η_h and θ = e⁸ + θ_h for horizontal 1-forms η_h, θ_h."""
    eta = Form.basis(8, 7) + (lift(eta_h, 8) if eta_h is not None else Form.zero(8, 1))
    theta = Form.basis(8, 8) + (lift(theta_h, 8) if theta_h is not None else Form.zero(8, 1))
    return Spin7Data(su3=su3, eta=eta, theta=theta, p=p, q=q, r=r)


def standard_data():
    return make_data(standard_su3(), 1, 1, 0)


def random_data(rng, fourth_powers=True, bound=2):
    """
    Random admissible data over a GL⁺-pulled-back standard structure.

    With fourth_powers=True, p and q are fourth powers of rationals so every
    root appearing in the metric formulas stays rational.
    """
    su3 = pulled_back_standard(random_gl_plus(rng, 6, bound))

    def positive():
        a, b = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        return Fraction(a, b) ** (4 if fourth_powers else 1)

    r = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))
    return make_data(su3, positive(), positive(), r,
                     eta_h=random_form(rng, 6, 1, 2), theta_h=random_form(rng, 6, 1, 2))


# ============================================================================
# ASSEMBLY AND METRIC
# ============================================================================

def assemble_phi(d, eps=1):
    """
    Φ = η∧θ∧ω + p η∧ReΩ − θ∧(r ReΩ + q ImΩ) + ½pq ω².

    eps applies the fibre rescaling η ↦ εη, θ ↦ εθ.
    """
    eta, theta = d.eta * eps, d.theta * eps
    w, re, im = d.omega8, d.re8, d.im8
    return (wedge_all(eta, theta, w)
            + wedge(eta, re) * d.p
            - wedge(theta, re * d.r + im * d.q)
            + wedge(w, w) * (d.p * d.q / 2))


def vertical_coefficients(p, q, r):
    """
    Coefficients (A, B, C, H) of g_Φ = A η² + 2B η⊙θ + C θ² + H g.

    A = p^{1/2}q^{−3/2}, B = −r p^{−1/2}q^{−3/2},
    C = r²(pq)^{−3/2} + q^{1/2}p^{−3/2}, H = (pq)^{1/2}.
    """
    sp_, sq = sqrt_exact(p), sqrt_exact(q)
    A = sp_ / sq ** 3
    B = -r / (sp_ * sq ** 3)
    C = r * r / (sp_ * sq) ** 3 + sq / sp_ ** 3
    return A, B, C, sp_ * sq


def _outer(a, b):
    va, vb = a.to_vector(), b.to_vector()
    return [[x * y for y in vb] for x in va]


def _combine(*weighted):
    n = len(weighted[0][1])
    S = [[sum((c * M[i][j] for c, M in weighted), Fraction(0)) for j in range(n)] for i in range(n)]
    # float sums depend on order; average so the result is exactly symmetric
    return tuple(tuple((S[i][j] + S[j][i]) / 2 for j in range(n)) for i in range(n))


def _lifted_matrix(g6, n=8):
    return [[g6.matrix[i][j] if i < 6 and j < 6 else Fraction(0) for j in range(n)] for i in range(n)]


def fibration_metric(eta, theta, g_base, p, q, r, eps=1):
    """
    ε²(A η² + 2B η⊙θ + C θ²) + H g_base on R⁸ for 1-forms η, θ on R⁸ and a
    metric g_base on the first six coordinates.
    """
    A, B, C, H = vertical_coefficients(p, q, r)
    e2 = to_scalar(eps) ** 2
    return Metric(_combine((e2 * A, _outer(eta, eta)), (e2 * C, _outer(theta, theta)),
                           (e2 * B, _outer(eta, theta)), (e2 * B, _outer(theta, eta)),
                           (H, _lifted_matrix(g_base))))


def induced_metric(d, eps=1):
    """
    Metric of Φ in the coordinates of R⁸.

    Raises:
        IndefiniteMetric: the assembled matrix is not positive-definite
    """
    g = fibration_metric(d.eta, d.theta, d.su3.metric, d.p, d.q, d.r, eps)
    if not g.is_positive_definite():
        raise IndefiniteMetric("induced metric is not positive-definite")
    return g


def _fourth_root(x):
    return sqrt_exact(sqrt_exact(x))


def frame_coefficients(d):
    """(a, b, f) with λ = aη − bθ, μ = fθ for which Φ is the model form in (λ, μ)."""
    pq = d.p * d.q
    k = _fourth_root(pq) ** 3           # (pq)^{3/4}
    return d.p / k, d.r / k, d.q / k


def frame_metric(d):
    """λ² + μ² + (pq)^{1/2} g built from the adapted coframe."""
    a, b, f = frame_coefficients(d)
    lam = d.eta * a - d.theta * b
    mu = d.theta * f
    H = sqrt_exact(d.p * d.q)
    return Metric(_combine((1, _outer(lam, lam)), (1, _outer(mu, mu)), (H, _lifted_matrix(d.su3.metric))))


def cayley_defect(d):
    """Φ∧Φ − 14 vol(g_Φ) as a top coefficient."""
    phi = assemble_phi(d)
    return wedge(phi, phi).top_coefficient() - 14 * volume_form(induced_metric(d)).top_coefficient()


# ============================================================================
# RECOVERY
# ============================================================================

def _solve_wedge(target, images):
    """Coefficients c with Σ cᵢ imagesᵢ = target (square system)."""
    M = [[img.to_vector()[row] for img in images] for row in range(len(images[0].to_vector()))]
    return solve_linear(M, target.to_vector())


def _lefschetz_split(beta, omega):
    """β = v∧ω + P with P∧ω = 0, solved from β∧ω = v∧ω²."""
    w2 = wedge(omega, omega)
    images = [wedge(Form.basis(6, i), w2) for i in range(1, 7)]
    v = one_form(_solve_wedge(wedge(beta, omega), images))
    return v, beta - wedge(v, omega)


def _top_ratio(a, b):
    return a.top_coefficient() / b.top_coefficient()


def recover_data(phi, X=E7, Y=E8, o=Orientation(), tol=DEFAULT_TOL):
    """
    Recover (η, θ, ω, ReΩ, p, q, r) from an invariant Φ.

    ω = Y⌟X⌟Φ; the horizontal parts of X⌟Φ and Y⌟Φ are split by the
    Lefschetz decomposition Λ³ = ω∧Λ¹ ⊕ ker(∧ω); the primitive part of X⌟Φ
    is pReΩ, with p fixed by the Monge–Ampère normalization, and that of
    Y⌟Φ is −(rReΩ + qImΩ). The result is re-assembled and compared.

    Raises:
        NotInvariantShape: Φ is not of the invariant shape for (X, Y)
        NotStable: the primitive part of X⌟Φ is not stable
        NonPositivePQ: the recovered p or q is not positive
    """
    X = [to_scalar(x) for x in X]
    Y = [to_scalar(x) for x in Y]
    if any(X[i] != 0 or Y[i] != 0 for i in range(6)):
        raise NotInvariantShape("X and Y must be vertical")
    V = ((X[6], Y[6]), (X[7], Y[7]))
    if determinant(V) == 0:
        raise NotInvariantShape("X and Y are linearly dependent")
    Vinv = inverse(V)
    xi_x = Form(8, 1, {(7,): Vinv[0][0], (8,): Vinv[0][1]})
    xi_y = Form(8, 1, {(7,): Vinv[1][0], (8,): Vinv[1][1]})

    def strip(beta):
        beta = beta - wedge(xi_y, interior(Y, beta))
        beta = beta - wedge(xi_x, interior(X, beta))
        try:
            return horizontal_part(beta, 6)
        except DimensionMismatch as exc:
            raise NotInvariantShape(str(exc)) from exc

    omega = strip(interior(Y, interior(X, phi)))
    if is_zero_scalar(wedge_power(omega, 3).top_coefficient(), tol):
        raise NotInvariantShape("Y⌟X⌟Φ is degenerate")
    theta_h, psi = _lefschetz_split(strip(interior(X, phi)), omega)
    minus_eta_h, rest = _lefschetz_split(strip(interior(Y, phi)), omega)

    dual = hitchin_dual(psi, o)
    p_sq = _top_ratio(wedge(psi, dual.psi_hat), wedge_power(omega, 3)) * Fraction(3, 2)
    if p_sq <= 0:
        raise NonPositivePQ(f"recovered p² = {p_sq} is not positive")
    p = sqrt_exact(p_sq)
    re, im = psi / p, dual.psi_hat / p
    vol = wedge(re, im)
    q = _top_ratio(wedge(rest, re), vol)
    r = -_top_ratio(wedge(rest, im), vol)
    if not (rest + re * r + im * q).is_zero(tol):
        raise NotInvariantShape("primitive part of Y⌟Φ is not in span(ReΩ, ImΩ)")
    if q <= 0:
        raise NonPositivePQ(f"recovered q = {q} is not positive")
    try:
        su3 = make_su3(omega, re, o)
    except IndefiniteMetric as exc:
        raise NotInvariantShape(str(exc)) from exc
    data = Spin7Data(su3=su3, eta=xi_x - lift(minus_eta_h, 8), theta=xi_y + lift(theta_h, 8),
                     p=p, q=q, r=r, vertical=(tuple(X), tuple(Y)))
    if not assemble_phi(data).is_close(phi, tol):
        raise NotInvariantShape("re-assembled Φ differs from the input")
    return data


def rotate_data(d, c, sn):
    """
    Rotate the adapted coframe: λ + iμ ↦ (c + i·sn)(λ + iμ), Ω ↦ (c − i·sn)Ω.

    The result has the same p, q, r and a new vertical coframe; its assembled
    Φ equals that of d.
    """
    a, b, f = frame_coefficients(d)
    lam = d.eta * a - d.theta * b
    mu = d.theta * f
    lam_r = lam * c - mu * sn
    mu_r = lam * sn + mu * c
    theta = mu_r / f
    eta = (lam_r + theta * b) / a
    V = ((eta[(7,)], eta[(8,)]), (theta[(7,)], theta[(8,)]))
    Vinv = inverse(V)
    X = tuple([Fraction(0)] * 6 + [Vinv[0][0], Vinv[1][0]])
    Y = tuple([Fraction(0)] * 6 + [Vinv[0][1], Vinv[1][1]])
    return Spin7Data(su3=rotate_phase(d.su3, c, -sn), eta=eta, theta=theta,
                     p=d.p, q=d.q, r=d.r, vertical=(X, Y))


# ============================================================================
# JETS AND TORSION
# ============================================================================

@dataclass(frozen=True, eq=False)
class JetPoint:
    """Data together with free first-order jets, all horizontal forms on R⁶."""
    data: Spin7Data
    d_omega: Form
    d_re: Form
    d_im: Form
    d_eta: Form
    d_theta: Form
    dp: Form
    dq: Form
    dr: Form

    def __post_init__(self):
        expected = {"d_omega": 3, "d_re": 4, "d_im": 4, "d_eta": 2, "d_theta": 2, "dp": 1, "dq": 1, "dr": 1}
        for name, degree in expected.items():
            f = getattr(self, name)
            if (f.dim, f.degree) != (6, degree):
                raise DimensionMismatch(f"{name} must be a {degree}-form on R^6")

    @classmethod
    def zero(cls, data):
        return cls(data, Form.zero(6, 3), Form.zero(6, 4), Form.zero(6, 4), Form.zero(6, 2),
                   Form.zero(6, 2), Form.zero(6, 1), Form.zero(6, 1), Form.zero(6, 1))


def random_jet(rng, data=None, bound=2):
    data = data or random_data(rng)
    return JetPoint(data, *(random_form(rng, 6, k, bound) for k in (3, 4, 4, 2, 2, 1, 1, 1)))


@dataclass(frozen=True, eq=False)
class TorsionReport:
    res_a: Form
    res_b: Form
    res_c: Form
    res_d: Form
    alpha_eta: Form
    alpha_theta: Form
    alpha_eta_measured: Form
    alpha_theta_measured: Form
    res_36: Form
    res_37: Form
    classes: object

    FIELDS = ("res_a", "res_b", "res_c", "res_d", "res_36", "res_37")

    def norms(self):
        out = {name: math.sqrt(float(getattr(self, name).norm_sq())) for name in self.FIELDS}
        out["alpha_eta_gap"] = math.sqrt(float((self.alpha_eta - self.alpha_eta_measured).norm_sq()))
        out["alpha_theta_gap"] = math.sqrt(float((self.alpha_theta - self.alpha_theta_measured).norm_sq()))
        return out

    def nonzero(self, tol=DEFAULT_TOL):
        return [name for name, value in self.norms().items() if value > tol.abs_tol]


def _dpq(j):
    d = j.data
    return j.dq * d.p + j.dp * d.q


def alpha_theta(j):
    """α_θ = (1/2q)(J(r dp − p dr) + ½p dq − (3/2)q dp)."""
    d, s = j.data, j.data.su3
    inner_ = s.j(j.dp * d.r - j.dr * d.p) + j.dq * (d.p / 2) - j.dp * (3 * d.q / 2)
    return inner_ / (2 * d.q)


def alpha_eta(j):
    """α_η = (1/p)((r − qJ)α_θ − ½J d(pq)), forced by the torsion system."""
    d, s = j.data, j.data.su3
    at = alpha_theta(j)
    return (at * d.r - s.j(at) * d.q - s.j(_dpq(j)) / 2) / d.p


def _measured_alpha(s, dtwo):
    return s.star(wedge(dtwo, s.re_omega)) * Fraction(-1, 2)


def torsion_residuals(j):
    """
    Residuals of the torsion system for a jet point:

        (a) dω
        (b) d(pReΩ) + dθ∧ω
        (c) d(rReΩ) + d(qImΩ) + dη∧ω
        (d) p dη∧ReΩ − dθ∧(rReΩ + qImΩ) + ½d(pq)∧ω²

    together with the closed forms of α_η, α_θ, their measured values
    −½⋆(dη∧ReΩ), −½⋆(dθ∧ReΩ), and the two corollary residuals.
    """
    d, s = j.data, j.data.su3
    w, re, im, w2 = s.omega, s.re_omega, s.im_omega, s.omega_sq
    p, q, r = d.p, d.q, d.r
    res_b = wedge(j.dp, re) + j.d_re * p + wedge(j.d_theta, w)
    res_c = wedge(j.dr, re) + j.d_re * r + wedge(j.dq, im) + j.d_im * q + wedge(j.d_eta, w)
    res_d = wedge(j.d_eta, re) * p - wedge(j.d_theta, re * r + im * q) + wedge(_dpq(j), w2) / 2
    twist = s.j(j.dp * r - j.dr * p)
    res_36 = (wedge(j.d_theta, im) * q
              + wedge((j.dq * p - j.dp * (3 * q)) / 2 + twist, w2) / 2)
    res_37 = (wedge(j.d_eta * p - j.d_theta * r, re) + wedge(j.d_theta, im) * q
              + wedge(j.dq * p - j.dp * q + twist, w2))
    return TorsionReport(
        res_a=j.d_omega, res_b=res_b, res_c=res_c, res_d=res_d,
        alpha_eta=alpha_eta(j), alpha_theta=alpha_theta(j),
        alpha_eta_measured=_measured_alpha(s, j.d_eta),
        alpha_theta_measured=_measured_alpha(s, j.d_theta),
        res_36=res_36, res_37=res_37,
        classes=torsion_classes(s, j.d_omega, j.d_re, j.d_im, strict=False),
    )


def corollary_combination(j, report=None):
    """
    The first corollary residual rebuilt from the torsion residuals.

    With Bv, Cv the Λ⁴₆ vectors of residuals (b), (c) (written against ReΩ),
    D the 1-form with (d) = D∧ω² and δ the gap between the two Λ⁴₆ torsion
    components of the SU(3) jet:

        res_36 = (−½D − ½pJCv + ½(rJ − q)Bv − ½pqδ)∧ω²
    """
    report = report or torsion_residuals(j)
    d, s = j.data, j.data.su3
    bv = project4(report.res_b, s, "re").v6
    cv = project4(report.res_c, s, "re").v6
    images = [wedge(Form.basis(6, i), s.omega_sq) for i in range(1, 7)]
    D = one_form(_solve_wedge(report.res_d, images))
    delta = report.classes.w5_gap
    e = (D * Fraction(-1, 2) - s.j(cv) * (d.p / 2) + (s.j(bv) * d.r - bv * d.q) / 2
         - delta * (d.p * d.q / 2))
    return wedge(e, s.omega_sq)


def parametrized_jet(d, dtheta8, deta8, dp, dq, dr):
    """
    Jet built from the torsion-class parametrization of solutions.

    dω = 0; dθ = (−Jα_θ)♯⌟ReΩ + (dθ)₈ and dη = (−Jα_η)♯⌟ReΩ + (dη)₈ for free
    Λ²₈ forms; w₂ = −(1/p)(dθ)₈, ŵ₂ = (1/pq)(r(dθ)₈ − p(dη)₈),
    w₅ = (1/2pq)(J(p dr − r dp) − ½d(pq)) and all other classes zero.
    """
    s = d.su3
    p, q, r = d.p, d.q, d.r
    bare = JetPoint(d, Form.zero(6, 3), Form.zero(6, 4), Form.zero(6, 4), Form.zero(6, 2),
                    Form.zero(6, 2), dp, dq, dr)

    def two_form(alpha, eight):
        Y = sharp(s.j(alpha) * -1, s.metric)
        return interior(Y, s.re_omega) + eight

    d_theta = two_form(alpha_theta(bare), dtheta8)
    d_eta = two_form(alpha_eta(bare), deta8)
    w2 = dtheta8 * (-1 / p)
    w2hat = (dtheta8 * r - deta8 * p) / (p * q)
    w5 = (s.j(dr * p - dp * r) - (dq * p + dp * q) / 2) / (2 * p * q)
    d_re = wedge(w5, s.re_omega) + wedge(w2, s.omega)
    d_im = wedge(w5, s.im_omega) + wedge(w2hat, s.omega)
    return JetPoint(d, Form.zero(6, 3), d_re, d_im, d_eta, d_theta, dp, dq, dr)


def random_parametrized_jet(rng, data=None, bound=2):
    data = data or random_data(rng)
    s = data.su3
    eight = [project2(random_form(rng, 6, 2, bound), s).beta8 for _ in range(2)]
    return parametrized_jet(data, eight[0], eight[1], *(random_form(rng, 6, 1, bound) for _ in range(3)))


def parametrized_constraints(j, tol=DEFAULT_TOL):
    """Defects of the torsion-class constraints that a solution must satisfy."""
    d, s = j.data, j.data.su3
    p, q, r = d.p, d.q, d.r
    c = torsion_classes(s, j.d_omega, j.d_re, j.d_im, strict=False)
    th8 = project2(j.d_theta, s).beta8
    et8 = project2(j.d_eta, s).beta8
    w5 = (s.j(j.dr * p - j.dp * r) - _dpq(j) / 2) / (2 * p * q)
    report = torsion_residuals(j)
    return {
        "w1": abs(c.w1), "w1hat": abs(c.w1hat),
        "w3": c.w3.norm_sq(), "w4": c.w4.norm_sq(),
        "w2": (c.w2 + th8 / p).norm_sq(),
        "w2hat": (c.w2hat - (th8 * r - et8 * p) / (p * q)).norm_sq(),
        "w5": (c.w5 - w5).norm_sq(),
        "alpha_theta": (report.alpha_theta - report.alpha_theta_measured).norm_sq(),
        "alpha_eta": (report.alpha_eta - report.alpha_eta_measured).norm_sq(),
        "dtheta_1": abs(project2(j.d_theta, s).c1),
        "deta_1": abs(project2(j.d_eta, s).c1),
    }


def dphi_decomposition_check(j):
    """
    ‖dΦ − (−η∧(b) + θ∧(c) + (d) + η∧θ∧dω + pq ω∧dω)‖² with dΦ expanded by
    the Leibniz rule from the jet. Zero for every jet.
    """
    d = j.data
    L = lambda f: lift(f, 8)
    eta, theta = d.eta, d.theta
    w, re, im = d.omega8, d.re8, d.im8
    p, q, r = d.p, d.q, d.r
    d_re, d_im, d_w = L(j.d_re), L(j.d_im), L(j.d_omega)
    d_eta, d_theta = L(j.d_eta), L(j.d_theta)
    dp, dq, dr = L(j.dp), L(j.dq), L(j.dr)
    dphi = (wedge_all(d_eta, theta, w) - wedge_all(eta, d_theta, w) + wedge_all(eta, theta, d_w)
            + wedge_all(dp, eta, re) + wedge(d_eta, re) * p - wedge(eta, d_re) * p
            - wedge(d_theta, re * r + im * q)
            + wedge(theta, wedge(dr, re) + d_re * r + wedge(dq, im) + d_im * q)
            + wedge(dq * p + dp * q, wedge(w, w)) / 2 + wedge(w, d_w) * (p * q))
    rep = torsion_residuals(j)
    combination = (-wedge(eta, L(rep.res_b)) + wedge(theta, L(rep.res_c)) + L(rep.res_d)
                   + wedge_all(eta, theta, d_w) + wedge(w, d_w) * (p * q))
    return (dphi - combination).norm_sq()


# ============================================================================
# BASIS-FREE FORMULATION
# ============================================================================

@dataclass(frozen=True, eq=False)
class AbstractT2Data:
    """
    A = A₁⊗e₁ + A₂⊗e₂ (Lie(T²)-valued), ℧ = ℧₁⊗e¹ + ℧₂⊗e² (Lie(T²)*-valued)
    and ℧̆ = invomega ⊗ e¹∧e² in a chosen basis (e₁, e₂) of Lie(T²).
    """
    A: tuple
    mho: tuple
    invomega: Form

    @classmethod
    def from_data(cls, d):
        return cls(A=(d.eta, d.theta),
                   mho=(d.re8 * d.p, -(d.re8 * d.r + d.im8 * d.q)),
                   invomega=-d.omega8)

    def change_basis(self, S):
        """New basis e'_b = Σ_a S[a][b] e_a with S integral and det S = ±1."""
        det = determinant(S)
        if det not in (1, -1):
            raise InconsistentVerticalData(f"basis change must be unimodular, det = {det}")
        Sinv = inverse(S)
        A = tuple(self.A[0] * Sinv[b][0] + self.A[1] * Sinv[b][1] for b in range(2))
        mho = tuple(self.mho[0] * S[0][b] + self.mho[1] * S[1][b] for b in range(2))
        return AbstractT2Data(A=A, mho=mho, invomega=self.invomega * det)


def _horizontal6(form, what):
    try:
        return horizontal_part(form, 6)
    except DimensionMismatch as exc:
        raise InconsistentVerticalData(f"{what} is not horizontal") from exc


def abstract_phi(data):
    """
    Φ = ½A⩕A ⩔ ℧̆ + A ⩔ ℧ + (℧⩕℧)/℧̆.

    (v₁∧v₂)⊗α pairs as ι_{v₁}ι_{v₂}α, so ⟨e₁∧e₂, e¹∧e²⟩ = −1. The quotient is
    the multiple of ℧̆'s 2-form squared with (quotient)∧℧̆ = κ ℧⩕℧, κ = 3/8.
    """
    (a1, a2), (m1, m2), iw = data.A, data.mho, data.invomega
    iw6 = _horizontal6(iw, "℧̆")
    m16, m26 = _horizontal6(m1, "℧₁"), _horizontal6(m2, "℧₂")
    cube = wedge_power(iw6, 3).top_coefficient()
    if cube == 0:
        raise InconsistentVerticalData("℧̆ is degenerate")
    if not (wedge(iw6, m16).is_zero(DEFAULT_TOL) and wedge(iw6, m26).is_zero(DEFAULT_TOL)):
        raise InconsistentVerticalData("℧̆ ⊗ ℧ ≠ 0")
    c = 2 * QUOTIENT_WEIGHT * wedge(m16, m26).top_coefficient() / cube
    return -wedge_all(a1, a2, iw) + wedge(a1, m1) + wedge(a2, m2) + wedge(iw, iw) * c


def abstract_torsion_residuals(j):
    """
    (d℧ + dA ⩔ ℧̆ as its e¹, e² components, dA ⩔ ℧ + d((℧⩕℧)/℧̆)) for a jet.

    ι_{e₁}(e¹∧e²) = e², ι_{e₂}(e¹∧e²) = −e¹.
    """
    d, s = j.data, j.data.su3
    p, q, r = d.p, d.q, d.r
    re, im, iw = s.re_omega, s.im_omega, -s.omega
    mho = (re * p, -(re * r + im * q))
    d_mho = (wedge(j.dp, re) + j.d_re * p,
             -(wedge(j.dr, re) + j.d_re * r + wedge(j.dq, im) + j.d_im * q))
    first_1 = d_mho[0] - wedge(j.d_theta, iw)
    first_2 = d_mho[1] + wedge(j.d_eta, iw)
    quotient_d = wedge(_dpq(j), s.omega_sq) / 2 + wedge(s.omega, j.d_omega) * (p * q)
    second = wedge(j.d_eta, mho[0]) + wedge(j.d_theta, mho[1]) + quotient_d
    return first_1, first_2, second


# ============================================================================
# G2 ON CIRCLE BUNDLES
# ============================================================================

def g2_assemble(theta, s, p):
    """φ = θ∧ω + p³ReΩ on R⁷ with the fibre direction e₇."""
    p = to_scalar(p)
    if p <= 0:
        raise NonPositivePQ(f"p = {p} must be positive")
    if (theta.dim, theta.degree) != (7, 1):
        raise DimensionMismatch("θ must be a 1-form on R^7")
    return wedge(theta, lift(s.omega, 7)) + lift(s.re_omega, 7) * p ** 3


def g2_bilinear(phi):
    """b(u, v) with (u⌟φ)∧(v⌟φ)∧φ = 6 b(u, v) e^{1...7}."""
    contractions = [interior(unit_vector(7, i), phi) for i in range(1, 8)]
    return tuple(tuple(wedge_all(contractions[a], contractions[b], phi).top_coefficient() / 6
                       for b in range(7)) for a in range(7))


def g2_metric(phi):
    """
    Metric of a G2 3-form, g = b·det(b)^{−1/9}.

    Raises:
        IndefiniteMetric: φ is not a positive G2 form
    """
    B = g2_bilinear(phi)
    det = determinant(B)
    if det <= 0:
        raise IndefiniteMetric("φ is not a G2 form")
    scale = Fraction(1) if det == 1 else float(det) ** (-1 / 9)
    g = Metric(tuple(tuple(x * scale for x in row) for row in B))
    if not g.is_positive_definite():
        raise IndefiniteMetric("φ is not a G2 form")
    return g


@dataclass(frozen=True, eq=False)
class G2Jet:
    su3: object
    p: object
    d_omega: Form
    d_re: Form
    d_im: Form
    d_theta: Form
    dp: Form


def g2_torsion_residuals(j):
    """
    (a) dω, (b) d(p³ReΩ) + dθ∧ω, (c) d(p ImΩ), (d) 2p³dp∧ω² − dθ∧pImΩ.
    """
    s, p = j.su3, to_scalar(j.p)
    return {
        "a": j.d_omega,
        "b": wedge(j.dp, s.re_omega) * (3 * p * p) + j.d_re * p ** 3 + wedge(j.d_theta, s.omega),
        "c": wedge(j.dp, s.im_omega) + j.d_im * p,
        "d": wedge(j.dp, s.omega_sq) * (2 * p ** 3) - wedge(j.d_theta, s.im_omega) * p,
    }


def g2_as_spin7(j, eta_h=None, theta_h=None):
    """
    The product Spin(7)-structure on (circle bundle) × S¹ as a Spin(7) jet:
    p ↦ p³, q ↦ p, r = 0, with η the extra circle and dη = 0.
    """
    p = to_scalar(j.p)
    data = make_data(j.su3, p ** 3, p, 0, eta_h=eta_h, theta_h=theta_h)
    return JetPoint(data, j.d_omega, j.d_re, j.d_im, Form.zero(6, 2), j.d_theta,
                    j.dp * (3 * p * p), j.dp, Form.zero(6, 1))


# ============================================================================
# ADIABATIC LIMIT, FIRST ORDER AND CHANGE OF VARIABLES
# ============================================================================

def adiabatic_residuals(s, p0, q0, r0, dp0, dq0, dr0, d_re0, d_im0):
    """Zeroth-order conditions on (p₀, q₀, r₀) over an SU(3) jet."""
    vol_gap = wedge_power(s.omega, 3).top_coefficient() / 3 - wedge(s.re_omega, s.im_omega).top_coefficient() / 2
    return {
        "monge_ampere": vol_gap,
        "d_p_re": wedge(dp0, s.re_omega) + d_re0 * p0,
        "d_r_re_q_im": wedge(dr0, s.re_omega) + d_re0 * r0 + wedge(dq0, s.im_omega) + d_im0 * q0,
        "twisted": dq0 * p0 - dp0 * q0 + s.j(dp0 * r0 - dr0 * p0),
        "d_pq": dq0 * p0 + dp0 * q0,
    }


def first_order_split(s, p0, q0, r0, d_theta1, d_eta1):
    """
    First-order perturbation ρ of ReΩ: dρ = −p₀⁻¹dθ₁∧ω₀ and
    d⋆ρ = (q₀⁻¹dη₁ − r₀(p₀q₀)⁻¹dθ₁)∧ω₀. Returns dρ, d*ρ = −⋆d⋆ρ and the
    defects of the closed forms valid for Hermitian Yang–Mills curvatures.
    """
    d_rho = wedge(d_theta1, s.omega) * (-1 / to_scalar(p0))
    curv = d_eta1 / q0 - d_theta1 * (r0 / (p0 * q0))
    dstar_rho = -s.star(wedge(curv, s.omega))
    return {
        "d_rho": d_rho,
        "dstar_rho": dstar_rho,
        "d_rho_gap": d_rho - s.star(d_theta1) / p0,
        "dstar_rho_gap": dstar_rho - curv,
        "hym_theta": wedge(d_theta1, s.omega_sq),
        "hym_eta": wedge(d_eta1, s.omega_sq),
    }


@dataclass(frozen=True, eq=False)
class LinearizationVars:
    """
    Forward (f, g, h, t, ξ₁, ξ₂) and backward (P, Q, R, S, η, θ) variables of
    the linearized system around constants (p₀, q₀, r₀). Entries may be
    scalars or forms; missing halves are None.
    """
    p0: object
    q0: object
    r0: object
    f: object = None
    g: object = None
    h: object = None
    t: object = None
    xi1: object = None
    xi2: object = None
    P: object = None
    Q: object = None
    R: object = None
    S: object = None
    eta: object = None
    theta: object = None

    def forward_tuple(self):
        return (self.f, self.g, self.h, self.t, self.xi1, self.xi2)

    def backward_tuple(self):
        return (self.P, self.Q, self.R, self.S, self.eta, self.theta)


def linearization_change_of_variables(v, direction):
    """
    "forward": (P, Q, R, S, η, θ) ↦ (f, g, h, t, ξ₁, ξ₂) with
        f = ½(p₀Q − 3q₀P), g = r₀P − p₀R + S, h = ½(q₀P − 3p₀Q),
        t = r₀P − p₀R − S, ξ₁ = q₀θ, ξ₂ = p₀η − r₀θ.
    "backward": the inverse map.

    Raises:
        DegenerateConstants: p₀ ≤ 0 or q₀ ≤ 0
    """
    p0, q0, r0 = (to_scalar(x) for x in (v.p0, v.q0, v.r0))
    if p0 <= 0 or q0 <= 0:
        raise DegenerateConstants(f"p0 = {p0}, q0 = {q0} must be positive")
    if direction == "forward":
        P, Q, R, S, eta, theta = v.backward_tuple()
        return replace(v, f=(Q * p0 - P * (3 * q0)) / 2, g=P * r0 - R * p0 + S,
                       h=(P * q0 - Q * (3 * p0)) / 2, t=P * r0 - R * p0 - S,
                       xi1=theta * q0, xi2=eta * p0 - theta * r0)
    if direction == "backward":
        f, g, h, t, xi1, xi2 = v.forward_tuple()
        h3f = h + f * 3
        return replace(v, P=h3f * (-1 / (4 * q0)), Q=(h * 3 + f) * (-1 / (4 * p0)),
                       R=(h3f * (r0 / (4 * q0)) + (g + t) / 2) * (-1 / p0), S=(g - t) / 2,
                       eta=(xi2 + xi1 * (r0 / q0)) / p0, theta=xi1 / q0)
    raise ValueError(f"unknown direction {direction!r}")


def dirac_third_slot(s, df, dg, dgamma):
    """curl γ + df − J dg from the jets of f, g and γ."""
    return curl_from(dgamma, s) + df - s.j(dg)


def dirac_regrouping(s, p0, q0, r0, dP, dQ, dR, dS, d_eta, d_theta):
    """
    Both sides of the regrouping of the linearized equations into Dirac form.

    Left: ⋆((p₀dη − r₀dθ)∧ReΩ) + d(r₀P − p₀R + S) + ½J d(q₀P − 3p₀Q) and
          ⋆(q₀dθ∧ReΩ) + ½d(p₀Q − 3q₀P) + J d(r₀P − p₀R − S).
    Right: the third Dirac slots of (g, −h, ξ₂) and (f, −t, ξ₁).
    """
    lhs_1 = (s.star(wedge(d_eta * p0 - d_theta * r0, s.re_omega)) + dP * r0 - dR * p0 + dS
             + s.j(dP * q0 - dQ * (3 * p0)) / 2)
    lhs_2 = (s.star(wedge(d_theta * q0, s.re_omega)) + (dQ * p0 - dP * (3 * q0)) / 2
             + s.j(dP * r0 - dR * p0 - dS))
    fw = linearization_change_of_variables(
        LinearizationVars(p0, q0, r0, P=dP, Q=dQ, R=dR, S=dS, eta=d_eta, theta=d_theta), "forward")
    rhs_1 = dirac_third_slot(s, fw.g, -fw.h, fw.xi2)
    rhs_2 = dirac_third_slot(s, fw.f, -fw.t, fw.xi1)
    return (lhs_1, rhs_1), (lhs_2, rhs_2)
