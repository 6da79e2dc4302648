#!/usr/bin/env python3
"""
SU(3) Kit - SU(3)-Structures on Six-Dimensional Spaces

Builds SU(3)-structures from a pair (ω, ReΩ), computing J and ImΩ through
the Hitchin duality of stable 3-forms and the metric g(u, v) = ω(u, Jv).
Also provides the irreducible type projections of 2-, 3- and 4-forms, the
extraction of intrinsic torsion classes from a first-order jet, the
linearized Hitchin map and the pointwise identity battery used to validate
the conventions.

Conventions:
    ω₀ = e¹² + e³⁴ + e⁵⁶
    Ω₀ = (e¹ + ie²)∧(e³ + ie⁴)∧(e⁵ + ie⁶)
    J acts on forms by pullback, α ↦ α∘J, so that J e¹ = −e² at the
    standard point.

Classes:
    SU3Structure: a validated pair with its derived tensors
    TypeSplit2, TypeSplit3, TypeSplit4: irreducible components
    TorsionClasses: the seven intrinsic torsion components

Usage:
    from su3_kit import standard_su3, project2, hitchin_dual
    s = standard_su3()
    split = project2(beta, s)
"""

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property

import numpy as np

from exterior_core import (
    DEFAULT_TOL, EXACT, Form, GeometryError, Metric, Orientation,
    derivation, flat, hodge, inner, interior, is_exact, matvec,
    one_form, pullback, random_form, sharp, solve_linear, sqrt_exact, to_scalar, unit_vector,
    wedge, wedge_power,
)


# ============================================================================
# ERRORS
# ============================================================================

class NotStable(GeometryError):
    pass


class Incompatible(GeometryError):
    pass


class IndefiniteMetric(GeometryError):
    pass


class DegenerateForm(GeometryError):
    pass


class DecompositionInconsistent(GeometryError):
    pass


# ============================================================================
# STANDARD MODEL
# ============================================================================

def omega0():
    return Form(6, 2, {(1, 2): 1, (3, 4): 1, (5, 6): 1})


def re_omega0():
    return Form(6, 3, {(1, 3, 5): 1, (1, 4, 6): -1, (2, 3, 6): -1, (2, 4, 5): -1})


def im_omega0():
    return Form(6, 3, {(2, 3, 5): 1, (1, 4, 5): 1, (1, 3, 6): 1, (2, 4, 6): -1})


def standard_j():
    """J₀ on vectors: J e₁ = e₂, J e₂ = −e₁, and likewise on the other pairs."""
    J = [[Fraction(0)] * 6 for _ in range(6)]
    for k in (0, 2, 4):
        J[k + 1][k] = Fraction(1)
        J[k][k + 1] = Fraction(-1)
    return tuple(tuple(row) for row in J)


# ============================================================================
# HITCHIN DUALITY
# ============================================================================

@dataclass(frozen=True, eq=False)
class HitchinDual:
    J: tuple
    psi_hat: Form
    lam: object


def hitchin_k(psi, o=Orientation()):
    """K_ψ(v) = ι((v⌟ψ)∧ψ), ι: Λ⁵ ≅ V ⊗ Λ⁶ against o·e^{1...6}."""
    K = [[Fraction(0)] * 6 for _ in range(6)]
    for a in range(6):
        beta = wedge(interior(unit_vector(6, a + 1), psi), psi)
        for m in range(1, 7):
            rest = tuple(i for i in range(1, 7) if i != m)
            K[m - 1][a] = o.sign * (-1) ** (m - 1) * beta[rest]
    return K


def hitchin_dual(psi, o=Orientation()):
    """
    Hitchin dual of a stable 3-form on R⁶.

    λ = ⅙ tr K² is quartic in ψ. J = −K/√(−λ), and ψ̂ = −⅓ D_J ψ where D_J
    is J acting as a derivation; on a stable form this equals −ψ(J·, ·, ·)
    and gives ψ̂(ReΩ₀) = ImΩ₀.

    Args:
        psi: 3-form on R⁶
        o: orientation used to identify Λ⁶ with R

    Returns:
        HitchinDual(J, psi_hat, lam)

    Raises:
        NotStable: if λ ≥ 0 (float backend: λ > −1e-12·‖ψ‖⁴)
    """
    if psi.dim != 6 or psi.degree != 3:
        raise NotStable("Hitchin duality needs a 3-form on R^6")
    K = hitchin_k(psi, o)
    lam = sum((K[i][j] * K[j][i] for i in range(6) for j in range(6)), Fraction(0)) / 6
    if is_exact(lam):
        if lam >= 0:
            raise NotStable(f"λ = {lam} is not negative")
    elif lam > -1e-12 * float(psi.norm_sq()) ** 2:
        raise NotStable(f"λ = {lam:.3e} is not negative")
    root = sqrt_exact(-lam)
    J = tuple(tuple(-K[i][j] / root for j in range(6)) for i in range(6))
    psi_hat = derivation(J, psi) * Fraction(-1, 3)
    return HitchinDual(J=J, psi_hat=psi_hat, lam=lam)


# ============================================================================
# SU(3)-STRUCTURES
# ============================================================================

@dataclass(frozen=True, eq=False)
class SU3Structure:
    """
    SU(3)-structure (ω, ReΩ) with derived J, ImΩ, metric and volume.

    Derived fields are never taken from outside: build through make_su3.
    """
    omega: Form
    re_omega: Form
    im_omega: Form
    J: tuple
    metric: Metric
    vol: Form
    lam: object
    orientation: Orientation = field(default_factory=Orientation)
    ma_defect: object = Fraction(0)

    @cached_property
    def omega_sq(self):
        return wedge(self.omega, self.omega)

    @cached_property
    def span2_6(self):
        return [interior(unit_vector(6, i), self.re_omega) for i in range(1, 7)]

    @cached_property
    def span3_6(self):
        return [wedge(Form.basis(6, i), self.omega) for i in range(1, 7)]

    @cached_property
    def span4_6_re(self):
        return [wedge(Form.basis(6, i), self.re_omega) for i in range(1, 7)]

    @cached_property
    def span4_6_im(self):
        return [wedge(Form.basis(6, i), self.im_omega) for i in range(1, 7)]

    def star(self, a):
        return hodge(a, self.metric, self.orientation)

    def j(self, a):
        return j_form(self.J, a)

    def flat(self, v):
        return flat(v, self.metric)


def j_form(J, a):
    """J on forms: pullback by J. On 1-forms J e¹ = −e² at the standard point."""
    return pullback(J, a)


def make_su3(omega, re_omega, orientation=Orientation(), normalize=False, tol=DEFAULT_TOL):
    """
    Validate (ω, ReΩ) and derive J, ImΩ, g and vol.

    The Monge–Ampère defect ⅙ω³ − ¼ReΩ∧ImΩ (as a top coefficient) is stored
    on the result; normalize=True rescales ReΩ so it vanishes.

    Raises:
        DegenerateForm: ω³ = 0
        Incompatible: ω∧ReΩ ≠ 0
        NotStable: ReΩ not stable
        IndefiniteMetric: ω(·, J·) not positive-definite
    """
    if (omega.dim, omega.degree, re_omega.dim, re_omega.degree) != (6, 2, 6, 3):
        raise Incompatible("an SU(3)-structure needs a 2-form and a 3-form on R^6")
    omega_cubed = wedge_power(omega, 3).top_coefficient()
    if is_zero_scalar(omega_cubed, tol):
        raise DegenerateForm("ω is degenerate")
    dual = hitchin_dual(re_omega, orientation)
    if not wedge(omega, re_omega).is_zero(tol):
        raise Incompatible("ω∧ReΩ ≠ 0")

    J = dual.J
    g = [[sum((omega[(a + 1, c + 1)] * J[c][b] for c in range(6)), Fraction(0)) for b in range(6)]
         for a in range(6)]
    for a in range(6):
        for b in range(a + 1, 6):
            if not tol.close(g[a][b], g[b][a]):
                raise Incompatible("ω is not of type (1,1) for the induced J")
            g[a][b] = g[b][a] = (g[a][b] + g[b][a]) / 2
    metric = Metric(tuple(tuple(row) for row in g))
    if not metric.is_positive_definite():
        raise IndefiniteMetric("ω(·, J·) is not positive-definite")

    re, im, lam = re_omega, dual.psi_hat, dual.lam
    ratio = (omega_cubed / 6) / (wedge(re, im).top_coefficient() / 4)
    if normalize:
        if ratio <= 0:
            raise IndefiniteMetric("ReΩ∧ImΩ has the wrong orientation")
        c = sqrt_exact(ratio)
        re, im, lam = re * c, im * c, lam * c ** 4
    defect = omega_cubed / 6 - wedge(re, im).top_coefficient() / 4
    return SU3Structure(
        omega=omega, re_omega=re, im_omega=im, J=J, metric=metric,
        vol=wedge_power(omega, 3) / 6, lam=lam, orientation=orientation,
        ma_defect=defect,
    )


def is_zero_scalar(x, tol=DEFAULT_TOL):
    return x == 0 if is_exact(x) else abs(x) <= tol.abs_tol


def standard_su3():
    return make_su3(omega0(), re_omega0())


def pulled_back_standard(A):
    return make_su3(pullback(A, omega0()), pullback(A, re_omega0()))


def random_gl_plus(rng, n=6, bound=2, near_identity=False):
    """Random integer matrix with positive determinant, as Fractions."""
    while True:
        M = rng.integers(-bound, bound + 1, size=(n, n))
        if near_identity:
            M = M + 3 * bound * np.eye(n, dtype=int)
        det = round(np.linalg.det(M))
        if det > 0:
            return tuple(tuple(Fraction(int(x)) for x in row) for row in M)


def rotate_phase(s, c, sn):
    """Ω ↦ (c + i·sn)Ω with c² + sn² = 1; ω and g are unchanged."""
    re = s.re_omega * c - s.im_omega * sn
    im = s.re_omega * sn + s.im_omega * c
    return replace(s, re_omega=re, im_omega=im)


# ============================================================================
# TYPE DECOMPOSITIONS
# ============================================================================

@dataclass(frozen=True, eq=False)
class TypeSplit2:
    beta1: Form
    beta6: Form
    beta8: Form
    c1: object          # β₁ = c1·ω
    x6: list            # β₆ = X⌟ReΩ with X given by these coefficients

    def components(self):
        return (self.beta1, self.beta6, self.beta8)


@dataclass(frozen=True, eq=False)
class TypeSplit3:
    gamma6: Form
    gamma11: Form
    gamma12: Form
    w: Form             # γ₆ = w∧ω
    a: object           # γ₁⊕₁ = a·ReΩ + b·ImΩ
    b: object

    def components(self):
        return (self.gamma6, self.gamma11, self.gamma12)


@dataclass(frozen=True, eq=False)
class TypeSplit4:
    c1: object          # Λ⁴₁ part c1·ω²
    v6: Form            # Λ⁴₆ part v6∧(reference 3-form)
    rest8: Form         # Λ⁴₈ part τ∧ω


def _project(target, spanning, g):
    M = [[inner(u, v, g) for v in spanning] for u in spanning]
    rhs = [inner(u, target, g) for u in spanning]
    coeffs = solve_linear(M, rhs)
    proj = Form.zero(target.dim, target.degree)
    for c, u in zip(coeffs, spanning):
        proj = proj + u * c
    return coeffs, proj


def _line(target, u, g):
    c = inner(target, u, g) / inner(u, u, g)
    return c, u * c


def project2(beta, s):
    """Λ² = Λ²₁ ⊕ Λ²₆ ⊕ Λ²₈ as g-orthogonal projections."""
    c1, beta1 = _line(beta, s.omega, s.metric)
    x6, beta6 = _project(beta, s.span2_6, s.metric)
    return TypeSplit2(beta1=beta1, beta6=beta6, beta8=beta - beta1 - beta6, c1=c1, x6=x6)


def project3(gamma, s):
    """Λ³ = Λ³₆ ⊕ Λ³₁⊕₁ ⊕ Λ³₁₂ as g-orthogonal projections."""
    w, gamma6 = _project(gamma, s.span3_6, s.metric)
    a, part_re = _line(gamma, s.re_omega, s.metric)
    b, part_im = _line(gamma, s.im_omega, s.metric)
    gamma11 = part_re + part_im
    return TypeSplit3(gamma6=gamma6, gamma11=gamma11, gamma12=gamma - gamma6 - gamma11,
                      w=one_form(w), a=a, b=b)


def project4(F, s, reference="re"):
    """Λ⁴ = Λ⁴₁ ⊕ Λ⁴₆ ⊕ Λ⁴₈, the Λ⁴₆ part written as v∧ReΩ or v∧ImΩ."""
    c1, part1 = _line(F, s.omega_sq, s.metric)
    span = s.span4_6_re if reference == "re" else s.span4_6_im
    v, part6 = _project(F, span, s.metric)
    return TypeSplit4(c1=c1, v6=one_form(v), rest8=F - part1 - part6)


# ============================================================================
# TORSION CLASSES
# ============================================================================

@dataclass(frozen=True, eq=False)
class TorsionClasses:
    """
    Intrinsic torsion of an SU(3)-structure:

        dω   = 3w₁ReΩ + 3ŵ₁ImΩ + w₃ + w₄∧ω
        dReΩ = 2ŵ₁ω² + w₅∧ReΩ + w₂∧ω
        dImΩ = −2w₁ω² + w₅∧ImΩ + ŵ₂∧ω

    The gap fields measure how far a free jet is from a genuine SU(3) jet:
    the shared classes read from different equations disagree by them.
    """
    w1: object
    w1hat: object
    w2: Form
    w2hat: Form
    w3: Form
    w4: Form
    w5: Form
    w1_gap: object = Fraction(0)
    w1hat_gap: object = Fraction(0)
    w5_gap: Form = None

    def reconstruct(self, s):
        d_omega = s.re_omega * (3 * self.w1) + s.im_omega * (3 * self.w1hat) + self.w3 + wedge(self.w4, s.omega)
        d_re = s.omega_sq * (2 * self.w1hat) + wedge(self.w5, s.re_omega) + wedge(self.w2, s.omega)
        d_im = s.omega_sq * (-2 * self.w1) + wedge(self.w5, s.im_omega) + wedge(self.w2hat, s.omega)
        return d_omega, d_re, d_im

    def is_consistent(self, tol=DEFAULT_TOL):
        return (is_zero_scalar(self.w1_gap, tol) and is_zero_scalar(self.w1hat_gap, tol)
                and self.w5_gap.is_zero(tol))


def torsion_classes(s, d_omega, d_re, d_im, strict=None, tol=DEFAULT_TOL):
    """
    Read the torsion classes off a jet (dω, dReΩ, dImΩ).

    w₁, ŵ₁, w₃, w₄ come from dω; w₅ and w₂ from dReΩ; ŵ₂ from dImΩ. On a
    free jet the copies of ŵ₁, w₁ and w₅ carried by dReΩ and dImΩ need not
    agree; the differences are stored as gaps. strict defaults to on for
    float inputs only: exact free jets come back with their gaps.

    Raises:
        DecompositionInconsistent: strict and some gap is beyond tol
    """
    if strict is None:
        strict = any(f.backend != EXACT for f in (d_omega, d_re, d_im, s.re_omega))
    split3 = project3(d_omega, s)
    w1, w1hat = split3.a / 3, split3.b / 3
    re = project4(d_re, s, "re")
    im = project4(d_im, s, "im")
    classes = TorsionClasses(
        w1=w1, w1hat=w1hat,
        w2=-s.star(re.rest8), w2hat=-s.star(im.rest8),
        w3=split3.gamma12, w4=split3.w, w5=re.v6,
        w1_gap=w1 + im.c1 / 2, w1hat_gap=w1hat - re.c1 / 2,
        w5_gap=im.v6 - re.v6,
    )
    if strict and not classes.is_consistent(tol):
        raise DecompositionInconsistent(
            f"jet is not an SU(3) jet: gaps w1={classes.w1_gap}, ŵ1={classes.w1hat_gap}, "
            f"|w5|²={classes.w5_gap.norm_sq()}")
    return classes


def jet_from_classes(s, classes):
    """Inverse of torsion_classes on consistent data."""
    return classes.reconstruct(s)


def random_classes(rng, s, bound=3):
    """Consistent torsion classes with small rational entries, typed against s."""
    def scalar():
        return Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, bound + 1)))

    return TorsionClasses(
        w1=scalar(), w1hat=scalar(),
        w2=project2(random_form(rng, 6, 2, bound), s).beta8,
        w2hat=project2(random_form(rng, 6, 2, bound), s).beta8,
        w3=project3(random_form(rng, 6, 3, bound), s).gamma12,
        w4=random_form(rng, 6, 1, bound), w5=random_form(rng, 6, 1, bound),
        w5_gap=Form.zero(6, 1),
    )


# ============================================================================
# LINEARIZATION AND CALABI–YAU IDENTITIES
# ============================================================================

def hitchin_linearization(rho, s):
    """Derivative of ψ ↦ ψ̂ at ReΩ: ρ̂ = ⋆(ρ₆ + ρ₁⊕₁) − ⋆ρ₁₂."""
    split = project3(rho, s)
    return s.star(split.gamma6 + split.gamma11) - s.star(split.gamma12)


def curl_from(dgamma, s):
    """curl γ = ⋆(dγ∧ReΩ) from the value of dγ."""
    return s.star(wedge(dgamma, s.re_omega))


def dgamma_split_defect(dgamma, s):
    """dγ₆ − ½(J curl γ)♯⌟ReΩ; vanishes for every 2-form dγ."""
    v = s.j(curl_from(dgamma, s)) * Fraction(1, 2)
    return project2(dgamma, s).beta6 - interior(sharp(v, s.metric), s.re_omega)


# ============================================================================
# IDENTITY BATTERY
# ============================================================================

def pointwise_identities(s, X, beta, gamma):
    """
    Defects of the pointwise identities for one structure.

    Args:
        s: SU3Structure
        X: vector in R⁶
        beta: 2-form, supplies τ₈ through project2
        gamma: 3-form, supplies σ₁₂ through project3

    Returns:
        dict name -> Form defect (zero when the identity holds)
    """
    Xb = s.flat(X)
    JXb = s.j(Xb)
    JX = matvec(s.J, [to_scalar(x) for x in X])
    x_re = interior(X, s.re_omega)
    w, re, im, w2 = s.omega, s.re_omega, s.im_omega, s.omega_sq
    tau8 = project2(beta, s).beta8
    sigma12 = project3(gamma, s).gamma12
    return {
        "contract_omega": interior(X, w) + JXb,
        "contract_im_omega": interior(X, im) + interior(JX, re),
        "contract_re_wedge_omega": wedge(x_re, w) - wedge(Xb, im),
        "j_flat_wedge_re": wedge(JXb, re) - wedge(Xb, im),
        "contract_re_wedge_re": wedge(x_re, re) - wedge(Xb, w2),
        "contract_re_wedge_im": wedge(x_re, im) + wedge(JXb, w2),
        "star_one_form": s.star(Xb) + wedge(JXb, w2) * Fraction(1, 2),
        "star_omega": s.star(w) - w2 * Fraction(1, 2),
        "star_lambda2_6": s.star(x_re) - wedge(Xb, im),
        "star_lambda2_8": s.star(wedge(tau8, w)) + tau8,
        "star_lambda3_12": s.star(sigma12) - s.j(sigma12),
        "star_lambda3_6": s.star(wedge(Xb, w)) + wedge(JXb, w),
        "star_re_omega": s.star(re) - im,
        "star_im_omega": s.star(im) + re,
    }
