#!/usr/bin/env python3
"""
Command-Line Front End: Verification Suites, Torsion Reports, Scans

Runs the exact identity battery, evaluates torsion residuals of a jet file,
scans intersection lattices for Chern classes, computes Betti numbers of
T²-bundles and drives the discrete convergence checks.

Exit codes: 0 pass, 2 check failure, 64 usage error, 65 malformed data.

Usage:
    python cli.py verify
    python cli.py verify --structures 500 --seed 7 --full
    python cli.py torsion --preset jet_lemma37
    python cli.py scan --preset dP6 --kahler 3,1,1,1
    python cli.py betti --preset cAp --p 5 --check
    python cli.py grid --n 32 --suite dirac
"""

import argparse
import math
import sys
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

import numpy as np
from tqdm import tqdm

from exterior_core import (
    EXACT, FLOAT, Form, GeometryError, pullback, random_form, random_vector,
)
from model_geometry import (
    AT2CModel, GridChart, GridField, SasakiEinsteinModel, cone_structure, convergence_order,
    dirac_flat, dirac_laplacian_gap, fd_d, fd_dstar, first_order_torus_check, grid_j,
    grid_spin7_closure, sample_sphere, se_structure_check, volume_growth,
)
from schema import (
    MalformedInput, dumps, form_to_record, gysin_from_record, jet_from_record,
    lattice_from_record, load_record, preset_path,
)
from spin7_kit import (
    AbstractT2Data, LinearizationVars, abstract_phi, assemble_phi, cayley_defect,
    corollary_combination, dirac_regrouping, dphi_decomposition_check, frame_metric,
    induced_metric, linearization_change_of_variables, parametrized_constraints, random_data,
    random_jet, random_parametrized_jet, recover_data, rotate_data, standard_data, torsion_residuals,
)
from su3_kit import (
    hitchin_dual, hitchin_linearization, im_omega0, jet_from_classes, make_su3, pointwise_identities,
    pulled_back_standard, random_classes, random_gl_plus, re_omega0, standard_su3, torsion_classes,
)
from topology_tools import (
    GysinInput, KahlerVector, admissibility_report, canonical_class, chern_scan,
    euler_characteristic, gysin_betti, poincare_warnings, seifert_filter,
)


EXIT_OK = 0
EXIT_FAIL = 2
EXIT_USAGE = 64
EXIT_DATA = 65

DEFAULT_SEED = 20240617
PASS, FAIL, INFO = "PASS", "FAIL", "INFO"

IDENTITY_ANCHORS = {
    "contract_omega": "X⌟ω = −JX♭",
    "contract_im_omega": "X⌟ImΩ = −JX⌟ReΩ",
    "contract_re_wedge_omega": "(X⌟ReΩ)∧ω = X♭∧ImΩ",
    "j_flat_wedge_re": "JX♭∧ReΩ = X♭∧ImΩ",
    "contract_re_wedge_re": "(X⌟ReΩ)∧ReΩ = X♭∧ω²",
    "contract_re_wedge_im": "(X⌟ReΩ)∧ImΩ = −JX♭∧ω²",
    "star_one_form": "⋆X♭ = −½JX♭∧ω²",
    "star_omega": "⋆ω = ½ω²",
    "star_lambda2_6": "⋆(X⌟ReΩ) = X♭∧ImΩ",
    "star_lambda2_8": "⋆(τ∧ω) = −τ on Λ²₈",
    "star_lambda3_12": "⋆σ = Jσ on Λ³₁₂",
    "star_lambda3_6": "⋆(X♭∧ω) = −JX♭∧ω",
    "star_re_omega": "⋆ReΩ = ImΩ",
    "star_im_omega": "⋆ImΩ = −ReΩ",
}
TORSION_ANCHORS = {
    "res_a": "dω = 0",
    "res_b": "d(pReΩ) = −dθ∧ω",
    "res_c": "d(rReΩ + qImΩ) = −dη∧ω",
    "res_d": "p dη∧ReΩ − dθ∧(rReΩ + qImΩ) + ½d(pq)∧ω² = 0",
    "res_36": "first corollary of the torsion system",
    "res_37": "second corollary of the torsion system",
    "alpha_eta_gap": "α_η = −½⋆(dη∧ReΩ)",
    "alpha_theta_gap": "α_θ = −½⋆(dθ∧ReΩ)",
}
SUITES = ("dirac", "dstar_j_d", "dd_zero", "closure", "torus", "se", "cone", "at2c")


class UsageError(Exception):
    pass


# ============================================================================
# CONFIGURATION AND REPORTS
# ============================================================================

@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs; the seed is echoed into every report."""
    command: str
    inputs: tuple = ()
    preset: str = None
    backend: str = EXACT
    tol: float = 1e-9
    n: int = 32
    seed: int = DEFAULT_SEED
    output: str = None
    fmt: str = "table"
    check: bool = False
    full: bool = False
    structures: int = 200
    p: int = None
    k: int = None
    kahler: tuple = None
    suite: str = "all"
    mutate_sign: str = None
    csv_dir: str = None
    quiet: bool = False

    def __post_init__(self):
        if not self.tol > 0:
            raise UsageError(f"--tol must be positive, got {self.tol}")
        if self.backend not in (EXACT, FLOAT):
            raise UsageError(f"unknown backend {self.backend!r}")
        if self.n < 16 or self.n % 8:
            raise UsageError(f"--n must be a multiple of 8 and at least 16, got {self.n}")
        if self.structures < 0:
            raise UsageError("--structures must be non-negative")
        if self.suite != "all" and self.suite not in SUITES:
            raise UsageError(f"unknown suite {self.suite!r}")

    @property
    def exact_tol(self):
        """Tolerance for checks that hold exactly on the rational backend."""
        return 0.0 if self.backend == EXACT else self.tol


@dataclass(frozen=True)
class Check:
    name: str
    status: str
    value: object
    tolerance: object
    anchor: str

    def to_record(self):
        return {"name": self.name, "status": self.status, "value": self.value,
                "tolerance": self.tolerance, "anchor": self.anchor}


@dataclass
class Report:
    command: str
    seed: int
    backend: str
    checks: list = field(default_factory=list)
    info: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def add(self, name, value, tolerance, anchor, passed=None):
        """Record a check; without an explicit verdict it passes when value ≤ tolerance."""
        if passed is None:
            passed = tolerance is None or value <= tolerance
        status = PASS if passed else FAIL
        self.checks.append(Check(name, status, _plain(value), _plain(tolerance), anchor))

    def note(self, name, value, anchor):
        self.checks.append(Check(name, INFO, _plain(value), None, anchor))

    @property
    def failures(self):
        return [c for c in self.ordered() if c.status == FAIL]

    @property
    def passed(self):
        return not self.failures

    def ordered(self):
        return sorted(self.checks, key=lambda c: c.name)

    def to_record(self):
        # wall time stays out of the record so reruns are byte-identical
        return {"command": self.command, "seed": self.seed, "backend": self.backend,
                "passed": self.passed, "checks": [c.to_record() for c in self.ordered()],
                "info": self.info}


def _plain(x):
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return float(x)


def _size(form):
    return math.sqrt(float(form.norm_sq()))


def _progress(iterable, cfg, desc, total=None):
    return tqdm(iterable, desc=desc, total=total, file=sys.stderr, disable=cfg.quiet, leave=False)


# ============================================================================
# VERIFY
# ============================================================================

def _sample_structures(cfg, rng):
    yield standard_su3()
    for _ in range(cfg.structures):
        yield pulled_back_standard(random_gl_plus(rng, 6, 2))


def _on_backend(s, cfg):
    if cfg.backend == FLOAT:
        return make_su3(s.omega.to_float(), s.re_omega.to_float(), s.orientation)
    return s


def _mutate(s, name):
    if name is None:
        return s
    return replace(s, **{name: -getattr(s, name)})


def _identity_battery(cfg, rng, report):
    worst = dict.fromkeys(IDENTITY_ANCHORS, 0.0)
    structures = _sample_structures(cfg, rng)
    for s in _progress(structures, cfg, "identities", total=cfg.structures + 1):
        s = _mutate(_on_backend(s, cfg), cfg.mutate_sign)
        X = random_vector(rng, 6)
        beta, gamma = random_form(rng, 6, 2), random_form(rng, 6, 3)
        for name, defect in pointwise_identities(s, X, beta, gamma).items():
            worst[name] = max(worst[name], _size(defect))
    for name, value in worst.items():
        report.add(f"identity.{name}", value, cfg.exact_tol, IDENTITY_ANCHORS[name])


def _hitchin_checks(cfg, rng, report):
    dual = hitchin_dual(re_omega0())
    report.add("hitchin.dual_standard", _size(dual.psi_hat - im_omega0()), 0.0, "ψ̂(ReΩ₀) = ImΩ₀")
    worst = 0.0
    for _ in range(min(cfg.structures, 50)):
        A = random_gl_plus(rng, 6, 2)
        moved = hitchin_dual(pullback(A, re_omega0())).psi_hat - pullback(A, im_omega0())
        worst = max(worst, _size(moved))
    report.add("hitchin.equivariance", worst, 0.0, "ψ̂(A*ψ) = A*ψ̂ for A ∈ GL⁺(6)")
    h, worst = 1e-5, 0.0
    for _ in range(min(cfg.structures, 50)):
        exact = pulled_back_standard(random_gl_plus(rng, 6, 1, near_identity=True))
        s = make_su3(exact.omega.to_float(), exact.re_omega.to_float())
        rho = random_form(rng, 6, 3).to_float()
        plus = hitchin_dual(s.re_omega + rho * h).psi_hat
        minus = hitchin_dual(s.re_omega - rho * h).psi_hat
        numeric = (plus - minus) * (1 / (2 * h))
        exact = hitchin_linearization(rho, s)
        worst = max(worst, _size(numeric - exact) / max(_size(exact), 1e-300))
    report.add("hitchin.linearization", worst, 1e-6, "ρ̂ = ⋆(ρ₆ + ρ₁⊕₁) − ⋆ρ₁₂")


def _torsion_class_checks(cfg, rng, report):
    worst = 0.0
    count = min(cfg.structures, 50)
    for s in _progress(_sample_structures(replace(cfg, structures=count), rng), cfg, "classes", total=count + 1):
        classes = random_classes(rng, s)
        back = torsion_classes(s, *jet_from_classes(s, classes))
        scalars = (back.w1 - classes.w1, back.w1hat - classes.w1hat, back.w1_gap, back.w1hat_gap)
        forms = (back.w2 - classes.w2, back.w2hat - classes.w2hat, back.w3 - classes.w3,
                 back.w4 - classes.w4, back.w5 - classes.w5, back.w5_gap)
        worst = max(worst, *(abs(float(x)) for x in scalars), *(_size(f) for f in forms))
    report.add("torsion_classes.round_trip", worst, 0.0, "dω = 3w₁ReΩ + 3ŵ₁ImΩ + w₃ + w₄∧ω")
    s = standard_su3()
    example = torsion_classes(s, re_omega0() * 3, Form.zero(6, 4), s.omega_sq * -2)
    report.add("torsion_classes.w1_example", abs(float(example.w1 - 1)), 0.0, "dω = 3ReΩ₀ gives w₁ = 1")


def _cayley_checks(cfg, rng, report):
    phi0 = assemble_phi(standard_data())
    odd = sum(1 for v in phi0.terms.values() if abs(v) != 1)
    report.add("cayley.standard", abs(len(phi0.terms) - 14) + odd, 0,
               "Φ₀ has fourteen unit coefficients")
    count = min(cfg.structures, 100)
    worst = dict(cayley=0.0, metric=0.0, recover=0.0, rotate=0.0, abstract=0.0)
    for _ in _progress(range(count), cfg, "cayley"):
        d = random_data(rng)
        phi = assemble_phi(d)
        worst["cayley"] = max(worst["cayley"], abs(float(cayley_defect(d))))
        g, gf = induced_metric(d), frame_metric(d)
        worst["metric"] = max(worst["metric"], max(abs(float(a - b)) for ra, rb in zip(g.matrix, gf.matrix)
                                                     for a, b in zip(ra, rb)))
        back = recover_data(phi)
        worst["recover"] = max(worst["recover"], _size(assemble_phi(back) - phi),
                               _size(back.eta - d.eta), _size(back.theta - d.theta),
                               abs(float(back.p - d.p)), abs(float(back.q - d.q)), abs(float(back.r - d.r)))
        worst["rotate"] = max(worst["rotate"], _size(assemble_phi(rotate_data(d, Fraction(3, 5), Fraction(4, 5))) - phi))
        abstract = AbstractT2Data.from_data(d)
        worst["abstract"] = max(worst["abstract"], _size(abstract_phi(abstract) - phi),
                                _size(abstract_phi(abstract.change_basis(((1, 1), (0, 1)))) - phi))
    report.add("cayley.square", worst["cayley"], 0.0, "Φ∧Φ = 14 vol(g_Φ)")
    report.add("metric.frame", worst["metric"], 0.0, "g_Φ = λ² + μ² + (pq)^{1/2} g")
    report.add("recover.round_trip", worst["recover"], 0.0, "recover ∘ assemble = id")
    report.add("rotate.invariance", worst["rotate"], 0.0, "Φ is unchanged by the coframe rotation")
    report.add("abstract.basis_change", worst["abstract"], 0.0, "Φ independent of the basis of Lie(T²)")


def _torsion_battery(cfg, rng, report):
    count = min(cfg.structures, 100)
    worst = dict(decomposition=0.0, solutions=0.0, constraints=0.0, corollary=0.0, regrouping=0.0, linear=0.0)
    for _ in _progress(range(count), cfg, "torsion"):
        j = random_jet(rng)
        worst["decomposition"] = max(worst["decomposition"], math.sqrt(float(dphi_decomposition_check(j))))
        rep = torsion_residuals(j)
        worst["corollary"] = max(worst["corollary"], _size(rep.res_36 - corollary_combination(j, rep)))
        sol = random_parametrized_jet(rng, j.data)
        norms = torsion_residuals(sol).norms()
        worst["solutions"] = max(worst["solutions"], *(norms[n] for n in TORSION_ANCHORS))
        worst["constraints"] = max(worst["constraints"], *(float(v) for v in parametrized_constraints(sol).values()))
        s = j.data.su3
        p0, q0, r0 = j.data.p, j.data.q, j.data.r
        dP, dQ, dR, dS = (random_form(rng, 6, 1) for _ in range(4))
        d_eta, d_theta = random_form(rng, 6, 2), random_form(rng, 6, 2)
        for lhs, rhs in dirac_regrouping(s, p0, q0, r0, dP, dQ, dR, dS, d_eta, d_theta):
            worst["regrouping"] = max(worst["regrouping"], _size(lhs - rhs))
        v = LinearizationVars(p0, q0, r0, P=dP, Q=dQ, R=dR, S=dS, eta=d_eta, theta=d_theta)
        there = linearization_change_of_variables(v, "forward")
        back = linearization_change_of_variables(replace(there, P=None, Q=None, R=None, S=None, eta=None, theta=None),
                                                 "backward")
        worst["linear"] = max(worst["linear"], *(_size(a - b) for a, b in zip(back.backward_tuple(), v.backward_tuple())))
    report.add("torsion.dphi_decomposition", worst["decomposition"], 0.0,
               "dΦ = −η∧(b) + θ∧(c) + (d) + η∧θ∧dω + pq ω∧dω")
    report.add("torsion.parametrized_solutions", worst["solutions"], 0.0,
               "torsion-class parametrization solves the system")
    report.add("torsion.parametrized_constraints", worst["constraints"], 0.0,
               "torsion classes of a solution")
    report.add("torsion.corollary_combination", worst["corollary"], 0.0,
               "first corollary is a combination of the residuals")
    report.add("linearization.dirac_regrouping", worst["regrouping"], 0.0,
               "linearized system in Dirac form")
    report.add("linearization.round_trip", worst["linear"], 0.0, "change of variables is invertible")


def cmd_verify(cfg):
    rng = np.random.default_rng(cfg.seed)
    report = Report("verify", cfg.seed, cfg.backend)
    report.info["structures"] = cfg.structures + 1
    if cfg.mutate_sign:
        report.info["mutated"] = cfg.mutate_sign
    _identity_battery(cfg, rng, report)
    _hitchin_checks(cfg, rng, report)
    _torsion_class_checks(cfg, rng, report)
    _cayley_checks(cfg, rng, report)
    if cfg.full:
        _torsion_battery(cfg, rng, report)
    return report


# ============================================================================
# TORSION
# ============================================================================

def _single_input(cfg):
    if cfg.inputs:
        return load_record(cfg.inputs[0])
    if cfg.preset:
        return load_record(preset_path(cfg.preset))
    raise UsageError("give --input or --preset")


def cmd_torsion(cfg):
    record = _single_input(cfg)
    jet = jet_from_record(record)
    source = record.get("kind", "jet")
    rep = torsion_residuals(jet)
    report = Report("torsion", cfg.seed, FLOAT if isinstance(jet.data.p, float) else EXACT)
    for name, value in rep.norms().items():
        anchor = TORSION_ANCHORS[name]
        if source == "parametrized":
            anchor += " (torsion-class parametrization)"
        report.add(f"residual.{name}", value, cfg.exact_tol, anchor)
    if source == "parametrized":
        for name, value in parametrized_constraints(jet).items():
            report.add(f"constraint.{name}", float(value), cfg.exact_tol, "torsion classes of a solution")
    report.info["source"] = source
    report.info["nonzero"] = rep.nonzero()
    if cfg.full:
        report.info["residuals"] = {name: form_to_record(getattr(rep, name)) for name in rep.FIELDS}
    return report


# ============================================================================
# SCAN AND BETTI
# ============================================================================

def cmd_scan(cfg):
    record = _single_input(cfg)
    L, k, extras = lattice_from_record(record, k=cfg.k)
    if cfg.kahler:
        k = KahlerVector(cfg.kahler)
    if k is None:
        raise UsageError("no Kähler vector: give --kahler or a record with one")
    result = chern_scan(L, k, extras["filters"])
    report = Report("scan", cfg.seed, EXACT)
    expect = extras["expect"]
    anchor = "integral classes orthogonal to [ω]"
    if "kernel_rank" in expect:
        report.add("scan.kernel_rank", result.kernel_rank, None, anchor,
                   passed=result.kernel_rank == expect["kernel_rank"])
    else:
        report.note("scan.kernel_rank", result.kernel_rank, anchor)
    report.add("scan.independent_pair", len(result.pair), None, "two independent primitive Chern classes",
               passed=len(result.pair) == 2)
    admissible = admissibility_report(L, k, result.pair, extras["link_b2"], extras["h5"])
    for entry in admissible.entries:
        if entry.status in (PASS, FAIL):
            report.add(f"admissible.{entry.name}", entry.detail, None, "topological condition",
                       passed=entry.status == PASS)
        else:
            report.note(f"admissible.{entry.name}", entry.status, entry.detail)
    if expect.get("canonical_smooth_iff_odd"):
        wrong = [w for w in range(2, 21) if seifert_filter(canonical_class(w), w) != (w % 2 == 1)]
        report.add("seifert.canonical_class", len(wrong), 0, "−(k+2)E + D₁ + D₂ is Seifert iff k is odd")
    report.info.update({
        "kahler": list(k.coords),
        "row": list(result.row),
        "clearing_factor": result.clearing_factor,
        "basis": [list(b) for b in result.basis],
        "candidates": [list(c.vector) for c in result.candidates[:10]],
        "pair": [list(c.vector) for c in result.pair],
        "params": extras["params"],
    })
    return report


def cmd_betti(cfg):
    record = _single_input(cfg)
    base, second, params, expect = gysin_from_record(record, p=cfg.p)
    middle = gysin_betti(base)
    final = gysin_betti(GysinInput(middle, second)) if second is not None else middle
    report = Report("betti", cfg.seed, EXACT)
    param = expect.get("param", "p")
    table = {int(deg): tuple(ac) for deg, ac in expect.get("betti", {}).items()}
    for deg, b in enumerate(final):
        if deg in table:
            a, c = table[deg]
            want = a * int(params[param]) + c
            report.add(f"betti.b{deg}", b, None, f"b{deg} = {a}·{param} + ({c}) = {want}", passed=b == want)
        else:
            report.note(f"betti.b{deg}", b, "Gysin sequence of the torus bundle")
    report.note("betti.euler", euler_characteristic(final), "alternating sum")
    report.info.update({"base": list(base.betti), "circle_bundle": list(middle), "torus_bundle": list(final),
                        "params": params, "poincare_mismatch": poincare_warnings(final)})
    return report


# ============================================================================
# GRID
# ============================================================================

def _dyadic(cfg):
    return (cfg.n // 4, cfg.n // 2, cfg.n)


def _plane_wave_dirac(n):
    """Deviation of Dirac² from the exact Laplacian on a plane wave in two directions."""
    s = standard_su3()
    chart = GridChart(dim=6, n_points=n, grid_axes=2)
    x1, x2 = chart.coordinates()
    wave = np.sin(x1) * np.sin(x2)
    other = np.cos(x1) * np.sin(x2)
    f = GridField.from_components(chart, 0, {(): wave})
    g = GridField.from_components(chart, 0, {(): other})
    gamma = GridField.from_components(chart, 1, {(1,): other, (2,): wave, (4,): wave})
    twice = dirac_flat(*dirac_flat(f, g, gamma, s), s)
    # every component is an eigenfunction of −∂₁² − ∂₂² with eigenvalue 2
    exact = (f * 2, g * 2, gamma * 2)
    return max((a - b).max_abs() for a, b in zip(twice, exact)) / 2.0, (f, g, gamma)


def _suite_dirac(cfg, rng, report):
    ns = _dyadic(cfg)
    errors = []
    for n in _progress(ns, cfg, "dirac"):
        err, fields = _plane_wave_dirac(n)
        errors.append(err)
    order = convergence_order(errors, ns)
    report.add("grid.dirac_order", order, 0.2, "Dirac² = Δ, second-order stencil", passed=abs(order - 2) <= 0.2)
    gap = dirac_laplacian_gap(*fields, standard_su3())
    report.add("grid.dirac_squared_laplacian", gap, 1e-9, "Dirac² = Δ on the discrete level")
    report.info["dirac_errors"] = dict(zip(map(str, ns), errors))
    if cfg.csv_dir:
        out = Path(cfg.csv_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, value in zip(("f", "g", "gamma"), dirac_flat(*fields, standard_su3())):
            value.to_csv(out / f"dirac_{name}_{ns[-1]}.csv")


def _suite_dstar_j_d(cfg, rng, report):
    s = standard_su3()
    chart = GridChart(dim=6, n_points=cfg.n, grid_axes=2)
    x1, x2 = chart.coordinates()
    h = GridField.from_components(chart, 0, {(): np.sin(x1) * np.cos(2 * x2) + np.cos(x1 + x2)})
    value = fd_dstar(grid_j(fd_d(h), s)).max_abs()
    report.add("grid.dstar_j_d", value, 1e-10, "d*J dh = 0 on a Calabi–Yau")


def _suite_dd_zero(cfg, rng, report):
    chart = GridChart(dim=6, n_points=cfg.n, grid_axes=2)
    values = rng.standard_normal(chart.shape + (15,))
    value = fd_d(fd_d(GridField(chart, 2, values))).max_abs()
    report.add("grid.dd_zero", value, 1e-10, "d∘d = 0")


def _closure_fields(chart):
    x1, x2 = chart.coordinates()
    c = lambda form: GridField.constant(chart, form)
    d = standard_data()
    eta = GridField.from_components(chart, 1, {(7,): 1.0, (1,): 0.1 * np.sin(x2)})
    theta = GridField.from_components(chart, 1, {(8,): 1.0, (3,): 0.1 * np.cos(x1)})
    p = GridField.from_components(chart, 0, {(): 1 + 0.2 * np.sin(x1)})
    q = GridField.from_components(chart, 0, {(): 1 + 0.1 * np.cos(x2)})
    r = GridField.from_components(chart, 0, {(): 0.1 * np.sin(x1 + x2)})
    return eta, theta, c(d.omega8), c(d.re8), c(d.im8), p, q, r


def _suite_closure(cfg, rng, report):
    ns = _dyadic(cfg)
    gaps = []
    for n in _progress(ns, cfg, "closure"):
        gaps.append(grid_spin7_closure(*_closure_fields(GridChart(dim=8, n_points=n, grid_axes=2))).gap_norm)
    order = convergence_order(gaps, ns)
    report.add("grid.closure_order", order, 0.25, "dΦ from the torsion residuals, discrete Leibniz rule",
               passed=abs(order - 2) <= 0.25)
    chart = GridChart(dim=8, n_points=ns[0], grid_axes=2)
    d = standard_data()
    const = [GridField.constant(chart, f) for f in (d.eta, d.theta, d.omega8, d.re8, d.im8)]
    const += [GridField.constant(chart, Form.constant(8, x)) for x in (d.p, d.q, d.r)]
    report.add("grid.closure_constant", grid_spin7_closure(*const).gap_norm, 1e-12, "constant data are closed")
    report.info["closure_gaps"] = dict(zip(map(str, ns), gaps))


def _suite_torus(cfg, rng, report):
    chart = GridChart(dim=6, n_points=cfg.n, grid_axes=2)
    x1, x2 = chart.coordinates()
    theta1 = GridField.from_components(chart, 1, {(1,): np.sin(x2), (3,): np.cos(x1)})
    residual, non_hym = first_order_torus_check(theta1, 2.0, standard_su3())
    report.add("grid.first_order_torus", residual, 1e-12, "dρ = −p₀⁻¹dθ₁∧ω₀")
    report.note("grid.first_order_non_hym", non_hym, "size of the non-Λ²₈ part of dθ₁")


def _suite_se(cfg, rng, report):
    worst = se_structure_check(SasakiEinsteinModel(), sample_sphere(rng, 100))
    for name, value in worst.items():
        report.add(f"model.se_{name}", value, 1e-10, "Sasaki–Einstein structure equations")


def _suite_cone(cfg, rng, report):
    points = sample_sphere(rng, 20) * rng.uniform(0.5, 3.0, size=(20, 1))
    cone = cone_structure(SasakiEinsteinModel(), points)
    report.add("model.cone_d_omega", cone.d_omega, 1e-9, "dω_C = 0")
    report.add("model.cone_d_re", cone.d_re, 1e-9, "dReΩ_C = 0")
    report.add("model.cone_d_im", cone.d_im, 1e-9, "dImΩ_C = 0")
    report.add("model.cone_monge_ampere", cone.ma_defect, 1e-10, "⅙ω³ = ¼ReΩ∧ImΩ")
    report.add("model.cone_flat", cone.flat_gap, 1e-10, "the round cone is flat C³")


def _suite_at2c(cfg, rng, report):
    slopes = []
    for _ in _progress(range(10), cfg, "at2c"):
        m = AT2CModel(eps=float(rng.uniform(0.5, 2.0)), p0=float(rng.uniform(0.5, 2.0)),
                      q0=float(rng.uniform(0.5, 2.0)), r0=float(rng.uniform(-0.5, 0.5)),
                      eta_twist=float(rng.uniform(-1, 1)), theta_twist=float(rng.uniform(-1, 1)))
        slopes.append(volume_growth(m, direction=sample_sphere(rng, 1)[0]))
    worst = max(abs(s - 6) for s in slopes)
    report.add("model.at2c_volume_growth", worst, 0.1, "vol{r ≤ R} grows like R⁶")
    report.info["at2c_slopes"] = slopes


SUITE_RUNNERS = {
    "dirac": _suite_dirac, "dstar_j_d": _suite_dstar_j_d, "dd_zero": _suite_dd_zero,
    "closure": _suite_closure, "torus": _suite_torus, "se": _suite_se, "cone": _suite_cone,
    "at2c": _suite_at2c,
}


def cmd_grid(cfg):
    report = Report("grid", cfg.seed, FLOAT)
    report.info["n"] = cfg.n
    names = SUITES if cfg.suite == "all" else (cfg.suite,)
    for name in names:
        # every suite gets its own stream so selecting one does not shift the others
        SUITE_RUNNERS[name](cfg, np.random.default_rng([cfg.seed, SUITES.index(name)]), report)
    return report


COMMANDS = {"verify": cmd_verify, "torsion": cmd_torsion, "scan": cmd_scan, "betti": cmd_betti, "grid": cmd_grid}


# ============================================================================
# ARGUMENTS AND OUTPUT
# ============================================================================

class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _int_tuple(text):
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser():
    common = ArgumentParser(add_help=False)
    common.add_argument('--backend', choices=[EXACT, FLOAT], default=EXACT)
    common.add_argument('--tol', type=float, default=1e-9, help='tolerance for floating-point checks')
    common.add_argument('--n', type=int, default=32, help='grid points per axis')
    common.add_argument('--seed', type=int, default=DEFAULT_SEED)
    common.add_argument('--preset', help='name of a file in presets/')
    common.add_argument('--input', action='append', default=[], help='input record (JSON)')
    common.add_argument('--output', help='write the machine-readable record here')
    common.add_argument('--format', choices=['table', 'record'], default='table', dest='fmt')
    common.add_argument('--check', action='store_true', help='exit 2 when an expected value is not met')
    common.add_argument('--full', action='store_true', help='run the extended suites')
    common.add_argument('--quiet', action='store_true', help='no progress bars')

    parser = ArgumentParser(description='Torsion-free Spin(7)-structures on T²-bundles: checks and tables')
    sub = parser.add_subparsers(dest='command', required=True)
    verify = sub.add_parser('verify', parents=[common], help='exact identity battery')
    verify.add_argument('--structures', type=int, default=200, help='random structures besides the standard one')
    verify.add_argument('--mutate-sign', choices=['omega', 're_omega', 'im_omega'],
                        help='negate one form before checking (debugging aid)')
    sub.add_parser('torsion', parents=[common], help='torsion residuals of a jet record')
    scan = sub.add_parser('scan', parents=[common], help='Chern classes orthogonal to a Kähler class')
    scan.add_argument('--kahler', type=_int_tuple, help='Kähler vector, e.g. 3,1,1,1')
    scan.add_argument('--k', type=int, help='orbifold weight for weighted presets')
    betti = sub.add_parser('betti', parents=[common], help='Betti numbers of a T²-bundle')
    betti.add_argument('--p', type=int, help='value of the preset parameter p')
    grid = sub.add_parser('grid', parents=[common], help='discrete convergence and model checks')
    grid.add_argument('--suite', choices=('all',) + SUITES, default='all')
    grid.add_argument('--csv-dir', help='dump the Dirac fields as CSV into this directory')
    return parser


def config_from_args(args):
    return RunConfig(
        command=args.command, inputs=tuple(args.input), preset=args.preset, backend=args.backend,
        tol=args.tol, n=args.n, seed=args.seed, output=args.output, fmt=args.fmt, check=args.check,
        full=args.full, structures=getattr(args, 'structures', 200), p=getattr(args, 'p', None),
        k=getattr(args, 'k', None), kahler=getattr(args, 'kahler', None), suite=getattr(args, 'suite', 'all'),
        mutate_sign=getattr(args, 'mutate_sign', None), csv_dir=getattr(args, 'csv_dir', None), quiet=args.quiet,
    )


def _format_value(value):
    if isinstance(value, float):
        return f"{value:.3e}"
    return str(value)


def print_table(report):
    print("\n" + "=" * 70)
    print(f"{report.command.upper()}  (seed {report.seed}, backend {report.backend})")
    print("=" * 70)
    for c in report.ordered():
        mark = {PASS: "✓", FAIL: "✗", INFO: "·"}[c.status]
        tol = "" if c.tolerance is None else f"  tol {_format_value(c.tolerance)}"
        print(f"  {mark} {c.name:<36} {_format_value(c.value):>12}{tol}")
        if c.status == FAIL:
            print(f"      expected: {c.anchor}")
    print("\n" + "=" * 70)
    if report.passed:
        print(f"✓ ALL {sum(c.status == PASS for c in report.checks)} CHECKS PASSED")
    else:
        print(f"✗ {len(report.failures)} CHECK(S) FAILED")
    print("=" * 70)


def emit(report, cfg):
    record = report.to_record()
    if cfg.fmt == "record":
        sys.stdout.write(dumps(record))
    else:
        print_table(report)
    if cfg.output:
        Path(cfg.output).write_text(dumps(record), encoding="utf-8")
    print(f"wall time {report.wall_time:.2f} s", file=sys.stderr)


def exit_code(report, cfg):
    if report.passed:
        return EXIT_OK
    return EXIT_FAIL if cfg.command == "verify" or cfg.check else EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        start = time.perf_counter()
        report = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"✗ {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MalformedInput, GeometryError) as exc:
        print(f"✗ {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    report.wall_time = time.perf_counter() - start
    emit(report, cfg)
    return exit_code(report, cfg)


if __name__ == "__main__":
    sys.exit(main())
