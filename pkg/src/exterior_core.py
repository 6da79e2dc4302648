#!/usr/bin/env python3
"""
Exterior Core - Exact Multilinear Algebra on Small Oriented Spaces

Forms on R^n (n <= 8) with exact rational or binary64 coefficients, together
with wedge and interior products, pullback by linear maps, musical
isomorphisms and a Hodge star computed from the Gram matrix that a metric
induces on the exterior powers.

Coefficients are either fractions.Fraction (exact backend) or float (float
backend). Python's numeric tower promotes Fraction to float as soon as a float
enters an expression, so a form carries whichever backend its inputs forced.

Classes:
    Form: homogeneous k-form with canonical strictly increasing index keys
    Metric: symmetric bilinear form on R^n
    Orientation: sign relative to e^{1...n}
    Tolerance: float comparison thresholds

Usage:
    from exterior_core import Form, Metric, wedge, hodge
    omega = Form.basis(6, 1, 2) + Form.basis(6, 3, 4) + Form.basis(6, 5, 6)
    top = wedge(omega, wedge(omega, omega))      # 6 e^{123456}
    star = hodge(omega, Metric.standard(6))      # 1/2 omega^2
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from types import MappingProxyType

import numpy as np
import sympy as sp

MAX_DIM = 8
EXACT = "exact"
FLOAT = "float"


# ============================================================================
# ERRORS
# ============================================================================

class GeometryError(ValueError):
    """Base class for every failure raised by the toolkit's library modules."""


class DimensionMismatch(GeometryError):
    pass


class SingularMatrix(GeometryError):
    pass


class NotPositiveDefinite(GeometryError):
    pass


# ============================================================================
# SCALARS
# ============================================================================

@dataclass(frozen=True)
class Tolerance:
    """Thresholds for float-backend comparisons. Exact values ignore them."""
    abs_tol: float = 1e-12
    rel_tol: float = 1e-9

    def close(self, a, b, scale=1.0):
        if is_exact(a) and is_exact(b):
            return a == b
        return abs(float(a) - float(b)) <= self.abs_tol + self.rel_tol * max(abs(float(scale)), abs(float(a)), abs(float(b)))


DEFAULT_TOL = Tolerance()


def to_scalar(x):
    """Coerce ints to Fraction and numpy floats to float; leave the rest."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (bool, np.bool_)):
        raise TypeError("booleans are not scalars")
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, sp.Rational):
        return Fraction(int(x.p), int(x.q))
    raise TypeError(f"unsupported scalar {x!r}")


def is_exact(x):
    return isinstance(x, (Fraction, int)) and not isinstance(x, bool)


def backend_of(values):
    return EXACT if all(is_exact(v) for v in values) else FLOAT


def sqrt_exact(x):
    """Square root that stays a Fraction when x is a perfect rational square."""
    x = to_scalar(x)
    if x < 0:
        raise GeometryError(f"square root of negative value {x}")
    if isinstance(x, Fraction):
        num, den = x.numerator, x.denominator
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn == num and rd * rd == den:
            return Fraction(rn, rd)
    return math.sqrt(float(x))


def is_zero(x, tol=DEFAULT_TOL):
    if is_exact(x):
        return x == 0
    return abs(x) <= tol.abs_tol


# ============================================================================
# INDEX BOOKKEEPING
# ============================================================================

@lru_cache(maxsize=None)
def basis_indices(n, k):
    """Strictly increasing k-tuples in {1..n}, lexicographic order."""
    return tuple(combinations(range(1, n + 1), k))


def sort_with_sign(idx):
    """Sort an index tuple. Returns (sorted, sign); sign is 0 on a repeat."""
    idx = tuple(idx)
    if len(set(idx)) != len(idx):
        return None, 0
    inversions = sum(1 for a in range(len(idx)) for b in range(a + 1, len(idx)) if idx[a] > idx[b])
    return tuple(sorted(idx)), (-1 if inversions % 2 else 1)


def complement(idx, n):
    return tuple(i for i in range(1, n + 1) if i not in idx)


# ============================================================================
# FORMS
# ============================================================================

class Form:
    """
    Homogeneous exterior form of degree k on R^n.

    Keys are canonicalized at construction (sorted with sign tracking,
    repeated indices dropped, zero coefficients pruned), so equality is a
    comparison of coefficient maps.

    Args:
        dim: ambient dimension n (1 <= n <= 8)
        degree: k >= 0; degrees above n only hold the zero form
        terms: mapping from index tuples (1-based) to scalars
    """

    __slots__ = ("dim", "degree", "_terms")

    def __init__(self, dim, degree, terms=None):
        if not 1 <= dim <= MAX_DIM:
            raise DimensionMismatch(f"dimension {dim} outside 1..{MAX_DIM}")
        if degree < 0:
            raise DimensionMismatch(f"negative degree {degree}")
        self.dim = dim
        self.degree = degree
        acc = {}
        for idx, value in (terms or {}).items():
            idx = tuple(idx)
            if len(idx) != degree or any(not 1 <= i <= dim for i in idx):
                raise DimensionMismatch(f"index {idx} invalid for a {degree}-form on R^{dim}")
            key, sign = sort_with_sign(idx)
            if sign == 0:
                continue
            acc[key] = acc.get(key, Fraction(0)) + sign * to_scalar(value)
        self._terms = {key: value for key, value in acc.items() if value != 0}

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------
    @classmethod
    def zero(cls, dim, degree):
        return cls(dim, degree)

    @classmethod
    def basis(cls, dim, *idx, coeff=1):
        """e^{i1...ik}, e.g. Form.basis(6, 1, 3, 5)."""
        return cls(dim, len(idx), {tuple(idx): coeff})

    @classmethod
    def constant(cls, dim, value):
        return cls(dim, 0, {(): value})

    @classmethod
    def from_vector(cls, dim, degree, values):
        keys = basis_indices(dim, degree)
        if len(values) != len(keys):
            raise DimensionMismatch(f"expected {len(keys)} coefficients, got {len(values)}")
        return cls(dim, degree, dict(zip(keys, values)))

    # ------------------------------------------------------------------
    # access
    # ------------------------------------------------------------------
    @property
    def terms(self):
        return MappingProxyType(self._terms)

    def __getitem__(self, idx):
        key, sign = sort_with_sign(idx)
        if sign == 0:
            return Fraction(0)
        return sign * self._terms.get(key, Fraction(0))

    def to_vector(self):
        return [self._terms.get(key, Fraction(0)) for key in basis_indices(self.dim, self.degree)]

    def top_coefficient(self):
        """Coefficient on e^{1...n} of a top-degree form."""
        if self.degree != self.dim:
            raise DimensionMismatch(f"degree {self.degree} is not top degree {self.dim}")
        return self._terms.get(tuple(range(1, self.dim + 1)), Fraction(0))

    @property
    def backend(self):
        return backend_of(self._terms.values())

    def to_float(self):
        return Form(self.dim, self.degree, {k: float(v) for k, v in self._terms.items()})

    def norm_sq(self):
        """Sum of squared coefficients (the standard-metric norm)."""
        return sum((v * v for v in self._terms.values()), Fraction(0))

    def max_abs(self):
        return max((abs(float(v)) for v in self._terms.values()), default=0.0)

    def is_zero(self, tol=None):
        if tol is None or self.backend == EXACT:
            return not self._terms
        return self.max_abs() <= tol.abs_tol

    def is_close(self, other, tol=DEFAULT_TOL):
        self._check_same_space(other)
        if self.backend == EXACT and other.backend == EXACT:
            return self == other
        scale = max(self.max_abs(), other.max_abs())
        return (self - other).max_abs() <= tol.abs_tol + tol.rel_tol * scale

    # ------------------------------------------------------------------
    # arithmetic
    # ------------------------------------------------------------------
    def _check_same_space(self, other):
        if not isinstance(other, Form):
            raise TypeError(f"expected a Form, got {type(other).__name__}")
        if (self.dim, self.degree) != (other.dim, other.degree):
            raise DimensionMismatch(
                f"cannot combine {self.degree}-form on R^{self.dim} with {other.degree}-form on R^{other.dim}")

    def __add__(self, other):
        self._check_same_space(other)
        out = dict(self._terms)
        for key, value in other._terms.items():
            out[key] = out.get(key, Fraction(0)) + value
        return Form(self.dim, self.degree, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Form(self.dim, self.degree, {k: -v for k, v in self._terms.items()})

    def __mul__(self, scalar):
        if isinstance(scalar, Form):
            return NotImplemented
        c = to_scalar(scalar)
        return Form(self.dim, self.degree, {k: c * v for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        c = to_scalar(scalar)
        if c == 0:
            raise ZeroDivisionError("form divided by zero")
        return self * (1 / c)

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return (self.dim, self.degree) == (other.dim, other.degree) and self._terms == other._terms

    __hash__ = None

    def wedge(self, other):
        return wedge(self, other)

    def __repr__(self):
        if not self._terms:
            return f"Form({self.dim}, {self.degree}, 0)"
        parts = [f"{v}*e^{''.join(map(str, k)) or '()'}" for k, v in sorted(self._terms.items())]
        return f"Form({self.dim}, {self.degree}, " + " + ".join(parts) + ")"


# ============================================================================
# PRODUCTS
# ============================================================================

def wedge(a, b):
    """Exterior product; degrees beyond the dimension give the zero form."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"wedge of forms on R^{a.dim} and R^{b.dim}")
    out = {}
    for ka, va in a._terms.items():
        for kb, vb in b._terms.items():
            key, sign = sort_with_sign(ka + kb)
            if sign:
                out[key] = out.get(key, Fraction(0)) + sign * va * vb
    return Form(a.dim, a.degree + b.degree, out)


def wedge_all(*forms):
    result = forms[0]
    for f in forms[1:]:
        result = wedge(result, f)
    return result


def wedge_power(a, m):
    result = Form.constant(a.dim, 1)
    for _ in range(m):
        result = wedge(result, a)
    return result


def interior(v, a):
    """
    Contraction v ⌟ a of a vector (coefficients in the standard basis) into a form.

    Contracting a 0-form gives the zero 0-form.
    """
    if len(v) != a.dim:
        raise DimensionMismatch(f"vector of length {len(v)} against a form on R^{a.dim}")
    if a.degree == 0:
        return Form.zero(a.dim, 0)
    v = [to_scalar(x) for x in v]
    out = {}
    for key, value in a._terms.items():
        for pos, i in enumerate(key):
            c = v[i - 1]
            if c == 0:
                continue
            rest = key[:pos] + key[pos + 1:]
            sign = -1 if pos % 2 else 1
            out[rest] = out.get(rest, Fraction(0)) + sign * c * value
    return Form(a.dim, a.degree - 1, out)


def unit_vector(n, i):
    """Coordinate vector e_i (1-based) as a list of Fractions."""
    return [Fraction(1) if j == i else Fraction(0) for j in range(1, n + 1)]


def one_form(values):
    return Form.from_vector(len(values), 1, list(values))


# ============================================================================
# MATRICES
# ============================================================================

def as_matrix(A):
    return tuple(tuple(to_scalar(x) for x in row) for row in A)


def identity_matrix(n):
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def _is_exact_matrix(A):
    return all(is_exact(x) for row in A for x in row)


def _to_sympy(A):
    return sp.Matrix([[sp.Rational(x.numerator, x.denominator) for x in row] for row in A])


def _from_sympy(M):
    return tuple(tuple(to_scalar(M[i, j]) for j in range(M.cols)) for i in range(M.rows))


def matmul(A, B):
    return tuple(tuple(sum((A[i][k] * B[k][j] for k in range(len(B))), Fraction(0))
                       for j in range(len(B[0]))) for i in range(len(A)))


def matvec(A, v):
    return [sum((A[i][k] * v[k] for k in range(len(v))), Fraction(0)) for i in range(len(A))]


def transpose(A):
    return tuple(zip(*A))


def determinant(A):
    A = as_matrix(A)
    if _is_exact_matrix(A):
        return to_scalar(_to_sympy(A).det())
    return float(np.linalg.det(np.array(A, dtype=float)))


def inverse(A):
    A = as_matrix(A)
    if determinant(A) == 0:
        raise SingularMatrix("matrix is not invertible")
    if _is_exact_matrix(A):
        return _from_sympy(_to_sympy(A).inv())
    return tuple(tuple(float(x) for x in row) for row in np.linalg.inv(np.array(A, dtype=float)))


def solve_linear(M, b):
    """Solve M x = b exactly (sympy) or in binary64 (numpy least squares)."""
    M = as_matrix(M)
    b = [to_scalar(x) for x in b]
    if _is_exact_matrix(M) and all(is_exact(x) for x in b):
        sol = _to_sympy(M).LUsolve(_to_sympy([[x] for x in b]))
        return [to_scalar(sol[i, 0]) for i in range(sol.rows)]
    x, *_ = np.linalg.lstsq(np.array(M, dtype=float), np.array(b, dtype=float), rcond=None)
    return [float(t) for t in x]


# ============================================================================
# LINEAR MAPS ON FORMS
# ============================================================================

def _covector_images(A, n):
    # e^i ∘ A = sum_j A[i][j] e^j
    return [Form(n, 1, {(j + 1,): A[i][j] for j in range(n)}) for i in range(n)]


def pullback(A, a):
    """
    Pullback (A^*a)(v1..vk) = a(Av1, ..., Avk) by an invertible n×n matrix.

    Functorial: pullback(AB) = pullback(B) ∘ pullback(A).
    """
    A = as_matrix(A)
    n = a.dim
    if len(A) != n:
        raise DimensionMismatch(f"{len(A)}×{len(A)} matrix acting on R^{n}")
    if determinant(A) == 0:
        raise SingularMatrix("pullback by a singular matrix")
    images = _covector_images(A, n)
    result = Form.zero(n, a.degree)
    for key, value in a._terms.items():
        term = Form.constant(n, value)
        for i in key:
            term = wedge(term, images[i - 1])
        result = result + term
    return result


def derivation(A, a):
    """Extend α ↦ α∘A on covectors to forms as a derivation."""
    A = as_matrix(A)
    n = a.dim
    images = _covector_images(A, n)
    result = Form.zero(n, a.degree)
    for key, value in a._terms.items():
        for pos in range(len(key)):
            term = Form.constant(n, value)
            for q, i in enumerate(key):
                term = wedge(term, images[i - 1] if q == pos else Form.basis(n, i))
            result = result + term
    return result


# ============================================================================
# METRICS, ORIENTATIONS, HODGE STAR
# ============================================================================

@dataclass(frozen=True)
class Orientation:
    """Sign of the orientation relative to e^{1...n}."""
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise GeometryError(f"orientation sign must be ±1, got {self.sign}")


@dataclass(frozen=True)
class Metric:
    """Symmetric n×n matrix; positive-definiteness is checked where it matters."""
    matrix: tuple

    def __post_init__(self):
        m = as_matrix(self.matrix)
        n = len(m)
        if any(len(row) != n for row in m):
            raise DimensionMismatch("metric matrix must be square")
        if any(m[i][j] != m[j][i] for i in range(n) for j in range(n)):
            raise GeometryError("metric matrix must be symmetric")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def standard(cls, n):
        return cls(identity_matrix(n))

    @classmethod
    def diagonal(cls, values):
        n = len(values)
        return cls(tuple(tuple(values[i] if i == j else 0 for j in range(n)) for i in range(n)))

    @property
    def dim(self):
        return len(self.matrix)

    @property
    def backend(self):
        return EXACT if _is_exact_matrix(self.matrix) else FLOAT

    @cached_property
    def det(self):
        return determinant(self.matrix)

    @cached_property
    def inverse(self):
        return inverse(self.matrix)

    def is_positive_definite(self, floor=1e-12):
        """Leading principal minors (exact) or an eigenvalue floor (float)."""
        if self.backend == EXACT:
            M = _to_sympy(self.matrix)
            return all(M[:k, :k].det() > 0 for k in range(1, self.dim + 1))
        eig = np.linalg.eigvalsh(np.array(self.matrix, dtype=float))
        return bool(eig.min() > floor * max(1.0, abs(eig).max()))

    def require_positive_definite(self):
        if not _positive_definite_cached(self):
            raise NotPositiveDefinite("metric is not positive-definite")

    def to_float(self):
        return Metric(tuple(tuple(float(x) for x in row) for row in self.matrix))


@lru_cache(maxsize=4096)
def _positive_definite_cached(g):
    return g.is_positive_definite()


@lru_cache(maxsize=4096)
def gram(g, k):
    """
    Gram matrix of the inner product induced by g on k-forms.

    Entry (I, J) is det(g^{-1}[I, J]), read off as the e^J coefficient of the
    pullback of e^I by g^{-1}.
    """
    n = g.dim
    keys = basis_indices(n, k)
    ginv = g.inverse
    rows = []
    for key in keys:
        img = Form.constant(n, 1)
        for i in key:
            img = wedge(img, Form(n, 1, {(j + 1,): ginv[i - 1][j] for j in range(n)}))
        rows.append(tuple(img[other] for other in keys))
    return tuple(rows)


def inner(a, b, g):
    if a.dim != g.dim or b.dim != g.dim or a.degree != b.degree:
        raise DimensionMismatch("inner product of mismatched forms")
    if a.degree > a.dim:
        return Fraction(0)
    G = gram(g, a.degree)
    va, vb = a.to_vector(), b.to_vector()
    total = Fraction(0)
    for i, x in enumerate(va):
        if x == 0:
            continue
        row = G[i]
        total += x * sum((row[j] * y for j, y in enumerate(vb) if y != 0), Fraction(0))
    return total


def volume_form(g, o=Orientation()):
    return Form.basis(g.dim, *range(1, g.dim + 1), coeff=o.sign * sqrt_exact(g.det))


def hodge(a, g, o=Orientation()):
    """
    Hodge star defined by b ∧ ⋆a = ⟨b, a⟩ vol_g for every k-form b.

    Raises:
        NotPositiveDefinite: if g is not positive-definite
    """
    if a.dim != g.dim:
        raise DimensionMismatch(f"form on R^{a.dim} with metric on R^{g.dim}")
    g.require_positive_definite()
    n, k = a.dim, a.degree
    scale = o.sign * sqrt_exact(g.det)
    G = gram(g, k)
    va = a.to_vector()
    out = {}
    for row, key in zip(G, basis_indices(n, k)):
        value = sum((row[j] * x for j, x in enumerate(va) if x != 0), Fraction(0))
        if value == 0:
            continue
        rest = complement(key, n)
        _, sign = sort_with_sign(key + rest)
        out[rest] = sign * scale * value
    return Form(n, n - k, out)


def flat(v, g):
    """Lower an index: v ↦ g(v, ·)."""
    if len(v) != g.dim:
        raise DimensionMismatch("vector and metric dimensions differ")
    return one_form(matvec(g.matrix, [to_scalar(x) for x in v]))


def sharp(gamma, g):
    """Raise an index: the vector X with g(X, ·) = γ."""
    if gamma.degree != 1 or gamma.dim != g.dim:
        raise DimensionMismatch("sharp needs a 1-form on the metric's space")
    g.require_positive_definite()
    return matvec(g.inverse, gamma.to_vector())


# ============================================================================
# EMBEDDINGS R^m ⊂ R^n
# ============================================================================

def lift(a, n):
    """View a form on R^m as a form on R^n (m <= n) in the first m indices."""
    if n < a.dim:
        raise DimensionMismatch(f"cannot lift from R^{a.dim} into R^{n}")
    return Form(n, a.degree, dict(a._terms))


def horizontal_part(a, m, strict=True):
    """
    Restrict a form on R^n to its terms in indices 1..m.

    With strict=True any term touching an index above m raises.
    """
    kept = {}
    for key, value in a._terms.items():
        if key and key[-1] > m:
            if strict:
                raise DimensionMismatch(f"term e^{key} is not horizontal in R^{m}")
            continue
        kept[key] = value
    return Form(m, a.degree, kept)


# ============================================================================
# RANDOM SAMPLES
# ============================================================================

def random_form(rng, n, k, bound=3, density=1.0):
    """Form with small random integer coefficients drawn from a numpy Generator."""
    terms = {}
    for key in basis_indices(n, k):
        if density < 1.0 and rng.random() > density:
            continue
        terms[key] = Fraction(int(rng.integers(-bound, bound + 1)))
    return Form(n, k, terms)


def random_vector(rng, n, bound=3):
    return [Fraction(int(x)) for x in rng.integers(-bound, bound + 1, size=n)]
