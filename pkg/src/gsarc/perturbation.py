"""Finite-rank perturbation T = kappa - G0 of the nonlocal operator.

kappa(x,y) = -1/2|x-y| and every G0 is -1/2|x-y| + Q, so T = -Q is a symmetric
polynomial kernel.  Its matrix acts on a small polynomial basis and its
spectrum is computed exactly: rational eigenvalues and quadratic surds are
recovered from the rational characteristic polynomial, anything left over
(irreducible cubic/quartic factors) is kept numerically.
"""

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from . import bc as bcm
from .greens import zero_disc_green_coefficients, green_kernel, zero_discriminant_delta, zero_mode_denominator
from .kernels import (
    X,
    Y,
    BivariatePoly,
    PiecewiseSymmetricKernel,
    Polynomial1D,
    as_fraction,
    exact_rank,
    frac_str,
)

ROOT_DPS = 80


class PerturbationError(ValueError):
    pass


class AsymmetricKernel(PerturbationError):
    pass


class NoClosedForm(PerturbationError):
    pass


# --- Q(sqrt m) -------------------------------------------------------------------------------


def _squarefree_split(n):
    """n = k^2 * m with small square factors pulled into k (m need not be fully squarefree)."""
    sign = -1 if n < 0 else 1
    n = abs(n)
    k = math.isqrt(n)
    if k * k == n:
        return k, sign
    k = 1
    p = 2
    while p * p <= n and p < 10**4:
        while n % (p * p) == 0:
            n //= p * p
            k *= p
        p += 1
    return k, sign * n


class QuadSurd:
    """p + q*sqrt(m) with rational p, q and integer m (m may be negative)."""

    __slots__ = ("p", "q", "m")

    def __init__(self, p, q=0, m=1):
        self.p = Fraction(p)
        self.q = Fraction(q)
        self.m = int(m)
        if self.q == 0 or self.m == 1:
            self.p, self.q, self.m = self.p + (self.q if self.m == 1 else 0), Fraction(0), self.m

    def _lift(self, other):
        if isinstance(other, QuadSurd):
            if other.q != 0 and self.q != 0 and other.m != self.m:
                raise PerturbationError("mixing different quadratic fields")
            return other
        return QuadSurd(other, 0, self.m)

    def _m(self, other):
        return self.m if self.q != 0 else other.m

    def __add__(self, other):
        o = self._lift(other)
        return QuadSurd(self.p + o.p, self.q + o.q, self._m(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadSurd(-self.p, -self.q, self.m)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        m = self._m(o)
        return QuadSurd(self.p * o.p + self.q * o.q * m, self.p * o.q + self.q * o.p, m)

    __rmul__ = __mul__

    def conjugate(self):
        return QuadSurd(self.p, -self.q, self.m)

    def norm(self):
        return self.p * self.p - self.q * self.q * self.m

    def __truediv__(self, other):
        o = self._lift(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt m)")
        c = self * o.conjugate()
        return QuadSurd(c.p / n, c.q / n, c.m)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.q == 0 and self.p == other
        if isinstance(other, QuadSurd):
            if self.q == 0 and other.q == 0:
                return self.p == other.p
            return (self.p, self.q, self.m) == (other.p, other.q, other.m)
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.q, self.m if self.q else 1))

    @property
    def is_rational(self):
        return self.q == 0

    def to_complex(self):
        with mpmath.workdps(40):
            v = mpmath.mpf(self.p.numerator) / self.p.denominator + mpmath.mpf(self.q.numerator) / self.q.denominator * mpmath.sqrt(self.m)
        return complex(v)

    def to_mp(self):
        return mpmath.mpf(self.p.numerator) / self.p.denominator + mpmath.mpf(self.q.numerator) / self.q.denominator * mpmath.sqrt(
            mpmath.mpf(self.m)
        )

    def __float__(self):
        if self.m < 0 and self.q != 0:
            raise TypeError("complex surd")
        return float(self.to_complex().real)

    def __str__(self):
        if self.q == 0:
            return frac_str(self.p)
        c = math.lcm(self.p.denominator, self.q.denominator)
        a, b = int(self.p * c), int(self.q * c)
        rad = f"sqrt({self.m})" if abs(b) == 1 else f"{abs(b)}*sqrt({self.m})"
        if a == 0:
            num = rad if b > 0 else f"-{rad}"
            return num if c == 1 else f"{num}/{c}"
        num = f"{a}{'+' if b > 0 else '-'}{rad}"
        return num if c == 1 else f"({num})/{c}"

    def __repr__(self):
        return f"QuadSurd({self})"


def _is_zero(v):
    return v == 0


# --- exact linear algebra over a field (Fraction or QuadSurd entries) --------------------------


def _rref(rows):
    A = [list(r) for r in rows]
    nr, nc = len(A), len(A[0]) if A else 0
    pivots = []
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if not _is_zero(A[i][c])), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c] if not isinstance(A[r][c], QuadSurd) else QuadSurd(1) / A[r][c]
        A[r] = [v * inv for v in A[r]]
        for i in range(nr):
            if i != r and not _is_zero(A[i][c]):
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return A, pivots


def nullspace(rows):
    A, pivots = _rref(rows)
    nc = len(rows[0])
    free = [c for c in range(nc) if c not in pivots]
    zero = 0 * rows[0][0]
    out = []
    for f in free:
        v = [zero] * nc
        v[f] = zero + 1
        for i, c in enumerate(pivots):
            v[c] = -A[i][f]
        out.append(v)
    return out


def _solve_in_span(target, columns):
    """Coefficients c with sum c_j columns[j] = target, exactly, or None."""
    n = len(target)
    aug = [[col[i] for col in columns] + [target[i]] for i in range(n)]
    A, pivots = _rref(aug)
    k = len(columns)
    if k in pivots:
        return None
    sol = [Fraction(0)] * k
    for i, c in enumerate(pivots):
        sol[c] = A[i][k]
    return sol


# --- characteristic polynomial and its exact factorisation -----------------------------------


def charpoly(M):
    """Monic characteristic polynomial det(t I - M), coefficients lowest degree first (Faddeev-LeVerrier)."""
    n = len(M)
    if n == 0:
        return [Fraction(1)]
    A = [[Fraction(v) for v in row] for row in M]
    I = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    c = [Fraction(0)] * (n + 1)
    c[n] = Fraction(1)
    Mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        Mk = [[sum((A[i][l] * Mk[l][j] for l in range(n)), Fraction(0)) + c[n - k + 1] * I[i][j] for j in range(n)] for i in range(n)]
        AM = [[sum((A[i][l] * Mk[l][j] for l in range(n)), Fraction(0)) for j in range(n)] for i in range(n)]
        c[n - k] = -sum((AM[i][i] for i in range(n)), Fraction(0)) / k
    return c


def _poly_eval(c, x):
    acc = 0 * x
    for a in reversed(c):
        acc = acc * x + a
    return acc


def _poly_divmod(num, den):
    num = list(num)
    q = [Fraction(0)] * max(1, len(num) - len(den) + 1)
    while len(num) >= len(den) and any(num):
        shift = len(num) - len(den)
        f = num[-1] / den[-1]
        q[shift] = f
        for i, d in enumerate(den):
            num[i + shift] -= f * d
        num.pop()
    while num and num[-1] == 0:
        num.pop()
    return q, num


def _to_fraction(v, limit=10**30):
    return Fraction(mpmath.nstr(v, ROOT_DPS - 10, strip_zeros=False)).limit_denominator(limit)


@dataclass
class RootFactor:
    """One irreducible factor over Q of the characteristic polynomial."""

    degree: int
    roots: list  # exact values (Fraction or QuadSurd), or mpmath numbers when degree > 2
    exact: bool


def factor_roots(c):
    """Roots of the rational polynomial c (lowest first) grouped into irreducible factors of degree <= 2
    where possible; irreducible higher-degree parts are returned numerically."""
    c = [Fraction(v) for v in c]
    while c and c[-1] == 0:
        c.pop()
    factors = []
    while len(c) > 1 and c[0] == 0:
        c = c[1:]
        factors.append(RootFactor(1, [Fraction(0)], True))
    changed = True
    while len(c) > 2 and changed:
        changed = False
        with mpmath.workdps(ROOT_DPS):
            roots = mpmath.polyroots([mpmath.mpf(v.numerator) / v.denominator for v in reversed(c)], maxsteps=400, extraprec=400)
            for r in roots:
                if abs(mpmath.im(r)) < mpmath.mpf(10) ** (-(ROOT_DPS // 2)):
                    cand = _to_fraction(mpmath.re(r))
                    if _poly_eval(c, cand) == 0:
                        c, _ = _poly_divmod(c, [-cand, Fraction(1)])
                        factors.append(RootFactor(1, [cand], True))
                        changed = True
                        break
            if changed or len(c) <= 3:
                continue
            for i in range(len(roots)):
                for j in range(i + 1, len(roots)):
                    s, p = roots[i] + roots[j], roots[i] * roots[j]
                    if abs(mpmath.im(s)) > mpmath.mpf(10) ** -30 or abs(mpmath.im(p)) > mpmath.mpf(10) ** -30:
                        continue
                    quad = [_to_fraction(mpmath.re(p)), -_to_fraction(mpmath.re(s)), Fraction(1)]
                    q, rem = _poly_divmod(c, quad)
                    if not rem:
                        factors.append(_quadratic_factor(quad))
                        c = q
                        changed = True
                        break
                if changed:
                    break
    if len(c) == 2:
        factors.append(RootFactor(1, [-c[0] / c[1]], True))
    elif len(c) == 3:
        factors.append(_quadratic_factor(c))
    elif len(c) > 3:
        with mpmath.workdps(ROOT_DPS):
            roots = mpmath.polyroots([mpmath.mpf(v.numerator) / v.denominator for v in reversed(c)], maxsteps=400, extraprec=400)
        factors.append(RootFactor(len(c) - 1, list(roots), False))
    return factors


def _quadratic_factor(c):
    """Roots of c0 + c1 t + c2 t^2 in Q(sqrt m), minus branch first."""
    t0, s = c[0] / c[2], -c[1] / c[2]
    disc = s * s - 4 * t0
    if disc == 0:
        return RootFactor(1, [s / 2, s / 2], True)
    n = disc.numerator * disc.denominator
    k, m = _squarefree_split(n)
    half = Fraction(k, 2 * disc.denominator)
    if m == 1:
        return RootFactor(1, [s / 2 - half, s / 2 + half], True)
    return RootFactor(2, [QuadSurd(s / 2, -half, m), QuadSurd(s / 2, half, m)], True)


# --- kernels, bases, matrices ------------------------------------------------------------------


@dataclass(frozen=True)
class PerturbationKernel:
    bc: object
    T: BivariatePoly

    def to_json(self):
        return self.T.to_json()


def perturbation_kernel(bc):
    """T = kappa - G0; the |x-y| parts cancel exactly."""
    g0 = green_kernel(bc).g0
    diff = PiecewiseSymmetricKernel.nonlocal_kernel() - g0
    if diff.abs_coeff != 0:
        raise PerturbationError("|x-y| parts do not cancel")
    T = diff.lower
    if not T.is_symmetric():
        raise AsymmetricKernel("perturbation kernel is not symmetric")
    return PerturbationKernel(bc, T)


def _named_basis(bc):
    x = Polynomial1D.monomial(1)
    one = Polynomial1D.constant(1)
    k = bc.kind
    if k == bcm.DIRICHLET:
        return [one, x]
    if k == bcm.PERIODIC:
        return [one, x, x * x]
    if k == bcm.ANTIPERIODIC:
        return [one]
    if k == bcm.LDRR:
        return [x, one + x * x * x] if bc.delta == 1 else [one, x]
    a, b, d = bc.params
    if (a, b, d) == (-1, -1, 1):
        return []
    if (a, b, d) == (0, 0, 0):
        return [one, x - x * x]
    if bcm.discriminant(bc) == 0:
        return monomial_basis(3)
    return [one, x]


def monomial_basis(deg):
    return [Polynomial1D.monomial(k) for k in range(deg + 1)]


def _coeff_vector(p, n):
    return [p.coeff(k) for k in range(n)]


def matrix_in_basis(T, basis):
    """M[i][j] = coefficient of basis[i] in T(basis[j]) (T given as a bivariate polynomial kernel)."""
    if not basis:
        return []
    images = [T.apply(b) for b in basis]
    n = 1 + max([b.degree for b in basis] + [im.degree for im in images])
    cols = [_coeff_vector(b, n) for b in basis]
    M = [[None] * len(basis) for _ in basis]
    for j, im in enumerate(images):
        sol = _solve_in_span(_coeff_vector(im, n), cols)
        if sol is None:
            raise PerturbationError("basis is not invariant under T")
        for i, v in enumerate(sol):
            M[i][j] = v
    return M


@dataclass
class Eigen:
    value: object  # Fraction, QuadSurd, or an mpmath number for irreducible factors
    coords: list  # coordinates in the basis (same field as value, or floats)
    coeffs: list  # monomial coefficients of the eigenfunction, lowest first
    exact: bool

    @property
    def lambda_float(self):
        v = self.value
        if isinstance(v, Fraction):
            return float(v)
        if isinstance(v, QuadSurd):
            z = v.to_complex()
            return z.real if v.m > 0 or v.q == 0 else z
        z = complex(v)
        return z.real if abs(z.imag) < 1e-300 else z

    @property
    def lambda_exact(self):
        return str(self.value) if self.exact else None

    def coeffs_complex(self):
        out = []
        for c in self.coeffs:
            if isinstance(c, QuadSurd):
                out.append(c.to_complex())
            else:
                out.append(complex(c))
        return np.array(out)

    def coeffs_float(self):
        z = self.coeffs_complex()
        if np.max(np.abs(z.imag), initial=0) > 0:
            return z
        return z.real

    def vector_json(self):
        if self.exact:
            return [str(c) if isinstance(c, QuadSurd) else frac_str(Fraction(c)) for c in self.coeffs]
        return [float(v) for v in self.coeffs_float()]


@dataclass
class PerturbationSpectrum:
    bc: object
    kernel: BivariatePoly
    basis: list
    matrix: list
    eigen: list = field(default_factory=list)
    zero_multiplicity: int = 0
    rank: int = 0
    normalized_resolution: list = field(default_factory=list)

    @property
    def eigenvalues(self):
        return [e.lambda_float for e in self.eigen]

    @property
    def eigenfunctions(self):
        return [e.coeffs for e in self.eigen]

    def matrix_float(self):
        return np.array([[float(v) for v in row] for row in self.matrix], dtype=float)

    def to_json(self):
        return {
            "basis": [b.to_json() for b in self.basis],
            "matrix": [[frac_str(v) for v in row] for row in self.matrix],
            "eigen": [
                {"lambda_float": _jsonable(e.lambda_float), "lambda_exact": e.lambda_exact, "vector": e.vector_json()}
                for e in self.eigen
            ],
            "rank": self.rank,
        }


def _jsonable(v):
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    return float(v)


def perturbation_matrix(bc, basis=None):
    """Kernel, basis and exact matrix; eigen data left empty."""
    T = perturbation_kernel(bc).T
    basis = _named_basis(bc) if basis is None else list(basis)
    M = matrix_in_basis(T, basis)
    return PerturbationSpectrum(bc, T, basis, M)


def _monomial_coeffs(coords, basis, zero):
    n = 1 + max(b.degree for b in basis)
    out = [zero] * n
    for c, b in zip(coords, basis):
        for k in range(b.degree + 1):
            bk = b.coeff(k)
            if bk:
                out[k] = out[k] + c * bk
    while len(out) > 1 and _is_zero(out[-1]):
        out.pop()
    return out


def _normalize_leading(coords, coeffs):
    lead = next(c for c in reversed(coeffs) if not _is_zero(c))
    return [c / lead for c in coords], [c / lead for c in coeffs]


def _eigen_exact(M, basis, lam):
    n = len(M)
    shifted = [[(M[i][j] - lam if i == j else M[i][j] + 0 * lam) for j in range(n)] for i in range(n)]
    vecs = nullspace(shifted)
    out = []
    for v in vecs:
        coeffs = _monomial_coeffs(v, basis, 0 * lam)
        v, coeffs = _normalize_leading(v, coeffs)
        out.append(Eigen(lam, v, coeffs, True))
    return out


def _eigen_numeric(M, basis, lam):
    A = np.array([[float(v) for v in row] for row in M], dtype=complex) - complex(lam) * np.eye(len(M))
    _, _, vh = np.linalg.svd(A)
    v = vh[-1].conj()
    coeffs = np.zeros(1 + max(b.degree for b in basis), dtype=complex)
    for c, b in zip(v, basis):
        coeffs[: b.degree + 1] += c * np.array(b.to_floats())
    k = np.max(np.nonzero(np.abs(coeffs) > 1e-14 * np.abs(coeffs).max())[0])
    lead = coeffs[k]
    return Eigen(lam, list(v / lead), list(coeffs[: k + 1] / lead), False)


def _sort_key(e):
    z = complex(e.lambda_float)
    return (round(z.real, 14), z.imag)


def eigenpairs(M, basis):
    """Nonzero eigenpairs (exact where possible) and the algebraic multiplicity of 0."""
    factors = factor_roots(charpoly(M))
    zero_mult = 0
    eig = []
    for f in factors:
        for lam in f.roots:
            if f.exact and lam == 0:
                zero_mult += 1
                continue
            if f.exact:
                if any(e.exact and e.value == lam for e in eig):
                    continue
                eig.extend(_eigen_exact(M, basis, lam))
            else:
                eig.append(_eigen_numeric(M, basis, lam))
    eig.sort(key=_sort_key)
    return eig, zero_mult


def _inner(u, v, zero):
    acc = zero
    for i, a in enumerate(u):
        if _is_zero(a):
            continue
        for j, b in enumerate(v):
            if not _is_zero(b):
                acc = acc + a * b * Fraction(1, i + j + 1)
    return acc


def _orthogonalize_groups(eig):
    """Gram-Schmidt (L^2) inside each repeated eigenvalue, exact where the eigenvalue is exact."""
    out = []
    for e in eig:
        if e.exact:
            zero = 0 * e.value
            c = list(e.coeffs)
            for prev in out:
                if prev.exact and prev.value == e.value:
                    r = _inner(c, prev.coeffs, zero) / _inner(prev.coeffs, prev.coeffs, zero)
                    n = max(len(c), len(prev.coeffs))
                    c = [(c[k] if k < len(c) else zero) - r * (prev.coeffs[k] if k < len(prev.coeffs) else zero) for k in range(n)]
            out.append(Eigen(e.value, e.coords, c, True))
        else:
            out.append(e)
    return out


def _gram(n):
    return np.array([[1.0 / (i + j + 1) for j in range(n)] for i in range(n)])


def _normalize_float(c):
    c = np.asarray(c, dtype=float)
    return c / math.sqrt(c @ _gram(len(c)) @ c)


def perturbation_spectrum(bc, basis=None):
    spec = perturbation_matrix(bc, basis)
    if not spec.basis:
        return spec
    eig, zm = eigenpairs(spec.matrix, spec.basis)
    eig = _orthogonalize_groups(eig)
    spec.eigen, spec.zero_multiplicity = eig, zm
    spec.rank = exact_rank(spec.matrix)
    spec.normalized_resolution = [(e.lambda_float, _normalize_float(e.coeffs_float())) for e in eig]
    return spec


def rank(bc):
    """Basis-free rank: rank of the coefficient matrix t_ij of T."""
    T = perturbation_kernel(bc).T
    if T.is_zero():
        return 0
    return exact_rank(T.coefficient_matrix())


def reconstruct_float(spec):
    """sum lambda_k u_k(x) u_k(y) with unit-norm u_k, as a coefficient matrix."""
    n = 1 + max([len(u) - 1 for _, u in spec.normalized_resolution] + [spec.kernel.degree_x, spec.kernel.degree_y, 0])
    R = np.zeros((n, n))
    for lam, u in spec.normalized_resolution:
        v = np.zeros(n)
        v[: len(u)] = u
        R += lam * np.outer(v, v)
    return R


def reconstruct_exact(spec):
    """The same sum in exact arithmetic when every eigenvalue is exact; conjugate surd pairs add up
    to rational coefficients.  Returns a BivariatePoly or None."""
    if not all(e.exact for e in spec.eigen):
        return None
    acc = {}
    for e in spec.eigen:
        zero = 0 * e.value
        w = e.value / _inner(e.coeffs, e.coeffs, zero)
        for i, a in enumerate(e.coeffs):
            for j, b in enumerate(e.coeffs):
                term = w * a * b
                m = term.m if isinstance(term, QuadSurd) and not term.is_rational else 1
                acc[(i, j, m)] = acc.get((i, j, m), 0) + term
    out = {}
    for (i, j, _), v in acc.items():
        if isinstance(v, QuadSurd):
            if not v.is_rational:
                raise PerturbationError("irrational remainder in reconstruction")
            v = v.p
        out[(i, j)] = out.get((i, j), Fraction(0)) + v
    return BivariatePoly({k: v for k, v in out.items() if v})


def literal_resolution_residual(spec):
    """max |T - sum u_k(x) u_k(y)| coefficient with unnormalized eigenfunctions (the unweighted form)."""
    n = 1 + max([len(e.coeffs) - 1 for e in spec.eigen] + [spec.kernel.degree_x, 0])
    R = np.zeros((n, n), dtype=complex)
    for e in spec.eigen:
        v = np.zeros(n, dtype=complex)
        c = e.coeffs_complex()
        v[: len(c)] = c
        R += np.outer(v, v)
    T = np.zeros((n, n))
    for (i, j), c in spec.kernel.to_float_dict().items():
        T[i, j] = c
    return float(np.abs(T - R).max())


# --- closed forms ------------------------------------------------------------------------------


@dataclass
class ClosedFormPair:
    value: object  # mpmath number
    exact: str
    offset: object = None  # eigenfunction is offset + x (None when not available)


def delta_tilde(alpha, beta, delta):
    a, b, d = (as_fraction(v) for v in (alpha, beta, delta))
    return (
        9 + 9 * a + 3 * a**2 - 6 * b**2 - 3 * a * b**2 + b**4 - 9 * d - 9 * a * d - 3 * a**2 * d
        + 3 * b**2 * d + 2 * a * b**2 * d + 3 * d**2 + 3 * a * d**2 + a**2 * d**2
    )


def _sqrt_mp(q):
    return mpmath.sqrt(mpmath.mpf(q.numerator) / q.denominator)


def _mpq(q):
    return mpmath.mpf(q.numerator) / q.denominator


def closed_form_spectrum(bc):
    """Closed-form eigenvalues (and linear eigenfunctions offset + x where they exist)."""
    with mpmath.workdps(40):
        if bc.kind == bcm.LDRR and bc.delta != 1:
            k = bc.delta / (bc.delta - 1)
            disc = k * k - 3 * k + 3
            r = _sqrt_mp(disc)
            out = []
            for sgn in (-1, 1):
                lam = (_mpq(2 * k - 3) + sgn * 2 * r) / 12
                off = -(_mpq(k) - sgn * r) / _mpq(3 * k - 3)
                out.append(ClosedFormPair(lam, f"(2*{frac_str(k)}-3{'+' if sgn > 0 else '-'}2*sqrt({frac_str(disc)}))/12", off))
            return out
        if bc.kind != bcm.GSARC:
            raise NoClosedForm(f"no closed form for {bc.kind}")
        a, b, d = bc.params
        disc = bcm.discriminant(bc)
        if disc != 0:
            dt = delta_tilde(a, b, d)
            s = b * b + a * d
            N = 6 + 3 * a - 3 * d - s
            r = _sqrt_mp(dt)
            out = []
            for sgn in (-1, 1):
                lam = (_mpq(N) + sgn * 2 * r) / _mpq(12 * disc)
                off = None if a + d == 0 else (_mpq(3 - 3 * d - s) + sgn * r) / _mpq(3 * (a + d))
                out.append(ClosedFormPair(lam, f"({frac_str(N)}{'+' if sgn > 0 else '-'}2*sqrt({frac_str(dt)}))/{frac_str(12 * disc)}", off))
            return out
        if b == -a and a not in (0, -1):
            r30 = mpmath.sqrt(30)
            return [
                ClosedFormPair(_mpq(a / (12 * (1 + a))), frac_str(a / (12 * (1 + a))), mpmath.mpf(-0.5)),
                ClosedFormPair((-5 - r30) / 60, "(-5-sqrt(30))/60"),
                ClosedFormPair((-5 + r30) / 60, "(-5+sqrt(30))/60"),
            ]
        raise NoClosedForm("zero-discriminant case without the beta = -alpha reduction")


# --- zero-discriminant family: closed-form matrix entries -----------------------------------------


def d_coefficients(alpha, beta):
    """d_ij of T for the zero-discriminant family, from the G0 coefficients c_ij."""
    c = zero_disc_green_coefficients(alpha, beta)
    half = Fraction(1, 2)
    return {
        "d00": -c[(0, 0)],
        "d10": half - c[(1, 0)],
        "d20": -c[(2, 0)],
        "d11": -c[(1, 1)],
        "d30": -c[(3, 0)],
        "d21": -c[(2, 1)],
        "d31": -c[(3, 1)],
    }


def zero_disc_matrix_from_d(alpha, beta):
    """The 4x4 matrix assembled from the d_ij with the d21 terms left out of rows 2 and 3,
    as in the published entry list."""
    d = d_coefficients(alpha, beta)
    d00, d10, d20, d11, d30, d31 = (d[k] for k in ("d00", "d10", "d20", "d11", "d30", "d31"))
    F = Fraction
    row1 = [d00 / j + d10 / (j + 1) + d20 / (j + 2) + d30 / (j + 3) for j in range(1, 5)]
    row2 = [d10 / j + d11 / (j + 1) + d31 / (j + 3) for j in range(1, 5)]
    row3 = [d20 / j for j in range(1, 5)]
    row4 = [d30 / j + d31 / (j + 1) for j in range(1, 5)]
    return [[F(v) for v in r] for r in (row1, row2, row3, row4)]


def zero_disc_matrix_expanded(alpha, beta):
    """Closed forms of the 16 published entries in terms of (alpha, beta)."""
    a, b = as_fraction(alpha), as_fraction(beta)
    D = zero_mode_denominator(a, b)
    D2 = D * D
    m = [[None] * 4 for _ in range(4)]
    m[0][0] = (
        -(90 + 195 * a + 173 * a**2 + 69 * a**3 + 10 * a**4)
        + (165 + 224 * a + 114 * a**2 + 19 * a**3) * b
        - (143 + 120 * a + 31 * a**2) * b**2
        + 3 * (19 + 7 * a) * b**3
        - 9 * b**4
    ) / (40 * D2)
    m[0][1] = (
        -(135 + 291 * a + 273 * a**2 + 120 * a**3 + 20 * a**4)
        + 2 * (147 + 201 * a + 108 * a**2 + 20 * a**3) * b
        - 3 * (90 + 77 * a + 21 * a**2) * b**2
        + 4 * (27 + 10 * a) * b**3
        - 17 * b**4
    ) / (120 * D2)
    m[0][2] = (
        -2 * (93 + 198 * a + 189 * a**2 + 86 * a**3 + 15 * a**4)
        + (438 + 597 * a + 325 * a**2 + 62 * a**3) * b
        - (411 + 352 * a + 97 * a**2) * b**2
        + (165 + 61 * a) * b**3
        - 26 * b**4
    ) / (240 * D2)
    m[0][3] = (
        -4 * (420 + 885 * a + 850 * a**2 + 393 * a**3 + 70 * a**4)
        + (4125 + 5605 * a + 3064 * a**2 + 592 * a**3) * b
        - 2 * (1955 + 1673 * a + 462 * a**2) * b**2
        + (1573 + 581 * a) * b**3
        - 248 * b**4
    ) / (2800 * D2)
    m[1][0] = (
        (180 + 420 * a + 345 * a**2 + 117 * a**3 + 11 * a**4)
        - 2 * (150 + 270 * a + 147 * a**2 + 29 * a**3) * b
        + 3 * (65 + 87 * a + 20 * a**2) * b**2
        - 4 * (12 + 13 * a) * b**3
        - b**4
    ) / (40 * D2)
    m[1][1] = (
        2 * (45 + 120 * a + 109 * a**2 + 42 * a**3 + 5 * a**4)
        - (150 + 329 * a + 199 * a**2 + 44 * a**3) * b
        + (83 + 160 * a + 41 * a**2) * b**2
        - (7 + 31 * a) * b**3
        - 6 * b**4
    ) / (40 * D2)
    m[1][2] = (
        4 * (30 + 85 * a + 80 * a**2 + 32 * a**3 + 4 * a**4)
        - (200 + 480 * a + 301 * a**2 + 69 * a**3) * b
        + 2 * (50 + 117 * a + 31 * a**2) * b**2
        + 3 * (1 - 15 * a) * b**3
        - 12 * b**4
    ) / (80 * D2)
    m[1][3] = (
        2 * (1575 + 4620 * a + 4425 * a**2 + 1800 * a**3 + 229 * a**4)
        - (5250 + 13275 * a + 8475 * a**2 + 1978 * a**3) * b
        + 3 * (815 + 2160 * a + 581 * a**2) * b**2
        + (285 - 1243 * a) * b**3
        - 382 * b**4
    ) / (2800 * D2)
    sq = (1 - b) ** 2
    m[2] = [-3 * sq / (2 * D), -3 * sq / (4 * D), -sq / (2 * D), -3 * sq / (8 * D)]
    ab = a + b
    m[3] = [
        -(2 + a - b) * ab / (4 * D),
        -(3 + 2 * a - b) * ab / (12 * D),
        -(4 + 3 * a - b) * ab / (24 * D),
        -(5 + 4 * a - b) * ab / (40 * D),
    ]
    return m


def zero_discriminant_bc(alpha, beta):
    a, b = as_fraction(alpha), as_fraction(beta)
    return bcm.gsarc(a, b, zero_discriminant_delta(a, b))


def _random_rational(rng, num=7, den=5):
    return Fraction(rng.randint(-num * den, num * den), rng.randint(1, den))


def admissible_pairs(count, seed=0):
    """Random rational (alpha, beta) with alpha != -1, deterministic in seed."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        a, b = _random_rational(rng), _random_rational(rng)
        if a != -1:
            out.append((a, b))
    return out


def zero_discriminant_rank_survey(count=200, seed=0):
    """rank of T over random admissible (alpha, beta): returns {rank: [(alpha, beta), ...]}."""
    report = {}
    for a, b in admissible_pairs(count, seed):
        r = rank(zero_discriminant_bc(a, b))
        report.setdefault(r, []).append((a, b))
    return report


# --- Volterra --------------------------------------------------------------------------------


@dataclass
class VolterraResult:
    kernel_identity: bool
    matrix: list
    eigen: list


def volterra_decomposition():
    """Check (x-y)1{x<=y} - 1/2(x-y) = -1/2|x-y| on both branches and diagonalize the
    rank-2 part -1/2(x-y) on the basis {x, 1}."""
    half = Fraction(1, 2)
    lower = (X - Y) - (X - Y) * half  # x <= y, where |x-y| = y - x
    upper = BivariatePoly() - (X - Y) * half  # x > y, where |x-y| = x - y
    ok = lower == (Y - X) * (-half) and upper == (X - Y) * (-half)
    TV = (X - Y) * (-half)
    basis = [Polynomial1D.monomial(1), Polynomial1D.constant(1)]
    M = matrix_in_basis(TV, basis)
    eig = []
    for f in factor_roots(charpoly(M)):
        for lam in f.roots:
            n = len(M)
            shifted = [[(M[i][j] - lam if i == j else M[i][j] + 0 * lam) for j in range(n)] for i in range(n)]
            (v,) = nullspace(shifted)
            v = [c / v[1] for c in v]  # constant coordinate 1
            eig.append(Eigen(lam, v, _monomial_coeffs(v, basis, 0 * lam), True))
    eig.sort(key=lambda e: -complex(e.lambda_float).imag)
    return VolterraResult(ok, M, eig)
