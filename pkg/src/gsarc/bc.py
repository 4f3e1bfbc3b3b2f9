"""Boundary conditions for -u'' on [0,1]: the real-coupled family and its limits.

The coupled family is

    u'(0) =  alpha*u(0) + beta*u(1)
    u'(1) = -beta*u(0)  + delta*u(1)

Dirichlet, left-Dirichlet/right-Robin, periodic and anti-periodic problems are
separate variants because they sit at infinite parameter values or outside the
family altogether.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .kernels import as_fraction, frac_str

GSARC = "gsarc"
DIRICHLET = "dirichlet"
LDRR = "ldrr"
PERIODIC = "periodic"
ANTIPERIODIC = "antiperiodic"
KINDS = (GSARC, DIRICHLET, LDRR, PERIODIC, ANTIPERIODIC)


class BCError(ValueError):
    pass


class NotApplicable(BCError):
    pass


class SeparatedBC(BCError):
    pass


class DegenerateAngle(BCError):
    pass


class NotUnimodular(BCError):
    pass


@dataclass(frozen=True)
class BoundaryCondition:
    kind: str
    alpha: Fraction = None
    beta: Fraction = None
    delta: Fraction = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise BCError(f"unknown boundary condition kind {self.kind!r}")
        for name in ("alpha", "beta", "delta"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, as_fraction(v))
        need = {GSARC: ("alpha", "beta", "delta"), LDRR: ("delta",)}.get(self.kind, ())
        for name in ("alpha", "beta", "delta"):
            has = getattr(self, name) is not None
            if has != (name in need):
                raise BCError(f"{self.kind} {'requires' if not has else 'does not take'} {name}")

    @property
    def params(self):
        return self.alpha, self.beta, self.delta

    @property
    def name(self):
        return self.label or describe(self)

    def rows(self):
        """Two linear functionals on (u(0), u'(0), u(1), u'(1)) that vanish on the domain."""
        a, b, d = self.alpha, self.beta, self.delta
        F = Fraction
        if self.kind == GSARC:
            return ((-a, F(1), -b, F(0)), (b, F(0), -d, F(1)))
        if self.kind == DIRICHLET:
            return ((F(1), F(0), F(0), F(0)), (F(0), F(0), F(1), F(0)))
        if self.kind == LDRR:
            return ((F(1), F(0), F(0), F(0)), (F(0), F(0), -d, F(1)))
        if self.kind == PERIODIC:
            return ((F(1), F(0), F(-1), F(0)), (F(0), F(1), F(0), F(-1)))
        return ((F(1), F(0), F(1), F(0)), (F(0), F(1), F(0), F(1)))

    def to_json(self):
        d = {"kind": self.kind}
        for name in ("alpha", "beta", "delta"):
            v = getattr(self, name)
            if v is not None:
                d[name] = frac_str(v)
        return d

    @classmethod
    def from_json(cls, data):
        kw = {k: as_fraction(data[k]) for k in ("alpha", "beta", "delta") if data.get(k) is not None}
        return cls(data["kind"], **kw)


def gsarc(alpha, beta, delta, label=""):
    return BoundaryCondition(GSARC, alpha, beta, delta, label=label)


def nonlocal_bc():
    return gsarc(-1, -1, 1, "nonlocal")


def krein_von_neumann():
    return gsarc(-1, 1, 1, "kvn")


def neumann():
    return gsarc(0, 0, 0, "neumann")


def robin(alpha, delta):
    return gsarc(alpha, 0, delta, f"robin({as_fraction(alpha)},{as_fraction(delta)})")


def dirichlet():
    return BoundaryCondition(DIRICHLET, label="dirichlet")


def ldrr(delta, label=""):
    return BoundaryCondition(LDRR, delta=delta, label=label)


def periodic():
    return BoundaryCondition(PERIODIC, label="periodic")


def antiperiodic():
    return BoundaryCondition(ANTIPERIODIC, label="antiperiodic")


def radoux():
    return ldrr(1, "radoux")


def kato293(tau):
    """u(0) = 0, tau*u'(1) - u(1) = 0."""
    tau = as_fraction(tau)
    if tau == 0:
        raise BCError("kato293 requires tau != 0")
    return ldrr(1 / tau, "kato293")


def kato367(tau):
    """u(0) = 0, u'(1) + tau*u(1) = 0."""
    return ldrr(-as_fraction(tau), "kato367")


def stakgold(t):
    """u(0) = 0, sin(theta)u'(1) + cos(theta)u(1) = 0 with t = tan(theta).

    u'(1) = -cot(theta) u(1), so delta = -1/t; t = 0 is the Dirichlet problem.
    """
    t = as_fraction(t)
    if t == 0:
        return dirichlet()
    return ldrr(-1 / t, "stakgold")


def dirichlet_neumann():
    return ldrr(0, "dirichlet-neumann")


NAMED = {
    "nonlocal": nonlocal_bc,
    "kvn": krein_von_neumann,
    "dirichlet": dirichlet,
    "neumann": neumann,
    "periodic": periodic,
    "antiperiodic": antiperiodic,
    "radoux": radoux,
    "dirichlet-neumann": dirichlet_neumann,
}


def named(name):
    try:
        return NAMED[name]()
    except KeyError:
        raise BCError(f"unknown named boundary condition {name!r}") from None


def describe(bc):
    if bc.kind == GSARC:
        return f"gsarc({bc.alpha},{bc.beta},{bc.delta})"
    if bc.kind == LDRR:
        return f"ldrr({bc.delta})"
    return bc.kind


def discriminant(bc):
    """delta - alpha - 2 beta + beta^2 + alpha delta, or +-inf for the Dirichlet-type limits."""
    if bc.kind == GSARC:
        a, b, d = bc.params
        return d - a - 2 * b + b * b + a * d
    if bc.kind == DIRICHLET:
        return math.inf
    if bc.kind == LDRR:
        # leading behaviour as alpha -> inf is alpha*(delta - 1); delta = 1 keeps the finite value 1
        if bc.delta == 1:
            return Fraction(1)
        return math.inf if bc.delta > 1 else -math.inf
    raise NotApplicable(f"discriminant is not defined for {bc.kind}")


def has_zero_eigenvalue(bc):
    if bc.kind == GSARC:
        return discriminant(bc) == 0
    if bc.kind == PERIODIC:
        return True
    if bc.kind == LDRR:
        return bc.delta == 1
    return False


@dataclass(frozen=True)
class CouplingMatrix:
    b11: Fraction
    b12: Fraction
    b21: Fraction
    b22: Fraction

    def __post_init__(self):
        for n in ("b11", "b12", "b21", "b22"):
            object.__setattr__(self, n, as_fraction(getattr(self, n)))
        if self.det != 1:
            raise NotUnimodular(f"det B = {self.det}, expected 1")

    @property
    def det(self):
        return self.b11 * self.b22 - self.b12 * self.b21

    def as_array(self):
        return np.array([[self.b11, self.b12], [self.b21, self.b22]], dtype=float)

    def rows(self):
        return [[self.b11, self.b12], [self.b21, self.b22]]


def to_coupling_matrix(bc):
    if bc.kind != GSARC:
        raise NotApplicable("coupling matrix is defined for the coupled family only")
    a, b, d = bc.params
    if b == 0:
        raise SeparatedBC("beta = 0: separated conditions have no coupling matrix")
    return CouplingMatrix(-a / b, 1 / b, -(b * b + a * d) / b, d / b)


@dataclass(frozen=True)
class KanParams:
    theta: float
    r: float
    n: float

    def factors(self):
        c, s = math.cos(self.theta), math.sin(self.theta)
        K = np.array([[c, -s], [s, c]])
        A = np.diag([self.r, 1.0 / self.r])
        N = np.array([[1.0, self.n], [0.0, 1.0]])
        return K, A, N

    def matrix(self):
        K, A, N = self.factors()
        return K @ A @ N


def kan_decompose(B):
    """B = K(theta) A(r) N(n) via Gram-Schmidt on the first column of B."""
    M = B.as_array() if isinstance(B, CouplingMatrix) else np.asarray(B, dtype=float)
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    if abs(det - 1) > 1e-12:
        raise NotUnimodular(f"det B = {det!r}, expected 1")
    r = math.hypot(M[0, 0], M[1, 0])
    theta = math.atan2(M[1, 0], M[0, 0])
    if theta <= -math.pi:
        theta = math.pi
    c, s = math.cos(theta), math.sin(theta)
    # (K^T B)_{12} = r n
    n = (c * M[0, 1] + s * M[1, 1]) / r
    return KanParams(theta, r, n)


def kan_to_bc(params, tol=1e-14):
    """Coupled-family parameters (alpha, beta, delta) as floats from (theta, r, n)."""
    c, s = math.cos(params.theta), math.sin(params.theta)
    r, n = params.r, params.n
    den = n * r * r * c - s
    if abs(den) <= tol * max(1.0, abs(n) * r * r):
        raise DegenerateAngle("n r^2 cos(theta) - sin(theta) = 0")
    return (-r * r * c / den, r / den, (c + n * r * r * s) / den)
