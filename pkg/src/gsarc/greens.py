"""Green's functions G0 and zero-mode projection kernels p, with exact identity checks.

Every G0 is stored as -1/2|x-y| + Q(x,y) with Q a symmetric polynomial.  The
projection kernel p is lim z G(z,x,y); the spectral projection itself has
kernel -p.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from . import bc as bcm
from .kernels import (
    X,
    Y,
    BivariatePoly,
    PiecewiseSymmetricKernel,
    Polynomial1D,
    apply_to_polynomial,
    as_fraction,
    compose_kernel_with_poly,
    compose_poly_kernels,
)

HALF = Fraction(1, 2)


class GreensError(ValueError):
    pass


class LimitingCase(GreensError):
    pass


class IdentityViolation(GreensError):
    def __init__(self, check, monomial, residual):
        super().__init__(f"{check} fails for f = x^{monomial}: residual {residual!r}")
        self.check = check
        self.monomial = monomial
        self.residual = residual


@dataclass(frozen=True)
class GreenPackage:
    bc: bcm.BoundaryCondition
    g0: PiecewiseSymmetricKernel
    p: BivariatePoly
    multiplicity: int

    @property
    def poly_part(self):
        return self.g0.lower

    def to_json(self):
        return {"bc": self.bc.to_json(), "g0": self.g0.to_json(), "p": self.p.to_json(), "multiplicity": self.multiplicity}


def _g0(Q):
    return PiecewiseSymmetricKernel(-HALF, Q)


def _from_lower(L):
    """G0 given on x <= y as a full polynomial (including the 1/2(x - y) part)."""
    Q = L - (X - Y) * HALF
    if not Q.is_symmetric():
        raise GreensError("lower branch does not split as -1/2|x-y| + symmetric")
    return _g0(Q)


def zero_mode_denominator(alpha, beta):
    a, b = as_fraction(alpha), as_fraction(beta)
    return 3 + a * a + b * b - a * b + 3 * a - 3 * b


def zero_discriminant_delta(alpha, beta):
    """delta making the discriminant vanish, for alpha != -1."""
    a, b = as_fraction(alpha), as_fraction(beta)
    if a == -1:
        raise LimitingCase("alpha = -1 forces beta = 1 with delta free")
    return (a + 2 * b - b * b) / (a + 1)


def zero_disc_green_coefficients(alpha, beta):
    """Coefficients c_ij of G0 on x <= y for the zero-discriminant family (alpha != -1)."""
    a, b = as_fraction(alpha), as_fraction(beta)
    if a == -1:
        raise LimitingCase("alpha = -1 is the limiting case with beta = 1")
    D = zero_mode_denominator(a, b)
    D2 = 20 * D * D
    c = {}
    c[(0, 0)] = (
        4 * (15 + 30 * a + 21 * a**2 + 5 * a**3)
        - (75 + 87 * a + 28 * a**2) * b
        + 2 * (27 + 17 * a + 2 * a**2) * b**2
        - (23 + 7 * a) * b**3
        + 4 * b**4
    ) / D2
    c[(1, 0)] = (
        4 * a * (15 + 30 * a + 21 * a**2 + 5 * a**3)
        - (30 + 135 * a + 123 * a**2 + 34 * a**3) * b
        + 3 * (5 + 24 * a + 11 * a**2) * b**2
        + (9 - 7 * a) * b**3
        - 4 * b**4
    ) / D2
    c[(0, 1)] = 3 * (
        -4 * (15 + 25 * a + 15 * a**2 + 3 * a**3)
        + (110 + 115 * a + 39 * a**2 + 2 * a**3) * b
        - (95 + 56 * a + 9 * a**2) * b**2
        + (43 + 11 * a) * b**3
        - 8 * b**4
    ) / D2
    c[(1, 1)] = 3 * (
        -4 * a * (15 + 25 * a + 15 * a**2 + 3 * a**3)
        + a * (100 + 95 * a + 27 * a**2) * b
        + 2 * (10 - 25 * a - 11 * a**2) * b**2
        - (25 - 7 * a) * b**3
        + 8 * b**4
    ) / D2
    c[(2, 0)] = c[(0, 2)] = 3 * (1 - b) ** 2 / (2 * D)
    c[(3, 0)] = c[(0, 3)] = (1 - b) * (a + b) / (2 * D)
    c[(2, 1)] = c[(1, 2)] = 3 * (1 - b) * (a + b) / (2 * D)
    c[(3, 1)] = c[(1, 3)] = (a + b) ** 2 / (2 * D)
    return c


def _zero_mode_p(a, b):
    phi = Polynomial1D([1 - b, a + b])
    return BivariatePoly.from_factors(phi, phi) * (Fraction(-3) / zero_mode_denominator(a, b))


# Named rows.  Q is the symmetric polynomial added to -1/2|x-y|.

def _q_dirichlet():
    return (X + Y) * HALF - X * Y


def _q_neumann():
    return BivariatePoly.constant(Fraction(1, 3)) - (X + Y) * HALF + (X * X + Y * Y) * HALF


def _q_kvn():
    return (
        BivariatePoly.constant(Fraction(2, 15))
        - (X + Y) * Fraction(3, 5)
        + (X * X + Y * Y) * 2
        + X * Y * Fraction(6, 5)
        - X * Y * (X + Y) * 3
        - (X * X * X + Y * Y * Y)
        + X * Y * (X * X + Y * Y) * 2
    )


def _q_periodic():
    return BivariatePoly.constant(Fraction(1, 12)) + (X - Y) * (X - Y) * HALF


def _q_antiperiodic():
    return BivariatePoly.constant(Fraction(1, 4))


def _q_radoux():
    return (X + Y) * HALF - X * Y * Fraction(9, 5) + X * Y * (X * X + Y * Y) * HALF


def _q_robin(a, d):
    disc = d - a + a * d
    return (BivariatePoly.constant(2 - 2 * d) + (X + Y) * (a + d - a * d) + X * Y * (2 * a * d)) * (
        Fraction(-1) / (2 * disc)
    )


def _q_general(a, b, d):
    disc = d - a - 2 * b + b * b + a * d
    s = b * b + a * d
    return (BivariatePoly.constant(d - 1) + (X + Y) * ((s - a - d) / 2) - X * Y * s) * (1 / disc)


def _q_ldrr(d):
    # G0 = x - d/(d-1) x y on x <= y
    return (X + Y) * HALF - X * Y * (d / (d - 1))


def _q_limit_case_i(d):
    """alpha = -1, beta = 1, delta != 1.

    The y^2 coefficient is -30(1 - delta), mirroring x^2; that is what symmetry
    and the boundary conditions force.
    """
    L = (
        BivariatePoly.constant(-9 + 4 * d)
        + X * (19 - 4 * d)
        - X * X * (30 * (1 - d))
        + X * X * X * (10 * (1 - d))
        + Y * (39 - 24 * d)
        - Y * Y * (30 * (1 - d))
        + Y * Y * Y * (10 * (1 - d))
        + X * Y * (3 * (-23 + 8 * d))
        + X * Y * Y * (30 * (1 - d))
        + X * X * Y * (30 * (1 - d))
        - X * X * X * Y * (10 * (1 - d))
        - X * Y * Y * Y * (10 * (1 - d))
    ) * (Fraction(-1) / (20 * (1 - d)))
    return _from_lower(L).lower


def _q_zero_disc_green(a, b):
    return _from_lower(BivariatePoly(zero_disc_green_coefficients(a, b))).lower


def riesz_kernel(bc):
    """p(x,y) = lim_{z->0+} z G(z,x,y); the zero-mode projection has kernel -p."""
    if bc.kind == bcm.PERIODIC:
        return BivariatePoly.constant(-1)
    if bc.kind == bcm.LDRR:
        return X * Y * (-3) if bc.delta == 1 else BivariatePoly()
    if bc.kind != bcm.GSARC or bcm.discriminant(bc) != 0:
        return BivariatePoly()
    a, b, d = bc.params
    if a == -1:
        if d == 1:
            return BivariatePoly.constant(-4) + (X + Y) * 6 - X * Y * 12
        return BivariatePoly.from_factors(Polynomial1D([1, -1]), Polynomial1D([1, -1])) * (-3)
    return _zero_mode_p(a, b)


def _green_poly(bc):
    k = bc.kind
    if k == bcm.DIRICHLET:
        return _q_dirichlet()
    if k == bcm.PERIODIC:
        return _q_periodic()
    if k == bcm.ANTIPERIODIC:
        return _q_antiperiodic()
    if k == bcm.LDRR:
        return _q_radoux() if bc.delta == 1 else _q_ldrr(bc.delta)
    a, b, d = bc.params
    if (a, b, d) == (0, 0, 0):
        return _q_neumann()
    if (a, b, d) == (-1, 1, 1):
        return _q_kvn()
    if bcm.discriminant(bc) != 0:
        return _q_robin(a, d) if b == 0 else _q_general(a, b, d)
    if a == -1:
        return _q_limit_case_i(d)
    return _q_zero_disc_green(a, b)


def multiplicity_of(p):
    m = -p.diagonal().integral01()
    if m.denominator != 1 or m < 0:
        raise GreensError(f"zero-mode trace {m} is not a nonnegative integer")
    return int(m)


def green_kernel(bc):
    Q = _green_poly(bc)
    if not Q.is_symmetric():
        raise GreensError("polynomial part is not symmetric")
    p = riesz_kernel(bc)
    return GreenPackage(bc, _g0(Q), p, multiplicity_of(p))


@dataclass
class VerificationReport:
    bc: bcm.BoundaryCondition
    max_degree: int
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(ok for _, ok in self.checks)


def boundary_residuals(bc, u):
    du = u.derivative()
    vals = (u(Fraction(0)), du(Fraction(0)), u(Fraction(1)), du(Fraction(1)))
    return [sum((r * v for r, v in zip(row, vals)), Fraction(0)) for row in bc.rows()]


def verify_green(bc, max_deg=6, package=None):
    """Check -u'' = f - Pf, the boundary conditions, S P = 0 and (-p)o(-p) = -p exactly."""
    if max_deg > 6:
        raise ValueError("max_deg must be <= 6")
    pkg = package or green_kernel(bc)
    proj = -pkg.p
    report = VerificationReport(bc, max_deg)
    for k in range(max_deg + 1):
        f = Polynomial1D.monomial(k)
        u = apply_to_polynomial(pkg.g0, f)
        res = -u.derivative().derivative() - (f - proj.apply(f))
        if not res.is_zero():
            raise IdentityViolation("poisson", k, res)
        bres = boundary_residuals(bc, u)
        if any(bres):
            raise IdentityViolation("boundary", k, bres)
        report.checks.append((f"x^{k}", True))
    sp = compose_kernel_with_poly(pkg.g0, pkg.p)
    if not sp.is_zero():
        raise IdentityViolation("S P = 0", -1, sp)
    report.checks.append(("S P = 0", True))
    pp = compose_poly_kernels(proj, proj) - proj
    if not pp.is_zero():
        raise IdentityViolation("idempotent", -1, pp)
    report.checks.append(("P^2 = P", True))
    if pkg.multiplicity != multiplicity_of(pkg.p):
        raise IdentityViolation("multiplicity", -1, pkg.multiplicity)
    report.checks.append(("multiplicity", True))
    return report
