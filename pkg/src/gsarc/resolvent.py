"""Closed-form resolvent kernels G(z,x,y) = (A - z)^{-1} kernel, their poles, and Laurent data.

Each boundary condition maps to one closed-form row (numerator/denominator on
x <= y, extended by symmetry).  Near z = 0 the rows cancel catastrophically in
double precision, so small |z| is evaluated with mpmath at 40 digits.

Poles are located through the boundary determinant

    chi(z) = det [ L_i(c), L_i(s) ],  c = cos(sqrt(z) x),  s = sin(sqrt(z) x)/sqrt(z)

whose zero order at a real z equals the eigenvalue multiplicity.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from scipy.optimize import brentq

from . import bc as bcm
from .greens import green_kernel

MP_RADIUS = 0.1
MP_DPS = 40
SERIES_RADIUS = 1e-3
SERIES_TERMS = 12
ROOT_CUT = 1e-8
# with z = 0 an eigenvalue chi vanishes like z^m there and is rounding noise for
# |z| below about 1e-4, so the scan starts later
ZERO_MODE_CUT = 1e-4
SCAN_STEP = math.pi**2 / 50
RICHARDSON_LADDER = (1e-4, 1e-5, 1e-6)
COARSE_LADDER = (1e-2, 1e-3, 1e-4)


class ResolventError(ValueError):
    pass


class NearPole(ResolventError):
    pass


class ExtrapolationDiverged(ResolventError):
    pass


class ContourTooLarge(ResolventError):
    pass


# --- closed-form rows, x <= y.  m is numpy or mpmath; w = sqrt(z). ---------------------------


def _row_nonlocal(m, z, w, x, y, prm):
    num = -w * m.cos(w * x) * m.cos(w * (1 - y)) + 2 * m.cos(w / 2) * m.sin(w / 2 * (1 + 2 * x - 2 * y))
    return num, w * (2 + 2 * m.cos(w) + w * m.sin(w))


def _row_kvn(m, z, w, x, y, prm):
    num = -w * m.cos(w * x) * m.cos(w * (1 - y)) + 2 * m.sin(w / 2) * m.cos(w / 2 * (1 + 2 * x - 2 * y))
    return num, w * (-2 + 2 * m.cos(w) + w * m.sin(w))


def _row_dirichlet(m, z, w, x, y, prm):
    return m.sin(w * x) * m.sin(w * (1 - y)), w * m.sin(w)


def _row_neumann(m, z, w, x, y, prm):
    return -m.cos(w * x) * m.cos(w * (1 - y)), w * m.sin(w)


def _row_robin(m, z, w, x, y, prm):
    a, d = prm
    num = (w * m.cos(w * x) + a * m.sin(w * x)) * (w * m.cos(w * (1 - y)) - d * m.sin(w * (1 - y)))
    return num, (a - d) * z * m.cos(w) - w * (z + a * d) * m.sin(w)


def _row_periodic(m, z, w, x, y, prm):
    return -m.cos(w / 2 * (1 + 2 * x - 2 * y)), 2 * w * m.sin(w / 2)


def _row_antiperiodic(m, z, w, x, y, prm):
    return m.sin(w / 2 * (1 + 2 * x - 2 * y)), 2 * w * m.cos(w / 2)


def _row_ldrr(m, z, w, x, y, prm):
    (d,) = prm
    num = m.sin(w * x) * (w * m.cos(w * (1 - y)) - d * m.sin(w * (1 - y)))
    return num, z * m.cos(w) - d * w * m.sin(w)


def _row_general(m, z, w, x, y, prm):
    a, b, d = prm
    s = b * b + a * d
    num = (
        -(z + s) * m.cos(w * (1 + x - y))
        + (-z + s) * m.cos(w * (1 - x - y))
        + w * (-2 * b * m.sin(w * (x - y)) + (d - a) * m.sin(w * (1 + x - y)) + (a + d) * m.sin(w * (1 - x - y)))
    )
    den = -4 * b * z + 2 * z * (d - a) * m.cos(w) + 2 * w * (z + s) * m.sin(w)
    return num, den


def _row_zero_disc(m, z, w, x, y, prm):
    a, b = prm
    k = (1 + a) * z
    ab2 = (a + b) ** 2
    q = a * a + b * b - 2 * b
    num = (
        -(k + ab2) * m.cos(w * (1 + x - y))
        + (-k + ab2) * m.cos(w * (1 - x - y))
        + w
        * (
            -2 * (1 + a) * b * m.sin(w * (x - y))
            - q * m.sin(w * (1 + x - y))
            + (2 + a - b) * (a + b) * m.sin(w * (1 - x - y))
        )
    )
    den = 2 * z * (-2 * (1 + a) * b - q * m.cos(w)) + 2 * w * (k + ab2) * m.sin(w)
    return num, den


def select_row(bc):
    """(name, row function, float parameters) for the closed form used for bc."""
    k = bc.kind
    if k == bcm.DIRICHLET:
        return "dirichlet", _row_dirichlet, ()
    if k == bcm.PERIODIC:
        return "periodic", _row_periodic, ()
    if k == bcm.ANTIPERIODIC:
        return "antiperiodic", _row_antiperiodic, ()
    if k == bcm.LDRR:
        return "ldrr", _row_ldrr, (float(bc.delta),)
    a, b, d = bc.params
    if (a, b, d) == (-1, -1, 1):
        return "nonlocal", _row_nonlocal, ()
    if (a, b, d) == (-1, 1, 1):
        return "kvn", _row_kvn, ()
    if (a, b, d) == (0, 0, 0):
        return "neumann", _row_neumann, ()
    if b == 0:
        return "robin", _row_robin, (float(a), float(d))
    if bcm.discriminant(bc) == 0 and a != -1:
        return "zero-discriminant", _row_zero_disc, (float(a), float(b))
    return "general", _row_general, (float(a), float(b), float(d))


# --- entire functions of z --------------------------------------------------------------------


def cos_sqrt(z):
    z = np.asarray(z, dtype=complex)
    w = np.sqrt(z)
    out = np.cos(w)
    small = np.abs(z) < SERIES_RADIUS
    if np.any(small):
        zs = z[small] if z.ndim else z
        acc, term = np.zeros_like(zs), np.ones_like(zs)
        for k in range(SERIES_TERMS):
            acc = acc + term
            term = term * (-zs) / ((2 * k + 1) * (2 * k + 2))
        if z.ndim:
            out[small] = acc
        else:
            out = acc
    return out


def sinc_sqrt(z):
    """sin(sqrt z)/sqrt z, entire, equal to 1 at z = 0."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < SERIES_RADIUS
    w = np.sqrt(np.where(small, 1.0, z))
    out = np.sin(w) / w
    if np.any(small):
        zs = z[small] if z.ndim else z
        acc, term = np.zeros_like(zs), np.ones_like(zs)
        for k in range(SERIES_TERMS):
            acc = acc + term
            term = term * (-zs) / ((2 * k + 2) * (2 * k + 3))
        if z.ndim:
            out[small] = acc
        else:
            out = acc
    return out


def _chi_coefficients(rows):
    """chi = k0 + kC*C + kS*S + kZ*Z with C = c(1), S = s(1), Z = z*S.

    Expanding the 2x2 boundary determinant leaves a quadratic part proportional
    to C^2 + z S^2, which is identically 1.  Folding it into k0 avoids the
    cancellation of exp(2t)-sized terms on the negative axis.
    """
    (a0, a1, a2, a3), (b0, b1, b2, b3) = [[float(v) for v in r] for r in rows]
    k0 = a0 * b1 - a1 * b0 + a2 * b3 - a3 * b2
    kC = a0 * b3 + a2 * b1 - a1 * b2 - a3 * b0
    kS = a0 * b2 - a2 * b0
    kZ = a1 * b3 - a3 * b1
    return k0, kC, kS, kZ


def characteristic(bc, z):
    """Boundary determinant chi(z); zeros are the eigenvalues, with multiplicity."""
    z = np.asarray(z, dtype=complex)
    C, S = cos_sqrt(z), sinc_sqrt(z)
    k0, kC, kS, kZ = _chi_coefficients(bc.rows())
    return k0 + kC * C + kS * S + kZ * z * S


def _chi_real(rows, t, sign):
    """chi and d chi/dt at z = sign * t^2, t > 0 (all real arithmetic)."""
    if sign > 0:
        C, dC = math.cos(t), -math.sin(t)
        S, dS = math.sin(t) / t, (t * math.cos(t) - math.sin(t)) / (t * t)
        Z, dZ = t * math.sin(t), math.sin(t) + t * math.cos(t)
    else:
        C, dC = math.cosh(t), math.sinh(t)
        S, dS = math.sinh(t) / t, (t * math.cosh(t) - math.sinh(t)) / (t * t)
        Z, dZ = -t * math.sinh(t), -(math.sinh(t) + t * math.cosh(t))
    k0, kC, kS, kZ = rows
    chi = k0 + kC * C + kS * S + kZ * Z
    dchi = kC * dC + kS * dS + kZ * dZ
    envelope = abs(k0) + abs(kC * C) + abs(kS * S) + abs(kZ * Z)
    return chi, dchi, envelope


@dataclass(frozen=True)
class Root:
    z: float
    multiplicity: int


def _scan(bc, t_max, sign, step=SCAN_STEP, touch_tol=1e-10):
    rows = _chi_coefficients(bc.rows())
    f = lambda t: _chi_real(rows, t, sign)[0]
    df = lambda t: _chi_real(rows, t, sign)[1]
    t0 = math.sqrt(ZERO_MODE_CUT if bcm.has_zero_eigenvalue(bc) else ROOT_CUT)
    n = max(2, int(math.ceil((t_max - t0) / step)) + 1)
    ts = np.linspace(t0, t_max, n)
    vals = [_chi_real(rows, t, sign) for t in ts]
    found = []
    for i in range(n - 1):
        (fa, da, _), (fb, db, _) = vals[i], vals[i + 1]
        a, b = ts[i], ts[i + 1]
        if fa == 0:
            found.append((a, 1))
            continue
        if fa * fb < 0:
            found.append((brentq(f, a, b, xtol=1e-15, rtol=1e-15, maxiter=200), 1))
            continue
        if da * db < 0:
            # an extremum inside: either a touching (double) root, a close pair, or nothing
            tm = brentq(df, a, b, xtol=1e-15, rtol=1e-15, maxiter=200)
            fm, _, env = _chi_real(rows, tm, sign)
            if abs(fm) <= touch_tol * env:
                found.append((tm, 2))
            elif fm * fa < 0:
                found.append((brentq(f, a, tm, xtol=1e-15, rtol=1e-15, maxiter=200), 1))
                found.append((brentq(f, tm, b, xtol=1e-15, rtol=1e-15, maxiter=200), 1))
    if vals[-1][0] == 0:
        found.append((ts[-1], 1))
    return [Root(sign * t * t, mult) for t, mult in found]


@lru_cache(maxsize=256)
def _roots_cached(bc, z_max, sign):
    return tuple(_scan(bc, math.sqrt(z_max), sign))


def characteristic_roots(bc, z_max=1e4, with_multiplicity=False):
    """Real roots of chi in (ROOT_CUT, z_max], ascending; repeated by multiplicity unless asked."""
    if z_max > 1e4:
        raise ValueError("z_max must be <= 1e4")
    roots = list(_roots_cached(bc, float(z_max), 1))
    if with_multiplicity:
        return roots
    return [r.z for r in roots for _ in range(r.multiplicity)]


def negative_roots(bc, z_min=-1e4, with_multiplicity=False):
    """Real roots of chi in [z_min, -ROOT_CUT), ascending, via the hyperbolic forms."""
    roots = sorted(_roots_cached(bc, float(-z_min), -1), key=lambda r: r.z)
    if with_multiplicity:
        return roots
    return [r.z for r in roots for _ in range(r.multiplicity)]


def nonzero_eigenvalues(bc, count, z_max=1e4):
    """The `count` nonzero eigenvalues of smallest magnitude, with multiplicity."""
    allr = negative_roots(bc, -z_max) + characteristic_roots(bc, z_max)
    return sorted(allr, key=abs)[:count]


def smallest_nonzero_root(bc):
    r = nonzero_eigenvalues(bc, 1)
    if not r:
        raise ResolventError("no nonzero root found")
    return abs(r[0])


@dataclass(frozen=True)
class ResolventForm:
    bc: bcm.BoundaryCondition

    @property
    def row(self):
        return select_row(self.bc)

    def evaluate(self, z, x, y):
        return resolvent_eval(self.bc, z, x, y)

    def characteristic(self, z):
        return characteristic(self.bc, z)


def _eval_numpy(row, prm, z, x, y):
    z = complex(z)
    w = np.sqrt(z)
    num, den = row(np, z, w, x, y, prm)
    return num / den


def _eval_mp(row, prm, z, x, y):
    with mpmath.workdps(MP_DPS):
        zz = mpmath.mpc(z)
        w = mpmath.sqrt(zz)
        p = tuple(mpmath.mpf(v) for v in prm)
        out = np.empty(np.shape(x), dtype=complex)
        for idx in np.ndindex(out.shape):
            num, den = row(mpmath, zz, w, mpmath.mpf(float(x[idx])), mpmath.mpf(float(y[idx])), p)
            out[idx] = complex(num / den)
    return out


def _check_pole(bc, z):
    if abs(z.imag) > 1e-10 * max(1.0, abs(z)):
        return
    zr = z.real
    if zr == 0:
        if bcm.has_zero_eigenvalue(bc):
            raise NearPole("z = 0 is an eigenvalue")
        return
    if abs(zr) > 1e4:
        return
    cands = characteristic_roots(bc, 1e4) if zr > 0 else negative_roots(bc, -1e4)
    for mu in cands:
        if abs(zr - mu) <= 1e-10 * max(1.0, abs(mu)):
            raise NearPole(f"z = {zr!r} is within 1e-10 of the eigenvalue {mu!r}")


def resolvent_eval(bc, z, x, y):
    """G(z,x,y); x, y may be arrays (broadcast).  Returns complex."""
    z = complex(z)
    _check_pole(bc, z)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any((x < 0) | (x > 1) | (y < 0) | (y > 1)):
        raise ValueError("x, y must lie in [0, 1]")
    lo, hi = np.broadcast_arrays(np.minimum(x, y), np.maximum(x, y))
    if z == 0:
        out = green_kernel(bc).g0.eval_float(lo, hi).astype(complex)
    else:
        _, row, prm = select_row(bc)
        if abs(z) < MP_RADIUS:
            out = _eval_mp(row, prm, z, lo, hi)
        else:
            out = _eval_numpy(row, prm, z, lo, hi)
    return out[()] if out.ndim == 0 else out


@dataclass
class LaurentData:
    points: np.ndarray
    p_hat: np.ndarray
    d_hat: np.ndarray
    g0_hat: np.ndarray
    p_contour: np.ndarray = None
    d_contour: np.ndarray = None
    g0_contour: np.ndarray = None
    epsilon: float = None
    nodes: int = None


def _poly_at_zero(zs, vals):
    """Quadratic through (z_k, v_k): returns (value at 0, slope at 0)."""
    V = np.vander(np.asarray(zs), 3, increasing=True)
    coef = np.linalg.solve(V, np.asarray(vals))
    return coef[0], coef[1]


def laurent_limits(bc, points, ladder=RICHARDSON_LADDER):
    """p, D and G0 samples by polynomial extrapolation of z G and z^2 G to z = 0."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    x, y = pts[:, 0], pts[:, 1]
    G = np.array([resolvent_eval(bc, z, x, y).real for z in ladder])
    zs = np.array(ladder)
    zG = zs[:, None] * G
    p_hat, g0_hat = _poly_at_zero(zs, zG)
    d_hat, _ = _poly_at_zero(zs, zs[:, None] * zG)
    # cross-check against a two-point linear extrapolation from the smallest z values
    z1, z2 = zs[-2], zs[-1]
    p_lin = (z1 * zG[-1] - z2 * zG[-2]) / (z1 - z2)
    bad = ~np.isfinite(p_hat) | ~np.isfinite(g0_hat) | (np.abs(p_lin - p_hat) > 1e-4 * (1 + np.abs(p_hat)))
    if np.any(bad):
        raise ExtrapolationDiverged(f"extrapolation unstable at {pts[bad].tolist()}")
    return LaurentData(pts, p_hat, d_hat, g0_hat)


def default_epsilon(bc):
    return min(0.45 * smallest_nonzero_root(bc), 1.0)


def _contour_sum(bc, n, x, y, eps, M):
    k = np.arange(M)
    zk = eps * np.exp(2j * np.pi * (k + 0.5) / M)
    acc = 0
    for z in zk:
        acc = acc + z ** (-n) * resolvent_eval(bc, z, x, y)
    return (acc / M).real


def laurent_contour(bc, n, x, y, eps=None, M=256):
    """A_n = (1/2 pi i) * contour integral of z^{-n-1} G(z,x,y) over |z| = eps (trapezoidal).

    n = -1 gives p, n = 0 gives G0 and n = -2 gives the D-kernel (with sign -1).
    """
    if M < 64:
        raise ValueError("need at least 64 contour nodes")
    if eps is None:
        eps = default_epsilon(bc)
    elif eps >= 0.5 * smallest_nonzero_root(bc):
        raise ContourTooLarge(f"epsilon {eps} is not below half the smallest nonzero eigenvalue")
    out = _contour_sum(bc, n, np.asarray(x, dtype=float), np.asarray(y, dtype=float), eps, M)
    return out[()] if np.ndim(out) == 0 else out


def laurent_data(bc, points, eps=None, M=256):
    """Limit- and contour-based Laurent samples together."""
    data = laurent_limits(bc, points)
    eps = default_epsilon(bc) if eps is None else eps
    x, y = data.points[:, 0], data.points[:, 1]
    data.p_contour = laurent_contour(bc, -1, x, y, eps, M)
    data.g0_contour = laurent_contour(bc, 0, x, y, eps, M)
    data.d_contour = -laurent_contour(bc, -2, x, y, eps, M)
    data.epsilon, data.nodes = eps, M
    return data
