"""Nystrom discretization of the integral operators and the numeric cross-checks built on it.

Kernels here are -a|x-y| + Q(x,y) with Q a polynomial.  The polynomial part is
smooth and plain composite Gauss-Legendre handles it.  The |x-y| part has a kink
on the diagonal, so on the panel that contains the node x_i it is integrated by
product integration: the panel is split at x_i and the Lagrange interpolant of
the unknown on the panel nodes is integrated exactly against |x_i - y|.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre

from . import bc as bcm
from . import resolvent
from .greens import green_kernel
from .kernels import BivariatePoly, PiecewiseSymmetricKernel
from .perturbation import perturbation_kernel, perturbation_spectrum

PANEL = 16
N_MIN, N_MAX = 16, 2048


class SpectralError(ValueError):
    pass


class SizeOutOfRange(SpectralError):
    pass


class NoneFound(SpectralError):
    pass


def _panel_layout(n, q=PANEL):
    count = -(-n // q)
    sizes = [n // count + (1 if k < n % count else 0) for k in range(count)]
    edges = np.linspace(0.0, 1.0, count + 1)
    xs, ws, ids = [], [], []
    for k, m in enumerate(sizes):
        t, w = legendre.leggauss(m)
        a, b = edges[k], edges[k + 1]
        xs.append(a + (b - a) * (t + 1) / 2)
        ws.append((b - a) * w / 2)
        ids.append(np.full(m, k))
    return np.concatenate(xs), np.concatenate(ws), np.concatenate(ids), edges


def _lagrange(nodes, pts):
    """V[p, k] = l_k(pts[p]) for the Lagrange basis on nodes."""
    diff = pts[:, None, None] - nodes[None, None, :]  # p, 1, j
    denom = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(denom, 1.0)
    ratio = diff / denom[None, :, :]  # p, k, j
    m = len(nodes)
    ratio[:, np.arange(m), np.arange(m)] = 1.0
    return ratio.prod(axis=2)


@lru_cache(maxsize=16)
def _abs_system(n, q=PANEL):
    """Nodes, weights and the matrix A with (A f)_i ~ int |x_i - y| f(y) dy."""
    x, w, ids, edges = _panel_layout(n, q)
    A = np.abs(x[:, None] - x[None, :]) * w[None, :]
    for k in range(len(edges) - 1):
        sel = np.where(ids == k)[0]
        nodes = x[sel]
        a, b = edges[k], edges[k + 1]
        t, tw = legendre.leggauss(len(sel) + 2)
        for i in sel:
            xi = x[i]
            row = np.zeros(len(sel))
            for lo, hi in ((a, xi), (xi, b)):
                pts = lo + (hi - lo) * (t + 1) / 2
                row += ((hi - lo) * tw / 2 * np.abs(xi - pts)) @ _lagrange(nodes, pts)
            A[i, sel] = row
    for arr in (x, w, A):
        arr.setflags(write=False)
    return x, w, A


def _split_kernel(kernel):
    """(abs coefficient, polynomial part) for the supported kernel types."""
    if isinstance(kernel, bcm.BoundaryCondition):
        kernel = green_kernel(kernel).g0
    if isinstance(kernel, PiecewiseSymmetricKernel):
        return float(kernel.abs_coeff), kernel.lower
    if isinstance(kernel, BivariatePoly):
        return 0.0, kernel
    raise SpectralError(f"unsupported kernel type {type(kernel).__name__}")


def _poly_grid(P, x):
    out = np.zeros((len(x), len(x)))
    for (i, j), c in P.to_float_dict().items():
        out += c * np.outer(x**i, x**j)
    return out


@dataclass
class NystromSystem:
    nodes: np.ndarray
    weights: np.ndarray
    matrix: np.ndarray  # symmetric W^{1/2} K W^{1/2}
    raw: np.ndarray = field(repr=False, default=None)  # K with quadrature weights folded in

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)


def nystrom_system(kernel, n, q=PANEL):
    if not N_MIN <= n <= N_MAX:
        raise SizeOutOfRange(f"n = {n} outside [{N_MIN}, {N_MAX}]")
    a, P = _split_kernel(kernel)
    x, w, A = _abs_system(n, q)
    K = _poly_grid(P, x) * w[None, :]
    if a:
        K = K + a * A
    sw = np.sqrt(w)
    S = K * (sw[:, None] / sw[None, :])
    return NystromSystem(x, w, (S + S.T) / 2, K)


def nystrom_eigs(kernel, n, top=None):
    """Eigenvalues of the discretized operator ordered by decreasing magnitude."""
    ev = nystrom_system(kernel, n).eigenvalues()
    ev = ev[np.argsort(-np.abs(ev), kind="stable")]
    return ev if top is None else ev[:top]


# --- pole / eigenvalue duality --------------------------------------------------------------


@dataclass
class DualityReport:
    bc: object
    n: int
    pairs: list  # (root mu, matched Nystrom eigenvalue, relative error of 1/mu)
    unmatched: list

    @property
    def max_rel_err(self):
        return max((e for _, _, e in self.pairs), default=0.0)

    def passed(self, tol=1e-5):
        return not self.unmatched and self.max_rel_err <= tol


def match_reciprocals(roots, eigs, threshold=1e-4):
    """Greedy nearest-reciprocal pairing; ties go to the lower index."""
    used = set()
    pairs, unmatched = [], []
    for mu in roots:
        target = 1.0 / mu
        best, berr = None, np.inf
        for k, lam in enumerate(eigs):
            if k in used:
                continue
            err = abs(lam - target) / abs(target)
            if err < berr:
                best, berr = k, err
        if best is None or berr > threshold:
            unmatched.append(mu)
        else:
            used.add(best)
            pairs.append((mu, float(eigs[best]), float(berr)))
    return pairs, unmatched


def duality_check(bc, n=512, count=5):
    """The `count` smallest-magnitude nonzero roots against the Nystrom spectrum of G0, both ways."""
    roots = resolvent.nonzero_eigenvalues(bc, count)
    eigs = nystrom_eigs(bc, n)
    pairs, unmatched = match_reciprocals(roots, eigs[: count + 4])
    # converse: the leading Nystrom eigenvalues (zero mode excluded) all come from roots
    lead = [lam for lam in eigs[:count] if abs(lam) > 1e-10]
    back, miss = match_reciprocals([1 / lam for lam in lead], [1 / mu for mu in roots])
    return DualityReport(bc, n, pairs, unmatched + [1 / m for m in miss])


# --- identities -----------------------------------------------------------------------------


@dataclass
class IdentityReport:
    bc: object
    n: int
    residual: float
    kappa_eigs: np.ndarray
    green_eigs: np.ndarray
    rank: int
    positive: int
    negative: int
    interlacing_ok: bool


def operator_identity_check(bc, n=256, top=12):
    """Nystrom(kappa) - Nystrom(G0) - Nystrom(T) and the Weyl interlacing of kappa against G0."""
    kappa = nystrom_system(PiecewiseSymmetricKernel.nonlocal_kernel(), n)
    G = nystrom_system(bc, n)
    T = nystrom_system(perturbation_kernel(bc).T, n)
    residual = float(np.abs(kappa.raw - G.raw - T.raw).max())
    spec = perturbation_spectrum(bc)
    lam = np.array([complex(v).real for v in spec.eigenvalues])
    p, m = int((lam > 0).sum()), int((lam < 0).sum())
    a = np.sort(G.eigenvalues())[::-1]
    b = np.sort(kappa.eigenvalues())[::-1]
    tol = 1e-10
    ok = all(b[k + p] <= a[k] + tol for k in range(len(a) - p)) and all(a[k + m] <= b[k] + tol for k in range(len(a) - m))
    return IdentityReport(bc, n, residual, b[:top], a[:top], spec.rank, p, m, ok)


@dataclass
class TraceReport:
    nystrom: float
    exact: float
    matrix_trace: float


def trace_check(bc, n=256):
    T = perturbation_kernel(bc).T
    ev = nystrom_system(T, n).eigenvalues()
    spec = perturbation_spectrum(bc)
    mtr = float(sum((spec.matrix[i][i] for i in range(len(spec.matrix))), 0))
    exact = float(T.diagonal().integral01()) if not T.is_zero() else 0.0
    return TraceReport(float(ev.sum()), exact, mtr)


def convergence_check(bc, n=512, top=5):
    """Largest relative change of the top eigenvalues between n and 2n nodes."""
    a = nystrom_eigs(bc, n, top)
    b = nystrom_eigs(bc, min(2 * n, N_MAX), top)
    return float(np.max(np.abs(a - b) / np.abs(b)))


@dataclass
class NegativeScan:
    z: float
    nystrom_value: float
    nystrom_negative_count: int
    rel_err: float


def negative_eigenvalue_scan(bc, n=512, z_min=-1e4):
    """The negative eigenvalue of the boundary problem, confirmed by the Nystrom spectrum of G0."""
    roots = resolvent.negative_roots(bc, z_min)
    if not roots:
        raise NoneFound(f"no negative eigenvalue for {bc.name}")
    ev = nystrom_eigs(bc, n)
    neg = ev[ev < -1e-10]
    z = roots[-1]
    if len(neg) == 0:
        return NegativeScan(z, float("nan"), 0, float("inf"))
    lam = neg[np.argmin(np.abs(neg - 1 / z))]
    return NegativeScan(z, float(lam), len(neg), float(abs(lam * z - 1)))
