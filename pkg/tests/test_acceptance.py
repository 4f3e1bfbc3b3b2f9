"""Acceptance criteria, one test each.

Every test prints a single "PASS criterion N: ..." or "FAIL criterion N: ..." line
and then asserts.  Published rows and matrices are transcribed literally below;
where a transcription disagrees with what the boundary problem forces, the test
fails and the detail line says which row is off.

Run directly (python3 tests/test_acceptance.py) to get just the summary lines.
"""

import random
import sys
import time
from fractions import Fraction as F

import numpy as np
import pytest
import sympy as sp

from gsarc import bc as bcm
from gsarc import perturbation as P
from gsarc import resolvent as R
from gsarc import spectral as S
from gsarc.greens import zero_disc_green_coefficients, green_kernel, riesz_kernel, verify_green
from oracles import poly_as_sympy, x, y

a, b, d = sp.symbols("alpha beta delta")
Rat = sp.Rational
half = Rat(1, 2)

# --- literal transcriptions -------------------------------------------------------------------

# polynomial part Q of G0 = -1/2|x-y| + Q
GREEN_ROWS = {
    "nonlocal": sp.Integer(0),
    "kvn": Rat(2, 15) - Rat(3, 5) * (x + y) + 2 * (x**2 + y**2) + Rat(6, 5) * x * y - 3 * x * y * (x + y)
    - (x**3 + y**3) + 2 * x * y * (x**2 + y**2),
    "dirichlet": half * (x + y) - x * y,
    "neumann": Rat(1, 3) - half * (x + y) + half * (x**2 + y**2),
    "robin": -1 / (2 * (d - a + a * d)) * (2 - 2 * d + (a + d - a * d) * (x + y) + 2 * a * d * x * y),
    "periodic": Rat(1, 12) + (x - y) ** 2,
    "antiperiodic": Rat(1, 4),
    "radoux": half * (x + y) - Rat(9, 5) * x * y + half * x * y * (x**2 + y**2),
    "general": 1 / (b**2 + a * d - a + 2 * b + d)
    * ((-1 + d) + half * (b**2 + a * d - a - d) * (x + y) - (b**2 + a * d) * x * y),
}

PROJECTION_ROWS = {
    "nonlocal": sp.Integer(0),
    "kvn": -4 + 6 * x + 6 * y - 12 * x * y,
    "dirichlet": sp.Integer(0),
    "neumann": sp.Integer(-1),
    "robin": sp.Integer(0),
    "periodic": sp.Integer(-1),
    "antiperiodic": sp.Integer(0),
    "radoux": -3 * x * y,
    "general": sp.Integer(0),
    "general-zero": -3 * (1 - b + (a + b) * x) * (1 - b + (a + b) * y) / (3 + a**2 + b**2 + 3 * a - 3 * b - a * b),
}
# the alpha = -1 branch of the zero-discriminant family, delta != 1
ZERO_DISC_LIMIT = -3 * (1 - x) * (1 - y)

PRINTED_MATRICES = {
    "dirichlet": [[F(-1, 4), F(-1, 6)], [0, F(1, 12)]],
    "neumann": [[F(-1, 4), F(-7, 180)], [F(1, 2), F(1, 12)]],
    "kvn": [
        [F(-1, 4), F(-1, 6), F(-23, 180), F(-109, 1050)],
        [F(1, 2), F(1, 4), F(1, 6), F(87, 700)],
        [F(-1, 2), 0, F(1, 12), F(1, 10)],
        [0, F(-1, 6), F(-1, 6), F(-3, 20)],
    ],
    "periodic": [[F(-1, 4), F(-1, 6), F(-23, 180)], [F(1, 2), F(1, 3), F(1, 4)], [F(-1, 2), F(-1, 4), F(-1, 6)]],
    "radoux": [[F(307, 700), F(1, 4)], [F(-7, 20), F(-1, 6)]],
}

r30, r462, r2982 = np.sqrt(30), np.sqrt(462), np.sqrt(2982)
PRINTED_EIGENVALUES = {
    "dirichlet": [-1 / 4, 1 / 12],
    "neumann": [(-5 - r30) / 60, (-5 + r30) / 60],
    "kvn": [(-5 - r30) / 60, (-5 + r30) / 60, (21 - r462) / 420, (21 + r462) / 420],
    "periodic": [1 / 12, (-5 - r30) / 60, (-5 + r30) / 60],
    "radoux": [(-21 - r2982) / 420, (-21 + r2982) / 420],
}
VOLTERRA_EIGENVALUES = [1j / (2 * np.sqrt(12)), -1j / (2 * np.sqrt(12))]

PUBLISHED_RANKS = {"nonlocal": 0, "kvn": 4, "dirichlet": 2, "neumann": 2, "radoux": 2, "periodic": 3, "antiperiodic": 1}

# --- helpers ----------------------------------------------------------------------------------

rng = random.Random(20240611)
SUMMARY = []


def rnd(num=9, den=7):
    return F(rng.randint(-num, num), rng.randint(1, den))


def subs(expr, **vals):
    m = {a: vals.get("alpha"), b: vals.get("beta"), d: vals.get("delta")}
    return expr.subs({k: sp.Rational(v.numerator, v.denominator) for k, v in m.items() if v is not None})


def same(poly, expr):
    return sp.expand(poly_as_sympy(poly) - expr) == 0


def report(n, ok, detail, elapsed, budget):
    ok = ok and elapsed < budget
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail} [{elapsed:.2f}s / {budget:g}s]"
    print(line, flush=True)
    SUMMARY.append(line)
    return ok, line


def robin_points(count):
    out = []
    while len(out) < count:
        al, de = rnd(), rnd()
        if de - al + al * de != 0:
            out.append((al, de))
    return out


def general_points(count):
    out = []
    while len(out) < count:
        al, be, de = rnd(), rnd(), rnd()
        if be != 0 and de - al - 2 * be + be * be + al * de != 0:
            out.append((al, be, de))
    return out


# --- criteria ---------------------------------------------------------------------------------


def criterion_1():
    bad = []
    for name in ("nonlocal", "kvn", "dirichlet", "neumann", "periodic", "antiperiodic", "radoux"):
        if not same(green_kernel(bcm.named(name)).g0.lower, GREEN_ROWS[name]):
            bad.append(name)
    if not all(same(green_kernel(bcm.robin(al, de)).g0.lower, subs(GREEN_ROWS["robin"], alpha=al, delta=de)) for al, de in robin_points(25)):
        bad.append("robin")
    gen = general_points(25)
    if not all(
        same(green_kernel(bcm.gsarc(al, be, de)).g0.lower, subs(GREEN_ROWS["general"], alpha=al, beta=be, delta=de)) for al, be, de in gen
    ):
        bad.append("general")
    if not bad:
        return True, "all published Green's function rows reproduced"
    # what the boundary problem forces for the two rows that are known to differ
    forced = []
    if same(green_kernel(bcm.periodic()).g0.lower, Rat(1, 12) + half * (x - y) ** 2):
        forced.append("periodic matches 1/12 + (x-y)^2/2")
    fixed = 1 / (b**2 + a * d - a - 2 * b + d) * ((-1 + d) + half * (b**2 + a * d - a - d) * (x + y) - (b**2 + a * d) * x * y)
    if all(same(green_kernel(bcm.gsarc(al, be, de)).g0.lower, subs(fixed, alpha=al, beta=be, delta=de)) for al, be, de in gen):
        forced.append("general matches with -2*beta in the denominator")
    return False, f"rows differing from the printed table: {', '.join(bad)} ({'; '.join(forced)})"


def criterion_2():
    bad = []
    for name in ("nonlocal", "kvn", "dirichlet", "neumann", "periodic", "antiperiodic", "radoux"):
        if not same(riesz_kernel(bcm.named(name)), PROJECTION_ROWS[name]):
            bad.append(name)
    if not all(same(riesz_kernel(bcm.robin(al, de)), PROJECTION_ROWS["robin"]) for al, de in robin_points(25)):
        bad.append("robin")
    if not all(same(riesz_kernel(bcm.gsarc(*p)), PROJECTION_ROWS["general"]) for p in general_points(25)):
        bad.append("general")
    pairs = P.admissible_pairs(50, seed=5) + [(F(1), F(2)), (F(1), F(-3, 2)), (F(2), F(1))]
    if not all(same(riesz_kernel(P.zero_discriminant_bc(al, be)), subs(PROJECTION_ROWS["general-zero"], alpha=al, beta=be)) for al, be in pairs):
        bad.append("general zero-discriminant")
    if not all(same(riesz_kernel(bcm.gsarc(-1, 1, de)), ZERO_DISC_LIMIT) for de in (F(-2), F(0), F(1, 2), F(3))):
        bad.append("alpha = -1 branch")
    return not bad, "all published projection kernel rows reproduced" if not bad else f"rows differing: {', '.join(bad)}"


def criterion_3():
    bad, worst = [], 0.0
    for name, printed in PRINTED_MATRICES.items():
        if P.perturbation_matrix(bcm.named(name)).matrix != printed:
            bad.append(f"{name} matrix")
        ev = sorted(float(e.lambda_float.real if isinstance(e.lambda_float, complex) else e.lambda_float)
                    for e in P.perturbation_spectrum(bcm.named(name)).eigen)
        err = float(np.max(np.abs(np.array(ev) - np.sort(PRINTED_EIGENVALUES[name]))))
        worst = max(worst, err)
        if len(ev) != len(PRINTED_EIGENVALUES[name]) or err > 1e-12:
            bad.append(f"{name} eigenvalues")
    vol = sorted((complex(e.lambda_float) for e in P.volterra_decomposition().eigen), key=lambda c: -c.imag)
    verr = max(abs(u - v) for u, v in zip(vol, VOLTERRA_EIGENVALUES))
    worst = max(worst, verr)
    if verr > 1e-12:
        bad.append("volterra eigenvalues")
    detail = f"max eigenvalue error {worst:.1e}"
    M = P.perturbation_matrix(bcm.radoux()).matrix
    if "radoux matrix" in bad and [r[::-1] for r in M] == PRINTED_MATRICES["radoux"]:
        detail += "; computed radoux matrix is the printed one with its columns swapped"
    return not bad, detail if not bad else f"{detail}; mismatches: {', '.join(bad)}"


def criterion_4():
    bad = []
    for name, want in PUBLISHED_RANKS.items():
        if P.rank(bcm.named(name)) != want:
            bad.append(name)
    if not all(P.rank(bcm.robin(al, de)) == 2 for al, de in robin_points(10)):
        bad.append("robin")
    if not all(P.rank(bcm.gsarc(*p)) == 2 for p in general_points(10)):
        bad.append("general")
    survey = P.zero_discriminant_rank_survey(200, seed=1)
    if not set(survey) <= {2, 3, 4}:
        bad.append(f"survey ranks {sorted(survey)}")
    anti = [al for al in (rnd() for _ in range(40)) if al not in (0, -1)][:20]
    if not all(P.rank(P.zero_discriminant_bc(al, -al)) == 3 for al in anti):
        bad.append("beta = -alpha")
    if P.rank(bcm.gsarc(-1, 1, 1)) != 4:
        bad.append("(-1,1,1)")
    counts = {k: len(v) for k, v in sorted(survey.items())}
    return not bad, f"survey rank counts {counts}" if not bad else f"rank mismatches: {', '.join(bad)}"


def all_bcs():
    bcs = [bcm.named(n) for n in bcm.NAMED]
    bcs += [bcm.robin(2, 3), bcm.robin(-3, 5), bcm.gsarc(1, 2, F(7, 3)), bcm.gsarc(F(-1, 2), F(3, 4), 2)]
    bcs += [P.zero_discriminant_bc(F(1, 2), F(1, 3)), P.zero_discriminant_bc(2, -2), P.zero_discriminant_bc(3, F(1, 2))]
    bcs += [bcm.gsarc(-1, 1, F(1, 2)), bcm.gsarc(2, 1, 1), bcm.kato293(F(1, 2)), bcm.kato367(F(1, 2))]
    return bcs


def criterion_5():
    bad = [bc.name for bc in all_bcs() if not verify_green(bc, 6).passed]
    mult = {n: green_kernel(bcm.named(n)).multiplicity for n in ("neumann", "periodic", "radoux", "kvn")}
    if mult != {"neumann": 1, "periodic": 1, "radoux": 1, "kvn": 2}:
        bad.append(f"multiplicities {mult}")
    return not bad, f"{len(all_bcs())} boundary conditions, multiplicities {mult}" if not bad else f"failures: {bad}"


def criterion_6():
    t = np.linspace(0.1, 0.9, 5)
    pts = np.array([(u, v) for u in t for v in t])
    worst, dworst, bad = 0.0, 0.0, []
    for bc in all_bcs():
        pkg = green_kernel(bc)
        g0 = pkg.g0.eval_float(pts[:, 0], pts[:, 1])
        p = np.array([float(pkg.p(F(u), F(v))) for u, v in pts.tolist()])
        dat = R.laurent_data(bc, pts, M=256)
        err = max(float(np.abs(got - want).max()) for got, want in
                  ((dat.p_hat, p), (dat.p_contour, p), (dat.g0_hat, g0), (dat.g0_contour, g0)))
        derr = max(float(np.abs(dat.d_hat).max()), float(np.abs(dat.d_contour).max()))
        worst, dworst = max(worst, err), max(dworst, derr)
        if err > 1e-7 or derr > 1e-8:
            bad.append(bc.name)
    detail = f"max |error| {worst:.1e}, max |D| {dworst:.1e} over 25 points"
    return not bad, detail if not bad else f"{detail}; failing: {bad}"


def criterion_7():
    bad, worst = [], 0.0
    for name in ("dirichlet", "neumann", "nonlocal", "periodic", "antiperiodic", "radoux", "kvn"):
        rep = S.duality_check(bcm.named(name), 512, 5)
        worst = max(worst, rep.max_rel_err)
        if not rep.passed(1e-5):
            bad.append(name)
    ev = S.nystrom_eigs(bcm.dirichlet(), 512, 5)
    k = np.arange(1, 6)
    dr = float(np.max(np.abs(ev * (k * np.pi) ** 2 - 1)))
    if dr > 1e-6:
        bad.append("dirichlet analytic")
    detail = f"max duality rel. err {worst:.1e}, Dirichlet analytic rel. err {dr:.1e}"
    return not bad, detail if not bad else f"{detail}; failing: {bad}"


def criterion_8():
    bad, worst = [], 0.0
    for tau in (F(1, 4), F(1, 2), F(3, 4)):
        bc = bcm.kato293(tau)
        if len(R.negative_roots(bc)) != 1:
            bad.append(f"roots tau={tau}")
            continue
        scan = S.negative_eigenvalue_scan(bc)
        worst = max(worst, scan.rel_err)
        if scan.nystrom_negative_count != 1 or scan.rel_err > 1e-4:
            bad.append(f"nystrom tau={tau}")
    for tau in (F(1, 4), F(1, 2), F(3, 4)):
        bc = bcm.kato367(tau)
        neg = S.nystrom_eigs(bc, 512)
        if R.negative_roots(bc) or (neg < -1e-10).any():
            bad.append(f"delta=-{tau} has a negative eigenvalue")
    detail = f"one negative eigenvalue for each delta = 1/tau (rel. err {worst:.1e}), none for delta = -tau"
    return not bad, detail if not bad else f"failing: {bad}"


def criterion_9():
    bad = []
    pairs = P.admissible_pairs(100, seed=9)
    for al, be in pairs:
        c = zero_disc_green_coefficients(al, be)
        if not (c[(1, 0)] - c[(0, 1)] == 1 and c[(2, 0)] == c[(0, 2)] and c[(2, 1)] == c[(1, 2)]
                and c[(3, 0)] == c[(0, 3)] and c[(3, 1)] == c[(1, 3)]):
            bad.append(("A", al, be))
        if P.zero_disc_matrix_expanded(al, be) != P.zero_disc_matrix_from_d(al, be):
            bad.append(("B", al, be))
    return not bad, f"{len(pairs)} admissible pairs" if not bad else f"{len(bad)} failures, first {bad[0]}"


CRITERIA = [
    (1, criterion_1, 1),
    (2, criterion_2, 1),
    (3, criterion_3, 5),
    (4, criterion_4, 30),
    (5, criterion_5, 10),
    (6, criterion_6, 60),
    (7, criterion_7, 120),
    (8, criterion_8, 30),
    (9, criterion_9, 10),
]


def run_criterion(n, fn, budget):
    t0 = time.perf_counter()
    ok, detail = fn()
    return report(n, ok, detail, time.perf_counter() - t0, budget)


@pytest.mark.parametrize("n, fn, budget", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(n, fn, budget):
    ok, line = run_criterion(n, fn, budget)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(*c)[0] for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
