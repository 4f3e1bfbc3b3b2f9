import random
from fractions import Fraction as F

import mpmath
import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from gsarc import bc as bcm
from gsarc import perturbation as P
from gsarc.greens import zero_discriminant_delta
from gsarc.kernels import X, Y, BivariatePoly, Polynomial1D, apply_to_polynomial, inner_product
from gsarc.perturbation import QuadSurd

rng = random.Random(99)
half = F(1, 2)


def rnd(num=9, den=7):
    return F(rng.randint(-num, num), rng.randint(1, den))


def exact_set(spec):
    return sorted(e.lambda_exact for e in spec.eigen)


def test_kernel_examples():
    assert P.perturbation_kernel(bcm.dirichlet()).T == X * Y - (X + Y) * half
    assert P.perturbation_kernel(bcm.antiperiodic()).T == BivariatePoly.constant(F(-1, 4))
    T = P.perturbation_kernel(bcm.named("kvn")).T
    want = (
        BivariatePoly.constant(-2) + (X + Y) * 9 - (X * X + Y * Y) * 30 + (X * X * X + Y * Y * Y) * 15
        + (X * X * Y + X * Y * Y) * 45 - (X * X * X * Y + X * Y * Y * Y) * 30 - X * Y * 18
    ) * F(1, 15)
    assert T == want
    assert P.perturbation_kernel(bcm.named("nonlocal")).T.is_zero()


def test_matrices():
    assert P.perturbation_matrix(bcm.dirichlet()).matrix == [[F(-1, 4), F(-1, 6)], [0, F(1, 12)]]
    assert P.perturbation_matrix(bcm.neumann()).matrix == [[F(-1, 4), F(-7, 180)], [half, F(1, 12)]]
    assert P.perturbation_matrix(bcm.antiperiodic()).matrix == [[F(-1, 4)]]
    kvn = P.perturbation_matrix(bcm.named("kvn")).matrix
    assert kvn[0] == [F(-1, 4), F(-1, 6), F(-23, 180), F(-109, 1050)]
    assert kvn[3][3] == F(-3, 20)
    per = P.perturbation_matrix(bcm.periodic()).matrix
    assert per == [[F(-1, 4), F(-1, 6), F(-23, 180)], [half, F(1, 3), F(1, 4)], [-half, F(-1, 4), F(-1, 6)]]


def test_radoux_matrix_on_named_basis():
    # in the basis {x, 1 + x^3} with M[i][j] = coefficient of basis_i in T(basis_j)
    M = P.perturbation_matrix(bcm.radoux()).matrix
    assert M == [[F(1, 4), F(307, 700)], [F(-1, 6), F(-7, 20)]]
    # the printed arrangement is this matrix with its two columns swapped, which changes the spectrum
    printed = [[F(307, 700), F(1, 4)], [F(-7, 20), F(-1, 6)]]
    assert printed == [row[::-1] for row in M]
    trace = lambda A: A[0][0] + A[1][1]  # noqa: E731
    det = lambda A: A[0][0] * A[1][1] - A[0][1] * A[1][0]  # noqa: E731
    assert det(printed) == -det(M) and trace(printed) != trace(M)


def test_spectra():
    assert exact_set(P.perturbation_spectrum(bcm.dirichlet())) == ["-1/4", "1/12"]
    assert exact_set(P.perturbation_spectrum(bcm.neumann())) == ["(-5+sqrt(30))/60", "(-5-sqrt(30))/60"]
    kvn = P.perturbation_spectrum(bcm.named("kvn"))
    assert set(exact_set(kvn)) == {"(-5-sqrt(30))/60", "(-5+sqrt(30))/60", "(21-sqrt(462))/420", "(21+sqrt(462))/420"}
    assert kvn.rank == 4
    per = P.perturbation_spectrum(bcm.periodic())
    assert set(exact_set(per)) == {"1/12", "(-5-sqrt(30))/60", "(-5+sqrt(30))/60"} and per.rank == 3
    rad = P.perturbation_spectrum(bcm.radoux())
    assert set(exact_set(rad)) == {"(-21-sqrt(2982))/420", "(-21+sqrt(2982))/420"}
    assert exact_set(P.perturbation_spectrum(bcm.antiperiodic())) == ["-1/4"]


def test_dirichlet_eigenfunctions():
    spec = P.perturbation_spectrum(bcm.dirichlet())
    fs = {e.lambda_exact: Polynomial1D(e.coeffs) for e in spec.eigen}
    assert fs["-1/4"] == Polynomial1D([1])
    assert fs["1/12"] * 2 == Polynomial1D([-1, 2])


@pytest.mark.parametrize("name", ["dirichlet", "neumann", "kvn", "periodic", "antiperiodic", "radoux", "dirichlet-neumann"])
def test_eigen_residuals_and_orthogonality(name):
    spec = P.perturbation_spectrum(bcm.named(name))
    M = spec.matrix_float()
    for e in spec.eigen:
        v = np.array([complex(c.to_complex()) if isinstance(c, QuadSurd) else complex(c) for c in e.coords])
        assert np.abs(M @ v - e.lambda_float * v).max() <= 1e-12
    G = np.array([[1 / (i + j + 1) for j in range(8)] for i in range(8)])
    vecs = [np.pad(e.coeffs_float(), (0, 8 - len(e.coeffs))) for e in spec.eigen]
    for i in range(len(vecs)):
        for j in range(i):
            assert abs(vecs[i] @ G @ vecs[j]) <= 1e-12


def test_exact_orthogonality_for_rational_pairs():
    spec = P.perturbation_spectrum(bcm.dirichlet())
    a, b = (Polynomial1D(e.coeffs) for e in spec.eigen)
    assert inner_product(a, b) == 0


def test_reconstruction_exact_dirichlet():
    assert P.reconstruct_exact(P.perturbation_spectrum(bcm.dirichlet())) == X * Y - (X + Y) * half


@pytest.mark.parametrize("name", ["neumann", "kvn", "periodic", "radoux", "dirichlet-neumann"])
def test_reconstruction_surd_cases(name):
    spec = P.perturbation_spectrum(bcm.named(name))
    assert P.reconstruct_exact(spec) == spec.kernel
    R = P.reconstruct_float(spec)
    T = np.zeros_like(R)
    for (i, j), c in spec.kernel.to_float_dict().items():
        T[i, j] = c
    assert np.abs(R - T).max() <= 1e-10


def test_unweighted_resolution_does_not_reproduce_kernel():
    # sum u_k(x) u_k(y) without eigenvalue weights misses T: for Dirichlet it equals 5/4 + xy - (x+y)/2
    spec = P.perturbation_spectrum(bcm.dirichlet())
    assert P.literal_resolution_residual(spec) == pytest.approx(1.25)
    assert P.literal_resolution_residual(P.perturbation_spectrum(bcm.named("kvn"))) > 1e-3


def test_zero_discriminant_numeric_case():
    bc = P.zero_discriminant_bc(F(1, 2), F(1, 3))
    spec = P.perturbation_spectrum(bc)
    assert spec.rank == len(spec.eigen) == 3
    assert not all(e.exact for e in spec.eigen)
    R = P.reconstruct_float(spec)
    T = np.zeros_like(R)
    for (i, j), c in spec.kernel.to_float_dict().items():
        T[i, j] = c
    assert np.abs(R - T).max() <= 1e-10


def test_ranks():
    expect = {"nonlocal": 0, "kvn": 4, "dirichlet": 2, "neumann": 2, "radoux": 2, "dirichlet-neumann": 2, "periodic": 3, "antiperiodic": 1}
    assert {n: P.rank(bcm.named(n)) for n in expect} == expect
    assert P.rank(P.zero_discriminant_bc(2, -2)) == 3
    assert P.rank(bcm.robin(2, 3)) == 2 and P.rank(bcm.gsarc(1, 2, F(7, 3))) == 2


def test_rank_survey():
    report = P.zero_discriminant_rank_survey(60, seed=3)
    assert set(report) <= {2, 3, 4}
    assert sum(len(v) for v in report.values()) == 60


def test_rank_matches_spectrum_count():
    for bc in (bcm.named("kvn"), bcm.periodic(), bcm.robin(2, 3), P.zero_discriminant_bc(3, -1), P.zero_discriminant_bc(2, -2)):
        spec = P.perturbation_spectrum(bc)
        assert spec.rank == len(spec.eigen) == P.rank(bc)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.fractions(-3, 3, max_denominator=7), min_size=1, max_size=4), st.sampled_from(["dirichlet", "kvn", "periodic", "neumann"]))
def test_matrix_consistent_with_kernel(coeffs, name):
    spec = P.perturbation_matrix(bcm.named(name), P.monomial_basis(3))
    f = Polynomial1D(coeffs)
    want = apply_to_polynomial(spec.kernel, f)
    v = [f.coeff(k) for k in range(4)]
    got = Polynomial1D([sum(spec.matrix[i][j] * v[j] for j in range(4)) for i in range(4)])
    assert got == want


def test_kernel_structure():
    cases = [bcm.named(n) for n in bcm.NAMED] + [P.zero_discriminant_bc(a, b) for a, b in P.admissible_pairs(20, 5)]
    for bc in cases:
        T = P.perturbation_kernel(bc).T
        assert T.degree_x <= 3 and T.degree_y <= 3
        assert all(i + j <= 3 or (i, j) in ((3, 1), (1, 3)) for i, j in T.terms)
        assert P.rank(bc) <= 4


# --- closed forms ---------------------------------------------------------------------------


def check_closed_form(bc):
    cf = P.closed_form_spectrum(bc)
    spec = P.perturbation_spectrum(bc)
    got = sorted(complex(e.lambda_float).real for e in spec.eigen)
    want = sorted(float(c.value) for c in cf)
    assert np.allclose(got, want, rtol=0, atol=1e-12)
    M = spec.matrix_float()
    if spec.basis == P.monomial_basis(1):
        for c in cf:
            if c.offset is not None:
                v = np.array([float(c.offset), 1.0])
                assert np.abs(M @ v - float(c.value) * v).max() <= 1e-12


def test_robin_mixed_example():
    bc = bcm.dirichlet_neumann()
    cf = P.closed_form_spectrum(bc)
    r3 = mpmath.sqrt(3)
    assert mpmath.almosteq(cf[0].value, -(3 + 2 * r3) / 12, 1e-14)
    assert mpmath.almosteq(cf[0].offset, 1 / r3, 1e-14)
    assert mpmath.almosteq(cf[1].value, -(3 - 2 * r3) / 12, 1e-14)
    assert mpmath.almosteq(cf[1].offset, -1 / r3, 1e-14)
    assert P.perturbation_matrix(bc).matrix == [[F(-1, 4), F(-1, 6)], [-half, F(-1, 4)]]
    check_closed_form(bc)


@pytest.mark.parametrize("tau", [F(1, 4), F(1, 2), F(3, 4), F(3, 2)])
def test_kato_variations(tau):
    first = bcm.kato293(tau)
    assert P.perturbation_kernel(first).T == -(X + Y) * half + X * Y * (1 / (1 - tau))
    assert P.perturbation_matrix(first).matrix == [[F(-1, 4), F(-1, 6)], [tau / (2 * (1 - tau)), (1 + 3 * tau) / (12 * (1 - tau))]]
    check_closed_form(first)
    lam = sorted(float((-(1 - 3 * tau) + s * 2 * mpmath.sqrt(1 - 3 * tau + 3 * tau**2)) / (12 * (1 - tau))) for s in (1, -1))
    assert np.allclose(sorted(P.perturbation_spectrum(first).eigenvalues), lam, atol=1e-13)
    second = bcm.kato367(tau)
    assert P.perturbation_kernel(second).T == -(X + Y) * half + X * Y * (tau / (1 + tau))
    assert P.perturbation_matrix(second).matrix == [[F(-1, 4), F(-1, 6)], [-1 / (2 * (1 + tau)), -(3 - tau) / (12 * (1 + tau))]]
    check_closed_form(second)
    # eigenvector offsets (tau -+ sqrt(3 + 3 tau + tau^2))/3
    offs = sorted(float(c.offset) for c in P.closed_form_spectrum(second))
    r = mpmath.sqrt(3 + 3 * tau + tau**2)
    assert np.allclose(offs, sorted(float((tau + s * r) / 3) for s in (1, -1)), atol=1e-13)


@pytest.mark.parametrize("t", [F(1, 3), F(2), F(-3, 5)])
def test_angle_parametrized_example(t):
    bc = bcm.stakgold(t)
    cot = 1 / t
    assert P.perturbation_kernel(bc).T == -(X + Y) * half + X * Y * (cot / (1 + cot))
    check_closed_form(bc)
    # the eigenvalue radicand is 3 + 3 cot + cot^2, the same one the eigenvectors use
    lam = sorted(float(-(3 + cot + s * 2 * mpmath.sqrt(3 + 3 * cot + cot**2)) / (12 * (1 + cot))) for s in (1, -1))
    assert np.allclose(sorted(P.perturbation_spectrum(bc).eigenvalues), lam, atol=1e-13)


def test_robin_general_formula():
    for _ in range(20):
        a, d = rnd(), rnd()
        disc = d - a + a * d
        if disc == 0:
            continue
        bc = bcm.robin(a, d)
        M = P.perturbation_matrix(bc).matrix
        assert M == [
            [(4 + a - 3 * d - a * d) / (4 * disc), (3 + a - 2 * d - a * d) / (6 * disc)],
            [(a + d) / (2 * disc), (3 * a + 3 * d + a * d) / (12 * disc)],
        ]
        assert P.delta_tilde(a, 0, d) == (3 + 3 * a + a * a) * (3 - 3 * d + d * d)
        check_closed_form(bc)


def test_general_closed_form_random():
    done = 0
    while done < 50:
        a, b, d = rnd(), rnd(), rnd()
        bc = bcm.gsarc(a, b, d)
        if bcm.discriminant(bc) == 0:
            continue
        check_closed_form(bc)
        done += 1


def test_general_matrix_entries():
    for _ in range(20):
        a, b, d = rnd(), rnd(), rnd()
        D = d - a - 2 * b + b * b + a * d
        if D == 0:
            continue
        s = b * b + a * d
        M = P.perturbation_matrix(bcm.gsarc(a, b, d)).matrix
        assert M == [
            [(4 + a - 3 * d - s) / (4 * D), (3 + a - 2 * d - s) / (6 * D)],
            [(a + d) / (2 * D), (3 * a + 3 * d + s) / (12 * D)],
        ]


def test_delta_tilde_sign_of_cubic_term():
    # at beta = 0 the radicand factors as (3 + 3a + a^2)(3 - 3d + d^2), fixing the a^2 d sign
    a, d = sp.symbols("a d")
    expr = P.delta_tilde
    for av, dv in ((2, 3), (F(-1, 2), F(5, 3))):
        assert expr(av, 0, dv) == (3 + 3 * av + av**2) * (3 - 3 * dv + dv**2)


def test_quadratic_zero_discriminant_case():
    for a in (F(1), F(2), F(-1, 3), F(5, 2)):
        bc = P.zero_discriminant_bc(a, -a)
        assert bc.delta == -a
        T = P.perturbation_kernel(bc).T
        c = 1 + a
        want = BivariatePoly.constant(-(4 + a) / (12 * c)) + (X + Y) * (1 / (2 * c)) + X * Y * (a / c) - (X * X + Y * Y) * half
        assert T == want
        spec = P.perturbation_spectrum(bc)
        assert spec.rank == 3
        check_closed_form(bc)
    cf = P.closed_form_spectrum(P.zero_discriminant_bc(1, -1))
    assert cf[0].exact == "1/24"


def test_no_closed_form():
    with pytest.raises(P.NoClosedForm):
        P.closed_form_spectrum(P.zero_discriminant_bc(F(1, 2), F(1, 3)))
    with pytest.raises(P.NoClosedForm):
        P.closed_form_spectrum(bcm.periodic())


# --- zero-discriminant matrix entries ---------------------------------------------------------


def test_expanded_entries_equal_d_assembly():
    for a, b in P.admissible_pairs(100, seed=11):
        assert P.zero_disc_matrix_expanded(a, b) == P.zero_disc_matrix_from_d(a, b)


def test_d_coefficient_relations():
    for a, b in P.admissible_pairs(50, seed=12):
        from gsarc.greens import zero_disc_green_coefficients

        c = zero_disc_green_coefficients(a, b)
        d = P.d_coefficients(a, b)
        assert d["d10"] == half - c[(1, 0)] == -c[(0, 1)] - half


def test_printed_assembly_omits_cubic_cross_terms():
    # the true matrix adds d21/(j+2) in the x row and d21/(j+1) in the x^2 row
    for a, b in P.admissible_pairs(50, seed=13):
        true = P.perturbation_matrix(P.zero_discriminant_bc(a, b), P.monomial_basis(3)).matrix
        printed = P.zero_disc_matrix_from_d(a, b)
        d21 = P.d_coefficients(a, b)["d21"]
        for j in range(4):
            jj = j + 1
            assert true[0][j] == printed[0][j] and true[3][j] == printed[3][j]
            assert true[1][j] - printed[1][j] == d21 / (jj + 2)
            assert true[2][j] - printed[2][j] == d21 / (jj + 1)


# --- Volterra --------------------------------------------------------------------------------


def test_volterra():
    v = P.volterra_decomposition()
    assert v.kernel_identity
    assert v.matrix == [[F(-1, 4), F(-1, 2)], [F(1, 6), F(1, 4)]]
    lam = [complex(e.lambda_float) for e in v.eigen]
    target = 1 / (2 * np.sqrt(12))
    assert abs(lam[0] - 1j * target) < 1e-15 and abs(lam[1] + 1j * target) < 1e-15
    c = v.eigen[0].coeffs_complex()
    assert np.allclose(c, [1, (-3 + 1j * np.sqrt(3)) / 2], atol=1e-15)
    # branch value at (0.2, 0.9)
    assert (0.2 - 0.9) - 0.5 * (0.2 - 0.9) == pytest.approx(-0.5 * abs(0.2 - 0.9))


# --- exact algebra ----------------------------------------------------------------------------


def test_quadsurd_arithmetic():
    a = QuadSurd(F(1), F(2), 3)
    b = a.conjugate()
    assert a * b == QuadSurd(F(-11), F(0), 3)
    assert (a / a) == QuadSurd(F(1), F(0), 3)
    assert str(QuadSurd(F(-5, 60), F(-1, 60), 30)) == "(-5-sqrt(30))/60"
    assert str(QuadSurd(F(0), F(1, 12), -3)) == "sqrt(-3)/12"


def test_charpoly_and_factor():
    M = [[F(-1, 4), F(-7, 180)], [half, F(1, 12)]]
    c = P.charpoly(M)
    assert c[-1] == 1 and len(c) == 3
    (f,) = P.factor_roots(c)
    assert f.exact and {str(r) for r in f.roots} == {"(-5-sqrt(30))/60", "(-5+sqrt(30))/60"}


def test_json_shape():
    data = P.perturbation_spectrum(bcm.neumann()).to_json()
    assert set(data) == {"basis", "matrix", "eigen", "rank"}
    assert data["matrix"][0] == ["-1/4", "-7/180"]
    assert data["eigen"][0]["lambda_exact"] == "(-5-sqrt(30))/60"


def test_zero_discriminant_helper():
    assert P.zero_discriminant_bc(2, -2).delta == zero_discriminant_delta(2, -2) == -2
