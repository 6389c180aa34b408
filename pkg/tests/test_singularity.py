import numpy as np
import pytest

from specsing import perturbation as pt
from specsing.errors import DegenerateF010, NotAtSingularity
from specsing.potential import Barrier, GainProfile
from specsing.singularity import (
    FULL_NUMERIC_ORDER,
    TaylorData,
    first_order_correction,
    first_order_singularity,
    full_numeric_singularity,
    gamma_scale,
    generic_corrections,
    mode_number,
    solve_unperturbed,
    taylor_data,
)
from specsing.slab import REFERENCE_MEDIUM, map_parameters
from specsing.transfer import m22

M = REFERENCE_MEDIUM

# homogeneous roots of the reference medium, frozen from this solver
ROOTS = {
    1358: (1502.178145013, 41.259930),
    1359: (1501.088279601, 40.621629),
    1360: (1499.999983260, 40.409053),
    1361: (1498.913252627, 40.621287),
    1362: (1497.828084350, 41.257421),
}


def contour_derivative(f, z0, radius, n=48):
    """``f'(z0)`` of a holomorphic ``f`` by the trapezoidal Cauchy integral."""
    w = np.exp(2j * np.pi * np.arange(n) / n)
    return complex(np.mean([f(z0 + radius * t) / t for t in w]) / radius)


@pytest.fixture(scope="module")
def roots():
    return {m: solve_unperturbed(M, m) for m in ROOTS}


def test_mode_number_examples():
    assert mode_number(1500.0, M) == 1360
    assert mode_number(1497.56, M) == 1362
    assert mode_number(1502.67, M) == 1358


@pytest.mark.parametrize("m", sorted(ROOTS))
def test_frozen_roots(roots, m):
    r = roots[m]
    lam, g = ROOTS[m]
    assert r.lambda_nm == pytest.approx(lam, abs=1e-9)
    assert r.g0_per_cm == pytest.approx(g, abs=1e-6)
    assert r.residual < 1e-12
    assert mode_number(r.lambda_nm, M, r.g0_per_cm) == m


@pytest.mark.parametrize("m, lam, g", [(1360, 1499.999983312, 40.40905), (1362, 1497.561770810, 41.53101)])
def test_reference_roots(roots, m, lam, g):
    assert abs(roots[m].lambda_nm - lam) <= 5e-9
    assert abs(roots[m].g0_per_cm - g) <= 5e-4


@pytest.mark.parametrize("m", sorted(ROOTS))
def test_root_is_a_barrier_singularity(roots, m):
    r = roots[m]
    z1 = map_parameters(M, r.lambda_nm, r.g0_per_cm).zeta1
    assert abs(m22(Barrier(z1), r.k0, tol=1e-13)) < 1e-9


@pytest.mark.parametrize("dl, dg", [(0.01, 0), (-0.01, 0), (0, 1.0), (0, -1.0)])
def test_root_is_seed_stable(roots, dl, dg):
    r = roots[1360]
    s = solve_unperturbed(M, 1360, seed=(r.lambda_nm + dl, r.g0_per_cm + dg))
    assert abs(s.lambda_nm - r.lambda_nm) < 1e-9
    assert abs(s.g0_per_cm - r.g0_per_cm) < 1e-9


def test_taylor_data(roots):
    r = roots[1360]
    td = taylor_data(r.fn0, r.k0, GainProfile("single", 0.1))
    assert abs(td.F000) <= 1e-10 * gamma_scale(r.fn0, r.k0)
    assert td.F010 == pytest.approx(contour_derivative(lambda n: pt.barrier_F0(n, r.k0), r.fn0, 1 / r.k0),
                                    rel=1e-8)
    assert td.F001 == pytest.approx(contour_derivative(lambda k: pt.barrier_F0(r.fn0, k), r.k0, 1 / abs(r.fn0)),
                                    rel=1e-8)
    q = pt.barrier_F_ell(r.fn0, r.k0, GainProfile("single", 0.1), 1)
    assert td.F100 == pytest.approx(q, rel=1e-10)


def test_taylor_data_off_root(roots):
    r = roots[1360]
    with pytest.raises(NotAtSingularity):
        taylor_data(r.fn0 * (1 + 1e-6), r.k0, GainProfile("single", 0.1))


def test_homogeneous_slab_needs_no_correction(roots):
    r = first_order_singularity(M, 1360, roots[1360])
    assert r.eps == 0 and r.order == 0 and r.correction is None
    assert (r.lambda_star, r.g_star) == (roots[1360].lambda_nm, roots[1360].g0_per_cm)
    assert r.diagnostics["residual"] / r.diagnostics["gamma_scale"] < 1e-10


@pytest.mark.parametrize("kind", ["single", "double"])
@pytest.mark.parametrize("nu", [0.1, 0.3, 0.5])
def test_back_substitution(roots, kind, nu):
    r = first_order_singularity(M.replace(nu=nu, pumping=kind), 1360, roots[1360], residual=False)
    assert r.correction.back_substitution < 1e-12


def test_correction_coefficients_are_real_solution(roots):
    r = roots[1361]
    td = taylor_data(r.fn0, r.k0, GainProfile("double", 0.2))
    c = first_order_correction(td, M.replace(nu=0.2, pumping="double"), r.lambda_nm, r.g0_per_cm)
    A = np.array([[c.X.real, c.Y.real], [c.X.imag, c.Y.imag]])
    lam1, g1 = np.linalg.solve(A, [-c.rhs.real, -c.rhs.imag])
    assert c.lambda1 == pytest.approx(lam1, rel=1e-12)
    assert c.g1 == pytest.approx(g1, rel=1e-12)


def test_generic_corrections_trivial():
    td = TaylorData(0j, 2 + 1j, 1j, 0.5 - 0.1j)
    assert generic_corrections(td, 0.0) == (0j, None)
    with pytest.raises(DegenerateF010):
        generic_corrections(TaylorData(0j, 0j, 1j, 1j), 1.0)


def test_generic_corrections_orders():
    # barrier root at fixed k: first order leaves O(eps^2), second order O(eps^3)
    from scipy.optimize import fsolve

    prof = GainProfile("single", 0.4)
    # tune fn so that e^{-2i fn k} = r^2 at k = 3
    k0 = 3.0

    def eq(v):
        r = pt.ss_residual(complex(*v), k0)
        return [r.real, r.imag]

    fn0 = complex(*fsolve(eq, [1.5, 0.05], xtol=1e-14))
    td = taylor_data(fn0, k0, prof, second_order=True)
    fn1, fn2 = generic_corrections(td, 1.0, order=2)

    def gamma(fn, s):
        return pt.barrier_F0(fn, k0) + s * pt.barrier_F1(fn, k0, prof) + s**2 * td.F200

    r1 = [abs(gamma(fn0 + fn1 * s, s)) for s in (1e-2, 5e-3)]
    r2 = [abs(gamma(fn0 + fn1 * s + fn2 * s * s, s)) for s in (1e-2, 5e-3)]
    assert 3.5 < r1[0] / r1[1] < 4.5
    assert 7.0 < r2[0] / r2[1] < 9.0


def test_full_numeric_homogeneous(roots):
    f = full_numeric_singularity(M, 1360)
    r = roots[1360]
    assert f.order == FULL_NUMERIC_ORDER and f.method == "full-numeric"
    assert f.lambda_star == pytest.approx(r.lambda_nm, rel=1e-10)
    assert f.g_star == pytest.approx(r.g0_per_cm, rel=1e-10)


def test_full_numeric_near_first_order(roots):
    # the wavelength gap to the oracle is second order too
    gaps = []
    for nu in (0.1, 0.05):
        med = M.replace(nu=nu)
        a = first_order_singularity(med, 1360, roots[1360])
        f = full_numeric_singularity(med, 1360)
        gaps.append(abs(f.lambda_star - a.lambda_star))
        assert f.diagnostics["relative_residual"] < 1e-11
        assert f.diagnostics["det_error"] < 1e-10
    assert gaps[0] / gaps[1] > 3.5
