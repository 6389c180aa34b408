"""Threshold points of the slab: unperturbed roots, first-order shifts, full oracle.

The homogeneous slab (``nu = 0``) lases where the barrier condition
``e^{-2i fn k} = ((fn - 1)/(fn + 1))^2`` holds; two real unknowns
``(lambda, g0)`` absorb the complex equation.  Inhomogeneity adds
``eps z2 F1`` to the Jost function, and linearising about the homogeneous
root gives the real shifts ``(lambda1, g1)`` from

    X lambda1 + Y g1 + F1 z2 = 0.

The full-numeric solver instead drives the ODE Jost function of the exact
potential to zero and serves as the oracle for the first-order results.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateF010,
    DegenerateXY,
    JacobianSingular,
    NoConvergence,
    NotAtSingularity,
)
from .perturbation import (
    SS_TOL,
    barrier_F0,
    barrier_F1,
    barrier_F_ell,
    dF0,
    ss_residual,
)
from .potential import GainProfile
from .slab import (
    SlabMedium,
    build_potential,
    fn_and_derivatives,
    map_parameters,
    wavenumber,
)
from .transfer import assemble_transfer_matrix, integrate_fundamental, jost_from_pair

ROOT_TOL = 1e-12
FULL_TOL = 1e-11
ODE_TOL = 1e-13
FULL_NUMERIC_ORDER = -1


@dataclass(frozen=True)
class UnperturbedRoot:
    mode_m: int
    lambda_nm: float
    g0_per_cm: float
    fn0: complex
    k0: float
    residual: float
    iterations: int


@dataclass(frozen=True)
class TaylorData:
    """``F_lpq = d^p_fn d^q_k F_l / (p! q!)`` at ``(fn0, k0)``."""

    F000: complex
    F010: complex
    F001: complex
    F100: complex
    F020: complex | None = None
    F011: complex | None = None
    F002: complex | None = None
    F110: complex | None = None
    F101: complex | None = None
    F200: complex | None = None


@dataclass(frozen=True)
class CorrectionCoefficients:
    X: complex
    Y: complex
    rhs: complex
    lambda1: float
    g1: float

    @property
    def back_substitution(self) -> float:
        """``|X lambda1 + Y g1 + rhs| / |rhs|``."""
        r = self.X * self.lambda1 + self.Y * self.g1 + self.rhs
        return abs(r) / max(abs(self.rhs), 1e-300)


@dataclass(frozen=True)
class SingularityResult:
    mode_m: int
    nu: float
    pumping: str
    lambda0_nm: float
    g0_per_cm: float
    lambda_star: float
    g_star: float
    order: int
    eps: float
    residual: float
    fn0: complex
    k0: float
    correction: CorrectionCoefficients | None = None
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def method(self) -> str:
        return "full-numeric" if self.order == FULL_NUMERIC_ORDER else f"order-{self.order}"


def mode_number(lambda_nm, medium: SlabMedium, g0_per_cm: float = 0.0) -> int:
    """``round(2 Re(fn) L / lambda)``."""
    fn, _, _ = fn_and_derivatives(medium, lambda_nm, g0_per_cm)
    return int(round(2 * fn.real * medium.L_nm / lambda_nm))


# -- unperturbed root ----------------------------------------------------------

def _ss_and_jac(medium, lam, g):
    fn, fn10, fn01 = fn_and_derivatives(medium, lam, g)
    k = wavenumber(medium, lam)
    e = np.exp(-2j * fn * k)
    r = (fn - 1) / (fn + 1)
    R = e - r * r
    dR_fn = -2j * k * e - 4 * r / (fn + 1) ** 2
    dR_k = -2j * fn * e
    J = np.array([dR_fn * fn10 - dR_k * k / lam, dR_fn * fn01])
    return R, J, fn, k


def _seed_gain(medium, lam, n_scan=401):
    """Gain at which ``|e^{-2i fn k}|`` best matches ``|r|^2`` at fixed ``lambda``."""
    gs = np.linspace(0.0, medium.alpha_per_cm, n_scan)
    mism = []
    for g in gs:
        fn, _, _ = fn_and_derivatives(medium, lam, g)
        k = wavenumber(medium, lam)
        mism.append(abs(2 * fn.imag * k + np.log(abs((fn - 1) / (fn + 1)) ** 2)))
    return float(gs[int(np.argmin(mism))])


def _newton2(fun, x0, tol, scale, max_iter=60):
    """Damped Newton for a complex equation in two real unknowns.

    ``fun(x) -> (R, J)`` with complex ``R`` and complex gradient ``J`` (2,).
    ``scale`` holds per-coordinate step scales for the stagnation test.
    """
    x = np.array(x0, dtype=float)
    R, J = fun(x)
    for it in range(1, max_iter + 1):
        A = np.array([[J[0].real, J[1].real], [J[0].imag, J[1].imag]])
        if abs(np.linalg.det(A)) < 1e-300 or not np.all(np.isfinite(A)):
            raise JacobianSingular(f"singular Jacobian at {x}")
        step = np.linalg.solve(A, [-R.real, -R.imag])
        t = 1.0
        while True:
            xn = x + t * step
            Rn, Jn = fun(xn)
            if abs(Rn) < abs(R) or t < 1e-3:
                break
            t *= 0.5
        x, R, J = xn, Rn, Jn
        if abs(R) < tol:
            return x, abs(R), it
        if np.all(np.abs(t * step) < 1e-15 * np.maximum(np.abs(x), scale)):
            break
    raise NoConvergence(f"Newton stalled at {x} with |R| = {abs(R):.3g}")


def solve_unperturbed(medium: SlabMedium, mode_m: int, seed=None) -> UnperturbedRoot:
    """Homogeneous-slab singularity ``(lambda0, g0)`` of mode ``m``."""
    if seed is None:
        lam = 2 * medium.n0 * medium.L_nm / mode_m
        seed = (lam, _seed_gain(medium, lam))

    def fun(p):
        R, J, _, _ = _ss_and_jac(medium, p[0], p[1])
        return R, J

    (lam, g), res, it = _newton2(fun, seed, ROOT_TOL, scale=np.array([1.0, 1.0]))
    _, _, fn, k = _ss_and_jac(medium, lam, g)
    m = mode_number(lam, medium, g)
    if m != mode_m:
        raise NoConvergence(f"converged to mode {m} instead of {mode_m}")
    return UnperturbedRoot(mode_m, float(lam), float(g), fn, k, res, it)


# -- Taylor data and first-order correction -----------------------------------

def _d5(f, x, h):
    """Five-point central derivative of a holomorphic ``f`` along a real step."""
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


def taylor_data(fn0, k0, profile: GainProfile, second_order: bool = False,
                check_root: bool = True) -> TaylorData:
    """Expansion coefficients of ``F0 + s F1 + s^2 F2`` about ``(fn0, k0)``.

    First derivatives of ``F0`` are analytic; the second-order entries use
    five-point differences with a phase step of ``1e-3``.
    """
    fn0 = complex(fn0)
    if check_root and abs(ss_residual(fn0, k0)) > SS_TOL:
        raise NotAtSingularity(f"singularity residual {abs(ss_residual(fn0, k0)):.3g} exceeds {SS_TOL}")
    d_fn, d_k = dF0(fn0, k0)
    F1 = barrier_F1(fn0, k0, profile)
    if not second_order:
        return TaylorData(barrier_F0(fn0, k0), d_fn, d_k, F1)
    hn = 1e-3 / k0
    hk = 1e-3 / abs(fn0)
    F020 = 0.5 * _d5(lambda n: dF0(n, k0)[0], fn0, hn)
    F011 = _d5(lambda kk: dF0(fn0, kk)[0], k0, hk)
    F002 = 0.5 * _d5(lambda kk: dF0(fn0, kk)[1], k0, hk)
    F110 = _d5(lambda n: barrier_F1(n, k0, profile), fn0, hn)
    F101 = _d5(lambda kk: barrier_F1(fn0, kk, profile), k0, hk)
    F200 = barrier_F_ell(fn0, k0, profile, 2)
    return TaylorData(barrier_F0(fn0, k0), d_fn, d_k, F1, F020, F011, F002, F110, F101, F200)


def first_order_correction(td: TaylorData, medium: SlabMedium, lambda0_nm, g0_per_cm
                           ) -> CorrectionCoefficients:
    """Real ``(lambda1 [nm], g1 [1/cm])`` per unit ``eps`` from the linearised condition."""
    _, fn10, fn01 = fn_and_derivatives(medium, lambda0_nm, g0_per_cm)
    p = map_parameters(medium, lambda0_nm, g0_per_cm)
    X = fn10 * td.F010 - td.F001 * p.k / lambda0_nm
    Y = fn01 * td.F010
    rhs = td.F100 * p.zeta2
    d = (X * np.conj(Y)).imag
    if abs(d) < 1e-18 * abs(X) * abs(Y):
        raise DegenerateXY("perturbation is tangent to the root manifold")
    lam1 = -(rhs * np.conj(Y)).imag / d
    g1 = (rhs * np.conj(X)).imag / d
    return CorrectionCoefficients(complex(X), complex(Y), complex(rhs), float(lam1), float(g1))


def generic_corrections(td: TaylorData, z2, order: int = 1):
    """Shifts ``(fn1, fn2)`` of the refractive root at fixed ``k``.

    ``fn2`` is ``None`` for ``order=1``.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if abs(td.F010) == 0:
        raise DegenerateF010("dF0/dfn vanishes")
    z2 = complex(z2)
    fn1 = -td.F100 * z2 / td.F010
    if order == 1:
        return fn1, None
    if td.F200 is None:
        raise ValueError("second-order Taylor data required")
    fn2 = -(td.F020 * fn1**2 + td.F110 * fn1 * z2 + td.F200 * z2**2) / td.F010
    return fn1, fn2


# -- oracle diagnostics ---------------------------------------------------------

def ode_diagnostics(medium: SlabMedium, lambda_nm, g0_per_cm, tol: float = ODE_TOL) -> dict:
    """Jost residual and structural checks of the exact potential at a point."""
    k = wavenumber(medium, lambda_nm)
    pair = integrate_fundamental(build_potential(medium, lambda_nm, g0_per_cm), k, tol)
    gamma = pair.dphi1_at_1 - 1j * k * pair.phi1_at_1
    W = pair.wronskian()
    det = assemble_transfer_matrix(jost_from_pair(pair), k).det()
    fn, _, _ = fn_and_derivatives(medium, lambda_nm, g0_per_cm)
    scale = gamma_scale(fn, k)
    return {
        "gamma_1_minus": complex(gamma),
        "gamma_scale": scale,
        "residual": abs(gamma),
        "relative_residual": abs(gamma) / scale,
        "wronskian_error": abs(W / (1j * k) - 1),
        "det_error": abs(det - 1),
    }


def gamma_scale(fn, k) -> float:
    """Size of the individual terms of ``Gamma_{1-}`` near a barrier root."""
    fn = complex(fn)
    return float(k * (abs(fn) + 1 / abs(fn) + 2))


def first_order_singularity(medium: SlabMedium, mode_m: int, root: UnperturbedRoot | None = None,
                            residual: bool = True) -> SingularityResult:
    """Threshold point of mode ``m`` to first order in the inhomogeneity."""
    if root is None:
        root = solve_unperturbed(medium, mode_m)
    eps = map_parameters(medium, root.lambda_nm, root.g0_per_cm).eps
    corr = None
    lam, g = root.lambda_nm, root.g0_per_cm
    order = 0
    if eps != 0.0:
        td = taylor_data(root.fn0, root.k0, GainProfile(medium.pumping, medium.nu))
        corr = first_order_correction(td, medium, root.lambda_nm, root.g0_per_cm)
        lam = root.lambda_nm + corr.lambda1 * eps
        g = root.g0_per_cm + corr.g1 * eps
        order = 1
    diag = {"ss_residual": root.residual}
    res = float("nan")
    if residual:
        diag.update(ode_diagnostics(medium, lam, g))
        res = diag["residual"]
    return SingularityResult(mode_m, medium.nu, medium.pumping.value, root.lambda_nm, root.g0_per_cm,
                             float(lam), float(g), order, eps, res, root.fn0, root.k0, corr, diag)


def full_numeric_singularity(medium: SlabMedium, mode_m: int, seed=None, tol: float = ODE_TOL,
                             rel_tol: float = FULL_TOL) -> SingularityResult:
    """Oracle: Newton on the ODE Jost function of the exact slab potential.

    The Jacobian is a central difference with steps ``1e-7`` nm and ``1e-6``
    1/cm.  Convergence requires ``|Gamma_{1-}| / scale < rel_tol``; if the
    integration noise floor sits above that, the last iterate is accepted
    once the Newton step itself drops below ``1e-12`` relative and the
    residual is reported as it stands.
    """
    root = solve_unperturbed(medium, mode_m)
    if seed is None:
        seed = first_order_singularity(medium, mode_m, root, residual=False)
        seed = (seed.lambda_star, seed.g_star)
    hl, hg = 1e-7, 1e-6

    def gamma(lam, g):
        k = wavenumber(medium, lam)
        pair = integrate_fundamental(build_potential(medium, lam, g), k, tol)
        return pair.dphi1_at_1 - 1j * k * pair.phi1_at_1

    x = np.array(seed, dtype=float)
    fn, _, _ = fn_and_derivatives(medium, x[0], x[1])
    scale = gamma_scale(fn, wavenumber(medium, x[0]))
    G = gamma(*x)
    history = [abs(G) / scale]
    for it in range(1, 40):
        Jl = (gamma(x[0] + hl, x[1]) - gamma(x[0] - hl, x[1])) / (2 * hl)
        Jg = (gamma(x[0], x[1] + hg) - gamma(x[0], x[1] - hg)) / (2 * hg)
        A = np.array([[Jl.real, Jg.real], [Jl.imag, Jg.imag]])
        if abs(np.linalg.det(A)) < 1e-300:
            raise JacobianSingular(f"singular Jacobian at {x}")
        step = np.linalg.solve(A, [-G.real, -G.imag])
        x = x + step
        G = gamma(*x)
        history.append(abs(G) / scale)
        small_step = abs(step[0]) < 1e-12 * abs(x[0]) and abs(step[1]) < 1e-12 * max(abs(x[1]), 1.0)
        if history[-1] < rel_tol or small_step:
            break
    else:
        raise NoConvergence(f"full-numeric Newton did not converge for mode {mode_m}")
    if history[-1] >= rel_tol and not small_step:
        raise NoConvergence(f"full-numeric residual {history[-1]:.3g} above {rel_tol}")
    diag = ode_diagnostics(medium, x[0], x[1], tol)
    diag["iterations"] = it
    diag["history"] = history
    eps = map_parameters(medium, x[0], x[1]).eps
    return SingularityResult(mode_m, medium.nu, medium.pumping.value, root.lambda_nm, root.g0_per_cm,
                             float(x[0]), float(x[1]), FULL_NUMERIC_ORDER, eps, diag["residual"],
                             root.fn0, root.k0, None, diag)
