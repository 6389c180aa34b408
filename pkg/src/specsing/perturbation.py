"""Green's-function perturbation series for ``v = v0 + eps v1``.

Given the fundamental solutions of an exactly solvable ``v0`` with Wronskian
``W = ik``, the retarded Green's function is separable,

    G(x, y) = [phi1(y) phi2(x) - phi2(y) phi1(x)] / W,

so every order of the series is a pair of running integrals

    A_i(x) = int_0^x phi_i(y) v1(y) phi^(m-1)(y) dy,
    phi^(m)(x) = [phi2(x) A1(x) - phi1(x) A2(x)] / W,

and the Jost coefficients follow from the boundary values ``A_i(1)``.  Regular
``v1`` is handled by panelled cumulative quadrature; a delta-array ``v1``
collapses each running integral to a finite sum over the centres.

The constant barrier ``v0 = z1`` is specialised with ``fn = sqrt(1 - z1/k^2)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import NotAtSingularity, QuadratureFailure, RefractiveRootVanishes, ValidationError
from .potential import DeltaArray, GainProfile, ProfileKind, pumping_profile
from .quadrature import DEFAULT_NODES, make_panels
from .transfer import check_wavenumber

FN_MIN = 1e-10
QUAD_RTOL = 1e-9
SS_TOL = 1e-8
MOMENT_NU = 0.05


@dataclass(frozen=True)
class UnperturbedBasis:
    """Fundamental solutions of ``v0`` and the associated Green's function.

    All callables are vectorised over ``x``.  ``omega`` is the oscillation
    rate of the solutions, used to size quadrature panels.
    """

    k: float
    phi1_0: Callable = field(repr=False)
    phi2_0: Callable = field(repr=False)
    dphi1_0: Callable = field(repr=False)
    dphi2_0: Callable = field(repr=False)
    omega: complex = 1.0
    fn: complex = 1.0

    @property
    def wronskian(self) -> complex:
        return 1j * self.k

    def green(self, x, y):
        return (self.phi1_0(y) * self.phi2_0(x) - self.phi2_0(y) * self.phi1_0(x)) / self.wronskian

    def green_dx(self, x, y):
        return (self.phi1_0(y) * self.dphi2_0(x) - self.phi2_0(y) * self.dphi1_0(x)) / self.wronskian

    def gamma0(self, j: int, sign: int) -> complex:
        """Unperturbed Jost value ``phi_j'(1) +- ik phi_j(1)``."""
        phi, dphi = (self.phi1_0, self.dphi1_0) if j == 1 else (self.phi2_0, self.dphi2_0)
        return complex(dphi(1.0) + sign * 1j * self.k * phi(1.0))


def refractive_root(z1, k) -> complex:
    """Principal ``sqrt(1 - z1/k^2)``; on the imaginary axis the branch with Im > 0."""
    k = check_wavenumber(k)
    fn = complex(np.sqrt(complex(1.0 - complex(z1) / (k * k))))
    if fn.real == 0.0 and fn.imag < 0.0:
        fn = -fn
    if abs(fn) < FN_MIN:
        raise RefractiveRootVanishes(f"|fn| = {abs(fn):.3g} below {FN_MIN}")
    return fn


def make_basis_free(k) -> UnperturbedBasis:
    k = check_wavenumber(k)
    return UnperturbedBasis(
        k=k,
        phi1_0=lambda x: np.exp(-1j * k * np.asarray(x)),
        phi2_0=lambda x: np.cos(k * np.asarray(x)) + 0j,
        dphi1_0=lambda x: -1j * k * np.exp(-1j * k * np.asarray(x)),
        dphi2_0=lambda x: -k * np.sin(k * np.asarray(x)) + 0j,
        omega=k,
        fn=1.0,
    )


def basis_from_root(fn, k) -> UnperturbedBasis:
    """Constant-barrier basis parametrised directly by ``fn`` and ``k``."""
    k = check_wavenumber(k)
    fn = complex(fn)
    if abs(fn) < FN_MIN:
        raise RefractiveRootVanishes(f"|fn| = {abs(fn):.3g} below {FN_MIN}")
    a = fn * k

    def phi1(x):
        ax = a * np.asarray(x)
        return np.cos(ax) - 1j * np.sin(ax) / fn

    def dphi1(x):
        ax = a * np.asarray(x)
        return -a * np.sin(ax) - 1j * k * np.cos(ax)

    return UnperturbedBasis(
        k=k,
        phi1_0=phi1,
        phi2_0=lambda x: np.cos(a * np.asarray(x)),
        dphi1_0=dphi1,
        dphi2_0=lambda x: -a * np.sin(a * np.asarray(x)),
        omega=abs(a.real) + abs(a.imag),
        fn=fn,
    )


def make_basis_barrier(z1, k) -> UnperturbedBasis:
    return basis_from_root(refractive_root(z1, k), k)


# -- series machinery ---------------------------------------------------------

def _delta_orders(basis, v1: DeltaArray, j: int, L: int, x_end: float):
    """Per-order ``(A1, A2, phi, phi')`` at ``x_end`` for a delta-array ``v1``.

    ``u`` holds ``phi^(m)`` at the centres; only strictly earlier centres feed
    it because ``G(a, a) = 0``.
    """
    keep = [i for i, c in enumerate(v1.centers) if c < x_end]
    a = np.asarray(v1.centers, dtype=float)[keep]
    z = np.asarray(v1.couplings, dtype=complex)[keep]
    p1 = basis.phi1_0(a)
    p2 = basis.phi2_0(a)
    W = basis.wronskian
    kern = np.triu((p1[:, None] * p2[None, :] - p2[:, None] * p1[None, :]) / W, 1)
    e1, e2 = basis.phi1_0(x_end), basis.phi2_0(x_end)
    d1, d2 = basis.dphi1_0(x_end), basis.dphi2_0(x_end)
    u = p1 if j == 1 else p2
    out = []
    for _ in range(L):
        src = z * u
        A1, A2 = np.sum(p1 * src), np.sum(p2 * src)
        out.append((A1, A2, (e2 * A1 - e1 * A2) / W, (d2 * A1 - d1 * A2) / W))
        u = src @ kern
    return out


def _regular_orders(basis, v1, j: int, L: int, x_end: float, n_nodes: int, breakpoints):
    """Boundary data per order plus ``phi^(m)`` at ``x_end`` for a regular ``v1``."""
    panels = make_panels(0.0, x_end, basis.omega, breakpoints, n_nodes)
    x = panels.x
    p1 = basis.phi1_0(x)
    p2 = basis.phi2_0(x)
    dp1 = basis.dphi1_0(x)
    dp2 = basis.dphi2_0(x)
    vx = np.asarray(v1(x), dtype=complex)
    if vx.shape != x.shape:
        vx = np.broadcast_to(vx, x.shape)
    W = basis.wronskian
    u = p1 if j == 1 else p2
    ends = []
    for _ in range(L):
        src = vx * u
        A1 = panels.cumulative(p1 * src)
        A2 = panels.cumulative(p2 * src)
        ends.append((A1[-1, -1], A2[-1, -1]))
        u = (p2 * A1 - p1 * A2) / W
        du = (dp2 * A1 - dp1 * A2) / W
        ends[-1] = ends[-1] + (u[-1, -1], du[-1, -1])
    return ends


def _as_callable(v1):
    if isinstance(v1, DeltaArray):
        return v1, ()
    if isinstance(v1, GainProfile):
        return v1, tuple(v1.breakpoints)
    if callable(v1):
        return v1, tuple(getattr(v1, "breakpoints", ()))
    raise ValidationError(f"unsupported perturbation {v1!r}")


def _converged(coarse, fine):
    coarse = np.asarray(coarse)
    fine = np.asarray(fine)
    return np.all(np.abs(fine - coarse) <= QUAD_RTOL * np.max(np.abs(fine)))


def _orders(basis, v1, j, L, x_end=1.0, n_nodes=DEFAULT_NODES, check=True):
    v1, bps = _as_callable(v1)
    if isinstance(v1, DeltaArray):
        return _delta_orders(basis, v1, j, L, x_end)
    bps = tuple(b for b in bps if 0.0 < b < x_end)
    coarse = _regular_orders(basis, v1, j, L, x_end, n_nodes, bps)
    if not check:
        return coarse
    nodes = n_nodes
    for _ in range(3):
        nodes = 2 * nodes - 1
        fine = _regular_orders(basis, v1, j, L, x_end, nodes, bps)
        if all(_converged(c, f) for c, f in zip(coarse, fine)):
            return fine
        coarse = fine
    raise QuadratureFailure("nested quadrature did not converge under node doubling")


def phi_correction(basis: UnperturbedBasis, v1, ell: int, x: float, j: int = 1,
                   derivative: bool = False, check: bool = True) -> complex:
    """Order-``ell`` correction ``phi_j^(ell)(x)`` (or its derivative)."""
    if ell < 1:
        raise ValidationError("order must be >= 1")
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValidationError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0j
    data = _orders(basis, v1, j, ell, x_end=x, check=check)
    return complex(data[ell - 1][3] if derivative else data[ell - 1][2])


def jost_coefficients(basis: UnperturbedBasis, v1, L: int, j: int = 1, sign: int = -1,
                      check: bool = True) -> np.ndarray:
    """``Gamma_{j+-}^(l)`` for ``l = 0..L`` in one sweep."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    g1 = basis.gamma0(1, sign)
    g2 = basis.gamma0(2, sign)
    out = [basis.gamma0(j, sign)]
    if L >= 1:
        data = _orders(basis, v1, j, L, check=check)
        W = basis.wronskian
        out.extend((g2 * d[0] - g1 * d[1]) / W for d in data)
    return np.array(out, dtype=complex)


def jost_correction(basis: UnperturbedBasis, v1, ell: int, j: int = 1, sign: int = -1,
                    check: bool = True) -> complex:
    """Series coefficient ``Gamma_{j+-}^(ell)`` of the Jost function."""
    if ell < 0:
        raise ValidationError("order must be >= 0")
    return complex(jost_coefficients(basis, v1, ell, j, sign, check)[ell])


@dataclass(frozen=True)
class JostSeries:
    """Coefficients of ``Gamma_{1-} = sum_l c_l s^l`` in the series variable ``s``."""

    coefficients: np.ndarray
    series_variable: complex

    def partial_sum(self, order: int | None = None) -> complex:
        c = self.coefficients if order is None else self.coefficients[: order + 1]
        return complex(np.polyval(c[::-1], self.series_variable))


def jost_series(basis: UnperturbedBasis, v1, series_variable, L_max: int = 3) -> JostSeries:
    return JostSeries(jost_coefficients(basis, v1, L_max), complex(series_variable))


# -- constant-barrier specialisation -------------------------------------------

def barrier_F0(fn, k) -> complex:
    """Unperturbed ``Gamma_{1-}`` of the barrier, ``-k[(fn + 1/fn) sin(fn k) + 2i cos(fn k)]``."""
    fn = complex(fn)
    if abs(fn) < FN_MIN:
        raise RefractiveRootVanishes(f"|fn| = {abs(fn):.3g} below {FN_MIN}")
    a = fn * k
    return complex(-k * ((fn + 1 / fn) * np.sin(a) + 2j * np.cos(a)))


def barrier_F0_factored(fn, k) -> complex:
    """Same value written around the singularity condition ``e^{-2i fn k} = r^2``."""
    fn = complex(fn)
    if abs(fn) < FN_MIN:
        raise RefractiveRootVanishes(f"|fn| = {abs(fn):.3g} below {FN_MIN}")
    a = fn * k
    r = (fn - 1) / (fn + 1)
    return complex(-0.5j * k * (fn + 1) ** 2 / fn * np.exp(1j * a) * (np.exp(-2j * a) - r * r))


def ss_residual(fn, k) -> complex:
    """``e^{-2i fn k} - ((fn - 1)/(fn + 1))^2``; zero at a barrier singularity."""
    fn = complex(fn)
    return complex(np.exp(-2j * fn * k) - ((fn - 1) / (fn + 1)) ** 2)


def dF0(fn, k):
    """Partial derivatives ``(dF0/dfn, dF0/dk)``."""
    fn = complex(fn)
    a = fn * k
    s, c = np.sin(a), np.cos(a)
    p = fn + 1 / fn
    d_fn = -k * ((1 - 1 / fn**2) * s + p * k * c - 2j * k * s)
    d_k = -(p * s + 2j * c) - k * (p * fn * c - 2j * fn * s)
    return complex(d_fn), complex(d_k)


def barrier_xi(fn, k, x):
    """``phi1(x) phi1(1 - x)`` for the barrier basis."""
    fn = complex(fn)
    a = fn * k
    x = np.asarray(x, dtype=float)
    return 0.5 * ((1 + fn**-2) * np.cos(a) - 2j * np.sin(a) / fn
                  + (1 - fn**-2) * np.cos(a * (2 * x - 1)))


def mode_parity(fn, k) -> int:
    """Sign ``s`` with ``e^{-i fn k} = s (fn - 1)/(fn + 1)`` at a singularity."""
    fn = complex(fn)
    ratio = np.exp(-1j * fn * k) * (fn + 1) / (fn - 1)
    return 1 if ratio.real >= 0 else -1


def barrier_xi_at_ss(fn0, k0, x):
    """``xi`` simplified with the singularity condition.

    Even modes give ``(1 - 1/fn^2) cos^2[fn k (x - 1/2)]``; odd modes give
    ``-(1 - 1/fn^2) sin^2[fn k (x - 1/2)]``.
    """
    fn0 = complex(fn0)
    s = mode_parity(fn0, k0)
    x = np.asarray(x, dtype=float)
    return 0.5 * (1 - fn0**-2) * (s + np.cos(2 * fn0 * k0 * (x - 0.5)))


def barrier_F_ell(fn, k, f, ell: int, check: bool = True) -> complex:
    """Order-``ell`` barrier coefficient ``F_ell = Gamma_{1-}^(ell) / z2^ell`` for profile ``f``."""
    if ell < 1:
        raise ValidationError("order must be >= 1")
    basis = basis_from_root(fn, k)
    return jost_correction(basis, f, ell, 1, -1, check)


def _profile_moments(kind, nu, a):
    """``int f`` and ``int cos(a(2x - 1)) f`` over [0, 1] in closed form."""
    sa, ca = np.sin(a), np.cos(a)
    if kind is ProfileKind.SINGLE:
        em = np.exp(-nu)
        I0 = -(nu + np.expm1(-nu)) / nu**2
        Ic = ((nu * ca * (1 - em) + 2 * a * sa * (1 + em)) / (nu**2 + 4 * a * a) - sa / a) / nu
        return I0, Ic
    ch, sh = np.cosh(nu / 2), np.sinh(nu / 2)
    I0 = (2 * sh / nu - ch) / (nu**2 * ch)
    Ic = (2 * (2 * a * sa * ch + nu * ca * sh) / (4 * a * a + nu**2) - ch * sa / a) / (nu**2 * ch)
    return I0, Ic


def barrier_F1(fn, k, profile: GainProfile) -> complex:
    """``int_0^1 xi(fn, k, x) f(x) dx`` at any ``(fn, k)``.

    Built-in profiles use the elementary moments of ``f``; custom profiles and
    ``nu < MOMENT_NU`` go through quadrature, since the moments cancel like
    ``1/nu^2`` there.
    """
    fn = complex(fn)
    if profile.kind is ProfileKind.CUSTOM or profile.nu < MOMENT_NU:
        return barrier_F_ell(fn, k, profile, 1)
    a = fn * k
    I0, Ic = _profile_moments(profile.kind, profile.nu, a)
    C = (1 + fn**-2) * np.cos(a) - 2j * np.sin(a) / fn
    return complex(0.5 * (C * I0 + (1 - fn**-2) * Ic))


def F100_closed(fn0, k0, nu, pumping) -> complex:
    """First-order barrier coefficient at a barrier singularity ``(fn0, k0)``.

    Raises :class:`NotAtSingularity` if ``(fn0, k0)`` misses the singularity
    condition by more than ``1e-8``.
    """
    kind = ProfileKind(pumping)
    if kind is ProfileKind.CUSTOM:
        raise ValidationError("closed forms exist only for single and double pumping")
    if nu < 0:
        raise ValidationError("decay constant must be >= 0")
    res = abs(ss_residual(fn0, k0))
    if res > SS_TOL:
        raise NotAtSingularity(f"singularity residual {res:.3g} exceeds {SS_TOL}")
    return barrier_F1(fn0, k0, GainProfile(kind, nu))


def F100_reduced_form(fn0, k0, nu, pumping) -> complex:
    """An algebraically reduced form, kept for comparison only.

    It disagrees with direct quadrature of ``xi f`` and is not used by the
    solvers.
    """
    kind = ProfileKind(pumping)
    m = complex(fn0)
    k = float(k0)
    if kind is ProfileKind.SINGLE:
        num = (1 - 1 / m**2) * ((1 - np.exp(-nu)) * (4j + k * (1 + m**2)) - k * nu + 2j * nu**3
                                - 4 * k**3 * m**3 * (m**2 - 1) * (nu + np.exp(-nu) - 1))
        den = 2 * k**3 * m**4 * nu**2 * (4 * k**2 * m**2 + nu**2)
        return complex(num / den)
    num = (m - 1) * (m + 1) ** 2 * (-2 + m**2 * (nu - 2) - m * nu)
    den = 2 * k**2 * m**7 * nu * (4 * k**2 * m**2 + nu**2)
    return complex(num / den)


def profile_callable(kind, nu):
    """Vectorised ``x -> f(x)`` for a built-in pumping profile."""
    return lambda x: pumping_profile(kind, nu, x)
