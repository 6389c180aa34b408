"""Inhomogeneously pumped gain slab mapped onto the unit interval.

A slab of thickness ``L`` occupies ``-L/2 <= z <= L/2``; with ``x = z/L + 1/2``
and ``k = 2 pi L / lambda`` the TE wave equation becomes the Schrodinger
problem on [0, 1] with potential ``k^2 [1 - n^2(x)]``.  The medium is a
two-level dispersive host,

    n^2 = n0^2 - gamma n0 lambda0 g(x) zeta / (2 pi),
    zeta = 1 / (1 - w^2 - i gamma w),   w = lambda0 / lambda,

whose gain coefficient decays away from the pumped face(s).  The split
``v = z1 + eps z2 f(x)`` isolates a constant barrier (the homogeneous slab)
from the inhomogeneity.

Interface units: wavelengths in nm, thickness in um, gains in 1/cm.
Internally every length is in nm.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import OutsideSlab, RefractiveRootVanishes, ValidationError
from .perturbation import FN_MIN
from .potential import Barrier, GainProfile, GenericRegular, ProfileKind

NM_PER_UM = 1e3
PER_NM_PER_CM = 1e-7  # 1/cm expressed in 1/nm


@dataclass(frozen=True)
class SlabMedium:
    n0: float = 3.4
    L_um: float = 300.0
    lambda0_nm: float = 1500.0
    gamma_hat: float = 0.02
    alpha_per_cm: float = 200.0
    nu: float = 0.0
    pumping: ProfileKind = ProfileKind.SINGLE

    def __post_init__(self):
        object.__setattr__(self, "pumping", ProfileKind(self.pumping))
        if self.pumping is ProfileKind.CUSTOM:
            raise ValidationError("a slab is pumped from one side or from both")
        if not self.n0 > 1:
            raise ValidationError(f"n0 must exceed 1, got {self.n0}")
        for name in ("L_um", "lambda0_nm", "alpha_per_cm"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValidationError(f"{name} must be positive, got {v}")
        if not 0 < self.gamma_hat < 1:
            raise ValidationError(f"gamma_hat must lie in (0, 1), got {self.gamma_hat}")
        if not (self.nu >= 0 and math.isfinite(self.nu)):
            raise ValidationError(f"nu must be >= 0, got {self.nu}")

    @property
    def L_nm(self) -> float:
        return self.L_um * NM_PER_UM

    @property
    def alpha_nm(self) -> float:
        return self.alpha_per_cm * PER_NM_PER_CM

    def replace(self, **changes) -> "SlabMedium":
        return dataclasses.replace(self, **changes)


REFERENCE_MEDIUM = SlabMedium()


@dataclass(frozen=True)
class DispersionPoint:
    lambda_nm: float
    g0_per_cm: float
    zeta: complex
    fn: complex
    zeta1: complex
    zeta2: complex
    eps: float
    omega_hat: float
    k: float


def lorentz_factor(medium: SlabMedium, lambda_nm):
    w = medium.lambda0_nm / np.asarray(lambda_nm, dtype=float)
    return 1.0 / (1.0 - w * w - 1j * medium.gamma_hat * w)


def refractive_index_sq(medium: SlabMedium, lambda_nm, g_per_cm):
    """Complex ``n^2`` of the pumped host at wavelength ``lambda`` and local gain ``g``."""
    zeta = lorentz_factor(medium, lambda_nm)
    g = np.asarray(g_per_cm, dtype=float) * PER_NM_PER_CM
    return medium.n0**2 - medium.gamma_hat * medium.n0 * medium.lambda0_nm * g * zeta / (2 * np.pi)


def gain_profile_x(medium: SlabMedium, g0_per_cm, x):
    """Gain coefficient (1/cm) at reduced position ``x = z/L + 1/2``."""
    x = np.asarray(x, dtype=float)
    nu = medium.nu
    a = medium.alpha_per_cm
    if medium.pumping is ProfileKind.SINGLE:
        return (g0_per_cm + a) * np.exp(-nu * x) - a
    return (g0_per_cm + a) / math.cosh(nu / 2) * np.cosh(nu * (x - 0.5)) - a


def gain_profile_z(medium: SlabMedium, g0_per_cm, z_um):
    """Gain coefficient (1/cm) at depth ``z`` (um) measured from the slab centre."""
    z = np.asarray(z_um, dtype=float)
    half = medium.L_um / 2
    if np.any(np.abs(z) > half * (1 + 1e-12)):
        raise OutsideSlab(f"|z| must not exceed L/2 = {half} um")
    out = gain_profile_x(medium, g0_per_cm, z / medium.L_um + 0.5)
    return out if out.ndim else float(out)


def wavenumber(medium: SlabMedium, lambda_nm) -> float:
    return 2 * np.pi * medium.L_nm / lambda_nm


def perturbation_strength(medium: SlabMedium) -> float:
    """``eps``: linear in ``nu`` for single pumping, quadratic for double."""
    p = medium.nu if medium.pumping is ProfileKind.SINGLE else medium.nu**2
    return medium.L_nm**2 * medium.alpha_nm * medium.gamma_hat * medium.n0 * p / medium.lambda0_nm


def map_parameters(medium: SlabMedium, lambda_nm, g0_per_cm) -> DispersionPoint:
    """Barrier parameters ``(z1, z2, eps)`` of the slab at ``(lambda, g0)``."""
    lam = float(lambda_nm)
    if not lam > 0:
        raise ValidationError(f"wavelength must be positive, got {lam}")
    g0 = float(g0_per_cm)
    w = medium.lambda0_nm / lam
    zeta = complex(lorentz_factor(medium, lam))
    g0_nm = g0 * PER_NM_PER_CM
    c = medium.gamma_hat * medium.n0 * medium.lambda0_nm * zeta / (2 * np.pi)
    zeta1 = (2 * np.pi * medium.L_nm * w / medium.lambda0_nm) ** 2 * (1 - medium.n0**2 + c * g0_nm)
    zeta2 = 2 * np.pi * w * w * (g0_nm / medium.alpha_nm + 1) * zeta
    fn = _fn(medium.n0**2 - c * g0_nm)
    return DispersionPoint(lam, g0, zeta, fn, complex(zeta1), complex(zeta2),
                           perturbation_strength(medium), w, wavenumber(medium, lam))


def _fn(n_sq) -> complex:
    fn = complex(np.sqrt(complex(n_sq)))
    if fn.real == 0.0 and fn.imag < 0.0:
        fn = -fn
    if abs(fn) < FN_MIN:
        raise RefractiveRootVanishes("refractive index vanishes")
    return fn


def fn_and_derivatives(medium: SlabMedium, lambda_nm, g0_per_cm):
    """``(fn, dfn/dlambda [1/nm], dfn/dg0 [cm])`` of the homogeneous part."""
    lam = float(lambda_nm)
    l0 = medium.lambda0_nm
    gh = medium.gamma_hat
    g = float(g0_per_cm) * PER_NM_PER_CM
    fn = _fn(refractive_index_sq(medium, lam, g0_per_cm))
    D = lam * lam - 1j * gh * l0 * lam - l0 * l0
    fn10 = gh * medium.n0 * l0**2 * lam * (2 * l0 + 1j * gh * lam) * g / (4 * np.pi * fn * D * D)
    fn01 = -gh * medium.n0 * l0 * lam**2 / (4 * np.pi * fn * D) * PER_NM_PER_CM
    return fn, complex(fn10), complex(fn01)


def build_potential(medium: SlabMedium, lambda_nm, g0_per_cm) -> GenericRegular:
    """Exact mapped potential ``x -> k^2 [1 - n^2(lambda, g(x))]`` on [0, 1]."""
    lam = float(lambda_nm)
    k2 = wavenumber(medium, lam) ** 2
    zeta = complex(lorentz_factor(medium, lam))
    c = medium.gamma_hat * medium.n0 * medium.lambda0_nm * zeta / (2 * np.pi) * PER_NM_PER_CM
    base = k2 * (1 - medium.n0**2)
    g0 = float(g0_per_cm)

    def v(x):
        return base + k2 * c * gain_profile_x(medium, g0, x)

    return GenericRegular(v)


def barrier_spec(medium: SlabMedium, lambda_nm, g0_per_cm) -> Barrier:
    """The same potential written as ``z1 + eps z2 f(x)``."""
    p = map_parameters(medium, lambda_nm, g0_per_cm)
    return Barrier(p.zeta1, p.zeta2, p.eps, GainProfile(medium.pumping, medium.nu))


def table1_pipeline(medium: SlabMedium, modes, nus, pumpings=(ProfileKind.SINGLE, ProfileKind.DOUBLE),
                    residuals: bool = True, workers: int = 1):
    """First-order threshold points for every (mode, nu, pumping) cell.

    Rows come back ordered by mode, then ``nu``, then pumping, whatever the
    number of worker threads.
    """
    from .singularity import first_order_singularity, solve_unperturbed

    roots = {m: solve_unperturbed(medium, m) for m in sorted(modes)}
    cells = [(m, nu, ProfileKind(p)) for m in sorted(modes) for nu in sorted(nus) for p in pumpings]

    def run(cell):
        m, nu, p = cell
        return first_order_singularity(medium.replace(nu=nu, pumping=p), m, root=roots[m],
                                       residual=residuals)

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(run, cells))
    return [run(c) for c in cells]
