"""Potential families on the unit interval and the pumping profiles.

Three variants are supported:

* :class:`DeltaArray` -- ``sum_i z_i delta(x - a_i)`` with ``0 < a_1 < ... < a_n < 1``;
* :class:`Barrier` -- ``z1 + eps * z2 * f(x)`` where ``f`` is a :class:`GainProfile`;
* :class:`GenericRegular` -- any piecewise continuous callable on ``[0, 1]``.

Delta arrays are symbolic only: they have no pointwise value.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import (
    CenterOutOfRange,
    DeltaNotPointwise,
    EmptyArray,
    NonIntegrableProfile,
    UnorderedCenters,
    ValidationError,
)

# below this decay constant the closed forms are replaced by their Taylor series
SERIES_NU = 1e-4


class ProfileKind(str, enum.Enum):
    SINGLE = "single"
    DOUBLE = "double"
    CUSTOM = "custom"


def _single(nu, x):
    x = np.asarray(x, dtype=float)
    if nu < SERIES_NU:
        # (e^{-nu x} - 1)/nu = -x + nu x^2/2 - nu^2 x^3/6 + nu^3 x^4/24 - ...
        t = nu * x
        return -x * (1.0 - t / 2.0 + t * t / 6.0 - t**3 / 24.0 + t**4 / 120.0)
    return np.expm1(-nu * x) / nu


def _sinhc(t):
    # sinh(t)/t, accurate for small |t|
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < 1e-3
    safe = np.where(small, 1.0, t)
    t2 = t * t
    return np.where(small, 1.0 + t2 / 6.0 + t2 * t2 / 120.0, np.sinh(safe) / safe)


def _double(nu, x):
    x = np.asarray(x, dtype=float)
    if nu < SERIES_NU:
        # limit (x^2 - x)/2 with the first correction in nu^2
        u2 = (x - 0.5) ** 2
        c2 = (u2 * u2 - 1.0 / 16.0) / 24.0 - (u2 - 0.25) / 16.0
        return (x * x - x) / 2.0 + nu * nu * c2
    # cosh(A) - cosh(B) = 2 sinh((A+B)/2) sinh((A-B)/2) avoids the cancellation
    a = nu * x / 2.0
    b = nu * (x - 1.0) / 2.0
    return 2.0 * a * b * _sinhc(a) * _sinhc(b) / (nu * nu * math.cosh(nu / 2.0))


def pumping_profile(kind, nu: float, x):
    """Normalised gain-deficit profile ``f(x)`` of a pumped slab.

    ``single``: ``(exp(-nu x) - 1)/nu``;
    ``double``: ``(cosh(nu (x - 1/2)) - cosh(nu/2)) / (nu^2 cosh(nu/2))``.
    At ``nu = 0`` the limits ``-x`` and ``(x^2 - x)/2`` are returned.
    """
    kind = ProfileKind(kind)
    if nu < 0:
        raise ValidationError(f"decay constant must be >= 0, got {nu}")
    if kind is ProfileKind.SINGLE:
        out = _single(nu, x)
    elif kind is ProfileKind.DOUBLE:
        out = _double(nu, x)
    else:
        raise ValidationError("custom profiles are evaluated through GainProfile")
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class GainProfile:
    """Shape function ``f`` of the barrier perturbation.

    Custom profiles carry their own callable plus a smoothness class
    (``"analytic"`` or ``"piecewise"``); piecewise profiles list their jumps
    in ``breakpoints`` so that quadrature and ODE panels never straddle one.
    """

    kind: ProfileKind = ProfileKind.SINGLE
    nu: float = 0.0
    custom_f: Callable | None = field(default=None, compare=False)
    smoothness: str = "analytic"
    breakpoints: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", ProfileKind(self.kind))

    def __call__(self, x):
        if self.kind is ProfileKind.CUSTOM:
            return _call_vectorized(self.custom_f, x)
        return pumping_profile(self.kind, self.nu, x)


@dataclass(frozen=True)
class DeltaArray:
    centers: tuple
    couplings: tuple

    def __post_init__(self):
        object.__setattr__(self, "centers", tuple(float(a) for a in self.centers))
        object.__setattr__(self, "couplings", tuple(complex(z) for z in self.couplings))

    @property
    def n(self) -> int:
        return len(self.centers)

    def with_coupling(self, index: int, value) -> "DeltaArray":
        zs = list(self.couplings)
        zs[index] = complex(value)
        return DeltaArray(self.centers, tuple(zs))


@dataclass(frozen=True)
class Barrier:
    """Constant complex barrier ``z1`` perturbed by ``eps * z2 * f(x)``."""

    z1: complex
    z2: complex = 0j
    eps: float = 0.0
    profile: GainProfile = GainProfile()

    def __post_init__(self):
        object.__setattr__(self, "z1", complex(self.z1))
        object.__setattr__(self, "z2", complex(self.z2))
        object.__setattr__(self, "eps", float(self.eps))

    @property
    def breakpoints(self) -> tuple:
        return tuple(self.profile.breakpoints)


@dataclass(frozen=True)
class GenericRegular:
    """Arbitrary piecewise continuous potential ``x -> v(x)`` on [0, 1]."""

    func: Callable = field(compare=False)
    breakpoints: tuple = ()


PotentialSpec = Union[DeltaArray, Barrier, GenericRegular]


def _call_vectorized(func, x):
    xa = np.asarray(x, dtype=float)
    try:
        out = np.asarray(func(xa))
        if out.shape != xa.shape:
            out = np.broadcast_to(out, xa.shape)
    except (TypeError, ValueError):
        out = np.vectorize(func, otypes=[complex])(xa)
    return out if xa.ndim else out[()]


def evaluate_regular(spec: PotentialSpec, x):
    """Pointwise value ``v0(x) + eps v1(x)`` of a regular potential (vectorised)."""
    if isinstance(spec, DeltaArray):
        raise DeltaNotPointwise("delta arrays have no pointwise value")
    if isinstance(spec, Barrier):
        if spec.eps == 0.0 or spec.z2 == 0:
            return np.full(np.shape(x), spec.z1) if np.ndim(x) else spec.z1
        return spec.z1 + spec.eps * spec.z2 * spec.profile(x)
    if isinstance(spec, GenericRegular):
        return _call_vectorized(spec.func, x)
    raise TypeError(f"not a potential spec: {spec!r}")


def breakpoints_of(spec: PotentialSpec) -> tuple:
    bps = getattr(spec, "breakpoints", ())
    return tuple(sorted(float(b) for b in bps if 0.0 < b < 1.0))


def profile_l1_norm(profile: GainProfile, n: int = 2001) -> float:
    x = np.linspace(0.0, 1.0, n)
    y = np.abs(np.asarray(profile(x), dtype=complex))
    trap = getattr(np, "trapezoid", None) or np.trapz
    return float(trap(y, x))


def validate(spec: PotentialSpec) -> PotentialSpec:
    """Check the typed invariants of ``spec``; return it unchanged on success."""
    if isinstance(spec, DeltaArray):
        if spec.n == 0:
            raise EmptyArray("a delta array needs at least one center")
        if len(spec.couplings) != spec.n:
            raise ValidationError("centers and couplings differ in length")
        a = np.asarray(spec.centers)
        if np.any(a <= 0.0) or np.any(a >= 1.0):
            raise CenterOutOfRange(f"centers must lie strictly inside (0, 1): {spec.centers}")
        if np.any(np.diff(a) <= 0.0):
            raise UnorderedCenters(f"centers must be strictly increasing: {spec.centers}")
        if not all(math.isfinite(z.real) and math.isfinite(z.imag) for z in spec.couplings):
            raise ValidationError("couplings must be finite")
        return spec
    if isinstance(spec, Barrier):
        if not (np.isfinite(spec.z1) and np.isfinite(spec.eps * spec.z2)):
            raise ValidationError("barrier parameters must be finite")
        prof = spec.profile
        if prof.kind is not ProfileKind.CUSTOM:
            if prof.nu < 0 or not math.isfinite(prof.nu):
                raise ValidationError(f"decay constant must be finite and >= 0, got {prof.nu}")
            return spec
        if prof.custom_f is None:
            raise NonIntegrableProfile("custom profile without a function")
        if prof.smoothness not in ("analytic", "piecewise"):
            raise ValidationError(f"unknown smoothness class {prof.smoothness!r}")
        norm = profile_l1_norm(prof)
        if not math.isfinite(norm):
            raise NonIntegrableProfile("custom profile is not integrable on [0, 1]")
        if norm > 1.0:
            warnings.warn(f"custom profile has L1 norm {norm:.4g} > 1", stacklevel=2)
        return spec
    if isinstance(spec, GenericRegular):
        if not callable(spec.func):
            raise ValidationError("GenericRegular needs a callable")
        return spec
    raise ValidationError(f"not a potential spec: {spec!r}")
