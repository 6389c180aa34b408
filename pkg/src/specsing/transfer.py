"""Transfer matrices of regular potentials by direct integration.

The two fundamental solutions fixed by ``phi1(0)=1, phi1'(0)=-ik`` and
``phi2(0)=1, phi2'(0)=0`` are integrated across [0, 1]; their boundary
values give the Jost functions ``Gamma_{j+-} = phi_j'(1) +- ik phi_j(1)``
and from those the 2x2 transfer matrix.  Spectral singularities are the
real zeros of ``M22`` (equivalently of ``Gamma_{1-}``).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _dop853
from .errors import DeltaNotPointwise, ZeroWaveNumber
from .potential import DeltaArray, breakpoints_of, evaluate_regular

DEFAULT_TOL = 1e-12
MIN_K = 1e-6


def check_wavenumber(k) -> float:
    k = float(k)
    if not np.isfinite(k) or abs(k) < MIN_K:
        raise ZeroWaveNumber(f"|k| must be >= {MIN_K}, got {k}")
    return k


@dataclass(frozen=True)
class FundamentalPair:
    phi1_at_1: complex
    dphi1_at_1: complex
    phi2_at_1: complex
    dphi2_at_1: complex
    k: float

    def wronskian(self) -> complex:
        return self.phi1_at_1 * self.dphi2_at_1 - self.phi2_at_1 * self.dphi1_at_1


@dataclass(frozen=True)
class JostQuad:
    gamma_1_plus: complex
    gamma_1_minus: complex
    gamma_2_plus: complex
    gamma_2_minus: complex


@dataclass(frozen=True)
class TransferMatrix:
    m11: complex
    m12: complex
    m21: complex
    m22: complex
    k: float

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=complex)

    @classmethod
    def from_array(cls, m, k) -> "TransferMatrix":
        m = np.asarray(m, dtype=complex)
        return cls(complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]), float(k))

    def det(self) -> complex:
        return self.m11 * self.m22 - self.m12 * self.m21

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array(), 2))

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix.from_array(self.as_array() @ other.as_array(), self.k)


def integrate_fundamental(spec, k, tol: float = DEFAULT_TOL) -> FundamentalPair:
    """Integrate ``-phi'' + v phi = k^2 phi`` for both fundamental solutions.

    Integration is split at the breakpoints of ``spec`` so no step straddles a
    jump of the potential.
    """
    if isinstance(spec, DeltaArray):
        raise DeltaNotPointwise("integrate a regularised delta array instead")
    k = check_wavenumber(k)
    k2 = k * k

    def q(x):
        return np.asarray(evaluate_regular(spec, x), dtype=complex) - k2

    y = np.array([1.0, -1j * k, 1.0, 0.0], dtype=complex)
    edges = (0.0, *breakpoints_of(spec), 1.0)
    for a, b in zip(edges[:-1], edges[1:]):
        y, _ = _dop853.integrate(q, y, a, b, rtol=tol, atol=tol)
    return FundamentalPair(complex(y[0]), complex(y[1]), complex(y[2]), complex(y[3]), k)


def jost_from_pair(pair: FundamentalPair) -> JostQuad:
    ik = 1j * pair.k
    return JostQuad(
        gamma_1_plus=pair.dphi1_at_1 + ik * pair.phi1_at_1,
        gamma_1_minus=pair.dphi1_at_1 - ik * pair.phi1_at_1,
        gamma_2_plus=pair.dphi2_at_1 + ik * pair.phi2_at_1,
        gamma_2_minus=pair.dphi2_at_1 - ik * pair.phi2_at_1,
    )


def assemble_transfer_matrix(j: JostQuad, k) -> TransferMatrix:
    k = check_wavenumber(k)
    em = np.exp(-1j * k)
    ep = np.exp(1j * k)
    c = 1.0 / (2j * k)
    return TransferMatrix(
        m11=-c * em * (j.gamma_1_plus - 2 * j.gamma_2_plus),
        m12=c * em * j.gamma_1_plus,
        m21=c * ep * (j.gamma_1_minus - 2 * j.gamma_2_minus),
        m22=-c * ep * j.gamma_1_minus,
        k=k,
    )


def transfer_matrix(spec, k, tol: float = DEFAULT_TOL) -> TransferMatrix:
    return assemble_transfer_matrix(jost_from_pair(integrate_fundamental(spec, k, tol)), k)


def m22(spec, k, tol: float = DEFAULT_TOL) -> complex:
    """``M22 = -e^{ik} Gamma_{1-} / (2ik)``; its real zeros are spectral singularities."""
    return transfer_matrix(spec, k, tol).m22


def gamma_1_minus(spec, k, tol: float = DEFAULT_TOL) -> complex:
    pair = integrate_fundamental(spec, k, tol)
    return pair.dphi1_at_1 - 1j * pair.k * pair.phi1_at_1
