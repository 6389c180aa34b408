"""Exact transfer matrix of an array of complex delta functions.

For ``v(x) = sum_i z_i delta(x - a_i)`` the perturbation series in the
couplings terminates at order ``n``, which gives the entries of ``M`` as
finite sums over ordered index chains ``i_1 < ... < i_l``.  The chain sums
are accumulated by dynamic programming over the chain's last index, so
order ``l`` costs ``O(n^2)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import NoRootInRange, ValidationError
from .potential import DeltaArray, GenericRegular, validate
from .transfer import TransferMatrix, check_wavenumber

# |M22| below this (times max(1, ||M||)) counts as a spectral singularity
SINGULAR_THRESHOLD = 1e-8


def _chain_sums(z, a, k, sign, start):
    """``sum_l c^l sum_{i_1<...<i_l} start_{i_1} prod z prod [1 - e^{sign 2ik (a_{m+1}-a_m)}]``.

    Returns the per-order totals ``T_l`` for ``l = 1..n`` (without the
    ``(+-2ik)^{-l}`` prefactor).
    """
    n = z.size
    diff = a[None, :] - a[:, None]
    w = np.triu(1.0 - np.exp(sign * 2j * k * diff), 1)  # w[i, j], i < j
    s = z * start
    totals = [s.sum()]
    for _ in range(1, n):
        s = z * (s @ w)
        totals.append(s.sum())
    return np.array(totals)


def closed_form_matrix(spec: DeltaArray, k) -> TransferMatrix:
    """Exact transfer matrix of a delta array from the terminating chain sums."""
    validate(spec)
    k = check_wavenumber(k)
    z = np.asarray(spec.couplings, dtype=complex)
    a = np.asarray(spec.centers, dtype=float)
    ell = np.arange(1, spec.n + 1)
    down = (2j * k) ** (-ell.astype(float))
    up = (-2j * k) ** (-ell.astype(float))
    one = np.ones_like(z)
    m11 = 1.0 + np.sum(down * _chain_sums(z, a, k, -1, one))
    m12 = np.sum(down * _chain_sums(z, a, k, -1, np.exp(-2j * k * a)))
    m21 = np.sum(up * _chain_sums(z, a, k, +1, np.exp(2j * k * a)))
    m22 = 1.0 + np.sum(up * _chain_sums(z, a, k, +1, one))
    return TransferMatrix(complex(m11), complex(m12), complex(m21), complex(m22), k)


def single_delta_matrix(z, a, k) -> TransferMatrix:
    c = 1j * z / (2 * k)
    return TransferMatrix(
        1 - c, -c * np.exp(-2j * k * a), c * np.exp(2j * k * a), 1 + c, k
    )


def composition_oracle(spec: DeltaArray, k) -> TransferMatrix:
    """Ordered product ``M_n ... M_1`` of single-delta transfer matrices."""
    validate(spec)
    k = check_wavenumber(k)
    m = np.eye(2, dtype=complex)
    for a, z in zip(spec.centers, spec.couplings):
        m = single_delta_matrix(z, a, k).as_array() @ m
    return TransferMatrix.from_array(m, k)


@dataclass(frozen=True)
class ZCoefficient:
    ell: int
    j: int
    values: np.ndarray


def unperturbed_free(j: int, k, x):
    """Free fundamental solutions: ``e^{-ikx}`` (j=1) and ``cos(kx)`` (j=2)."""
    if j == 1:
        return np.exp(-1j * k * np.asarray(x))
    if j == 2:
        return np.cos(k * np.asarray(x)) + 0j
    raise ValueError("j must be 1 or 2")


def z_coefficients(spec: DeltaArray, k, ell: int, j: int) -> ZCoefficient:
    """Coefficients ``Z^(l)_{ji}`` of ``phi_j^(l)(x) = sum_i Z_i sin[k(x-a_i)] theta(x-a_i)``."""
    if ell < 1:
        raise ValidationError("order must be >= 1")
    validate(spec)
    k = check_wavenumber(k)
    z = np.asarray(spec.couplings, dtype=complex)
    a = np.asarray(spec.centers, dtype=float)
    n = spec.n
    if ell > n:
        return ZCoefficient(ell, j, np.zeros(n, dtype=complex))
    kern = np.triu(np.sin(k * (a[None, :] - a[:, None])), 1)  # [p, i] for p < i
    u = unperturbed_free(j, k, a)
    for _ in range(ell - 1):
        u = (u * z) @ kern
    return ZCoefficient(ell, j, k ** (-ell) * z * u)


def jost_terms_closed(spec: DeltaArray, k, ell: int, j: int, sign: int) -> complex:
    """Order-``l`` Jost coefficient ``Gamma^(l)_{j+-}`` of a delta array in closed form.

    ``l = 0`` gives the free values ``Gamma_{1+} = 0``, ``Gamma_{1-} = -2ik e^{-ik}``,
    ``Gamma_{2+-} = +-ik e^{+-ik}``.
    """
    k = check_wavenumber(k)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if ell == 0:
        if j == 1:
            return 0j if sign > 0 else complex(-2j * k * np.exp(-1j * k))
        return complex(sign * 1j * k * np.exp(sign * 1j * k))
    validate(spec)
    if ell > spec.n:
        return 0j
    z = np.asarray(spec.couplings, dtype=complex)
    a = np.asarray(spec.centers, dtype=float)
    if j == 1:
        omega = np.exp(1j * k * (1 - 2 * a)) if sign > 0 else np.full(a.shape, np.exp(-1j * k))
    else:
        omega = 0.5 * (1 + np.exp(-sign * 2j * k * a)) * np.exp(sign * 1j * k)
    totals = _chain_sums(z, a, k, -sign, omega)
    return complex((sign / (2j * k)) ** (ell - 1) * totals[ell - 1])


class Strategy(str, enum.Enum):
    SCAN_FIXED_COUPLINGS = "scan"
    SOLVE_ONE_COUPLING = "solve"


@dataclass(frozen=True)
class DeltaRoot:
    """A spectral singularity of a delta array: ``M22(k) = 0`` at real ``k``."""

    k: float
    spec: DeltaArray
    residual: float
    coupling_index: int | None = None


def m22_closed(spec: DeltaArray, k) -> complex:
    return closed_form_matrix(spec, k).m22


def solve_coupling(spec: DeltaArray, k, index: int) -> complex:
    """Value of coupling ``index`` that makes ``M22(k) = 0``.

    ``M22`` is affine in each single coupling, so two evaluations determine it.
    """
    m0 = m22_closed(spec.with_coupling(index, 0.0), k)
    m1 = m22_closed(spec.with_coupling(index, 1.0), k)
    slope = m1 - m0
    if abs(slope) < 1e-300:
        raise NoRootInRange(f"M22 does not depend on coupling {index} at k={k}")
    return -m0 / slope


def _polish(spec, k0, lo, hi):
    """Gauss-Newton on ``|M22(k)|^2`` with a bounded fallback."""
    k = k0
    for _ in range(60):
        h = 1e-6 * max(1.0, abs(k))
        f = m22_closed(spec, k)
        df = (m22_closed(spec, k + h) - m22_closed(spec, k - h)) / (2 * h)
        if df == 0:
            break
        step = (np.conj(df) * f).real / abs(df) ** 2
        k_new = min(max(k - step, lo), hi)
        if abs(k_new - k) < 1e-15 * max(1.0, abs(k)):
            k = k_new
            break
        k = k_new
    res = minimize_scalar(lambda t: abs(m22_closed(spec, t)), bracket=None,
                          bounds=(max(lo, k - 1e-6), min(hi, k + 1e-6)), method="bounded",
                          options={"xatol": 1e-15})
    if abs(m22_closed(spec, res.x)) < abs(m22_closed(spec, k)):
        k = float(res.x)
    return float(k)


def find_singularities_delta(spec: DeltaArray, k_range, strategy=Strategy.SCAN_FIXED_COUPLINGS,
                             n_grid: int = 2001, coupling_index: int = 0,
                             threshold: float = SINGULAR_THRESHOLD) -> list[DeltaRoot]:
    """Spectral singularities of a delta array in ``[k_min, k_max]``.

    ``scan``: real ``k`` where ``|M22|`` has a local minimum that polishes to
    zero.  ``solve``: for every grid ``k``, the value of coupling
    ``coupling_index`` that puts a singularity exactly there.
    """
    strategy = Strategy(strategy)
    validate(spec)
    k_min, k_max = map(float, k_range)
    if not (0 < k_min < k_max):
        raise ValidationError(f"need 0 < k_min < k_max, got {k_range}")
    ks = np.linspace(k_min, k_max, n_grid)
    if strategy is Strategy.SOLVE_ONE_COUPLING:
        out = []
        for k in ks:
            z = solve_coupling(spec, k, coupling_index)
            s = spec.with_coupling(coupling_index, z)
            out.append(DeltaRoot(float(k), s, abs(m22_closed(s, k)), coupling_index))
        return out
    mags = np.array([abs(m22_closed(spec, k)) for k in ks])
    idx = [i for i in range(n_grid)
           if (i == 0 or mags[i] <= mags[i - 1]) and (i == n_grid - 1 or mags[i] <= mags[i + 1])]
    roots: list[DeltaRoot] = []
    for i in idx:
        lo = ks[max(i - 1, 0)]
        hi = ks[min(i + 1, n_grid - 1)]
        k = _polish(spec, ks[i], lo, hi)
        m = closed_form_matrix(spec, k)
        r = abs(m.m22)
        if r < threshold * max(1.0, m.norm()):
            if not roots or abs(roots[-1].k - k) > 1e-9 * max(1.0, k):
                roots.append(DeltaRoot(k, spec, r))
    return roots


def regularized_potential(spec: DeltaArray, width: float) -> GenericRegular:
    """Rectangles of width ``width`` and height ``z_i/width`` centred on each ``a_i``."""
    a = np.asarray(spec.centers, dtype=float)
    z = np.asarray(spec.couplings, dtype=complex)
    half = width / 2.0
    if np.any(a - half <= 0) or np.any(a + half >= 1) or np.any(np.diff(a) <= width):
        raise ValidationError("rectangles overlap or leave the unit interval")
    lo = a - half
    hi = a + half

    def v(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for l, h, zz in zip(lo, hi, z):
            out += np.where((x >= l) & (x < h), zz / width, 0.0)
        return out

    bps = tuple(sorted(np.concatenate([lo, hi]).tolist()))
    return GenericRegular(v, breakpoints=bps)


def regularized_oracle(spec: DeltaArray, k, levels: int = 5, w0: float | None = None,
                       tol: float = 1e-12) -> TransferMatrix:
    """ODE transfer matrix of rectangle-regularised deltas, extrapolated to zero width.

    Widths ``w0, w0/2, ...`` feed a full Richardson tableau with error orders
    ``1, 2, 3, ...`` in ``w``.
    """
    from .transfer import transfer_matrix

    a = np.asarray(spec.centers, dtype=float)
    if w0 is None:
        room = min(a[0], 1 - a[-1], *(np.diff(a) / 2 if a.size > 1 else [1.0]))
        w0 = min(0.02, 0.9 * room)
    rows = [transfer_matrix(regularized_potential(spec, w0 / 2**i), k, tol).as_array()
            for i in range(levels)]
    for p in range(1, levels):
        rows = [(2**p * rows[i + 1] - rows[i]) / (2**p - 1) for i in range(len(rows) - 1)]
    return TransferMatrix.from_array(rows[0], k)
