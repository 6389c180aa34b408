"""Block-adaptive Dormand-Prince 8(5,3) integrator for ``phi'' = q(x) phi``.

The potential is sampled in vectorised blocks: for a trial step ``h`` the
abscissae of ``BLOCK`` consecutive steps are known in advance, so ``q`` is
evaluated once per block and the stepping itself runs in a compiled kernel.
Every step carries the usual embedded error estimate; the first rejected step
truncates the block and shrinks ``h``.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit
from scipy.integrate._ivp.dop853_coefficients import A as _A
from scipy.integrate._ivp.dop853_coefficients import B as _B
from scipy.integrate._ivp.dop853_coefficients import C as _C
from scipy.integrate._ivp.dop853_coefficients import E3 as _E3
from scipy.integrate._ivp.dop853_coefficients import E5 as _E5
from scipy.integrate._ivp.dop853_coefficients import N_STAGES

from .errors import StepSizeUnderflow

A = np.ascontiguousarray(_A[:N_STAGES, :N_STAGES], dtype=float)
B = np.ascontiguousarray(_B, dtype=float)
E3 = np.ascontiguousarray(_E3, dtype=float)
E5 = np.ascontiguousarray(_E5, dtype=float)
# stage abscissae plus the end point used by the error estimate
NODES = np.append(_C[:N_STAGES], 1.0)

BLOCK = 64
SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 6.0
ERR_EXP = -1.0 / 8.0


@njit(cache=True, nogil=True)
def _rhs(q, y, out):
    for i in range(0, y.size, 2):
        out[i] = y[i + 1]
        out[i + 1] = q * y[i]


@njit(cache=True, nogil=True)
def _run_block(y, h, q, A, B, E3, E5, rtol, atol):
    """Advance ``y`` in place through ``q.shape[0]`` steps of size ``h``.

    Returns ``(n_accepted, max_err, failed_err)``; ``failed_err`` is zero when
    every step was accepted.
    """
    n = y.size
    ns = B.size
    K = np.empty((ns + 1, n), dtype=np.complex128)
    ytmp = np.empty(n, dtype=np.complex128)
    ynew = np.empty(n, dtype=np.complex128)
    max_err = 0.0
    for step in range(q.shape[0]):
        _rhs(q[step, 0], y, K[0])
        for s in range(1, ns):
            for i in range(n):
                acc = 0j
                for j in range(s):
                    acc += A[s, j] * K[j, i]
                ytmp[i] = y[i] + h * acc
            _rhs(q[step, s], ytmp, K[s])
        for i in range(n):
            acc = 0j
            for j in range(ns):
                acc += B[j] * K[j, i]
            ynew[i] = y[i] + h * acc
        _rhs(q[step, ns], ynew, K[ns])
        e5 = 0.0
        e3 = 0.0
        for i in range(n):
            sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
            a5 = 0j
            a3 = 0j
            for j in range(ns + 1):
                a5 += E5[j] * K[j, i]
                a3 += E3[j] * K[j, i]
            e5 += abs(a5 / sc) ** 2
            e3 += abs(a3 / sc) ** 2
        if e5 == 0.0 and e3 == 0.0:
            err = 0.0
        else:
            err = abs(h) * e5 / math.sqrt((e5 + 0.01 * e3) * n)
        if err > 1.0:
            return step, max_err, err
        if err > max_err:
            max_err = err
        for i in range(n):
            y[i] = ynew[i]
    return q.shape[0], max_err, 0.0


def integrate(qfunc, y0, a: float, b: float, rtol: float, atol: float, h0: float | None = None):
    """Integrate ``phi'' = q(x) phi`` for interleaved ``(phi, phi')`` pairs on ``[a, b]``.

    ``qfunc`` must accept an array of abscissae and return complex values of
    the same shape.  Returns ``(y(b), n_steps)``.
    """
    y = np.array(y0, dtype=np.complex128)
    length = b - a
    if length <= 0:
        return y, 0
    if h0 is None:
        probe = np.linspace(a, b, 9)
        omega = math.sqrt(float(np.max(np.abs(qfunc(probe))))) + 1.0
        h0 = 0.5 / omega
    h = min(h0, length)
    h_min = 1e-14 * max(1.0, abs(a), abs(b))
    b_in = np.nextafter(b, a)
    x = a
    steps = 0
    while True:
        remaining = b - x
        if remaining <= h_min:
            break
        nblk = BLOCK
        last = nblk * h >= remaining
        if last:
            nblk = max(1, math.ceil(remaining / h - 1e-12))
            h = remaining / nblk
        xs = x + h * (np.arange(nblk)[:, None] + NODES[None, :])
        # stages stay strictly left of b, where a jump in q may sit
        np.minimum(xs, b_in, out=xs)
        q = np.ascontiguousarray(np.broadcast_to(qfunc(xs), xs.shape), dtype=np.complex128)
        nacc, max_err, failed = _run_block(y, h, q, A, B, E3, E5, rtol, atol)
        steps += nacc
        if nacc == nblk:
            if last:
                break
            x = x + nacc * h
            factor = MAX_FACTOR if max_err == 0.0 else min(MAX_FACTOR, SAFETY * max_err**ERR_EXP)
            h *= max(1.0, factor)
        else:
            x = x + nacc * h
            h *= max(MIN_FACTOR, SAFETY * failed**ERR_EXP)
        if h < h_min:
            raise StepSizeUnderflow(f"step size underflow at x={x:.6g}")
    return y, steps
