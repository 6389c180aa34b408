"""Panelled Chebyshev-Lobatto quadrature with cumulative (indefinite) integrals.

Each panel carries ``n`` Chebyshev-Lobatto nodes.  The spectral integration
matrix maps samples at the nodes to the antiderivative (vanishing at the left
end) at the same nodes, so a running integral ``int_0^x`` is available at every
node without re-sampling.  This is what nested Volterra integrals need: each
level integrates the previous level's values in place.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as C

DEFAULT_NODES = 24


@functools.lru_cache(maxsize=16)
def _reference(n: int):
    """Nodes on [-1, 1], cumulative matrix and weights for ``n`` Lobatto points."""
    t = -np.cos(np.pi * np.arange(n) / (n - 1))
    V = C.chebvander(t, n - 1)
    Vinv = np.linalg.inv(V)
    # antiderivative of each Chebyshev mode, zero at t = -1
    I = np.zeros((n + 1, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        I[:, j] = C.chebint(e, lbnd=-1)
    S = C.chebvander(t, n) @ I @ Vinv
    w = S[-1].copy()
    t.setflags(write=False)
    S.setflags(write=False)
    w.setflags(write=False)
    return t, S, w


@dataclass(frozen=True)
class Panels:
    """A partition of ``[a, b]`` into Chebyshev panels.

    ``x`` has shape ``(P, n)``.  The end nodes sit one ulp inside their panel,
    so a jump placed on a panel edge is always sampled from the correct side.
    """

    edges: np.ndarray
    n: int

    @property
    def x(self) -> np.ndarray:
        t, _, _ = _reference(self.n)
        lo = self.edges[:-1, None]
        hi = self.edges[1:, None]
        x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t[None, :]
        x[:, 0] = np.nextafter(lo[:, 0], hi[:, 0])
        x[:, -1] = np.nextafter(hi[:, 0], lo[:, 0])
        return x

    @property
    def half_widths(self) -> np.ndarray:
        return 0.5 * np.diff(self.edges)

    def cumulative(self, values) -> np.ndarray:
        """``int_a^x values`` at every node; ``values`` has shape ``(P, n)``."""
        _, S, _ = _reference(self.n)
        local = (values @ S.T) * self.half_widths[:, None]
        offsets = np.concatenate([[0.0], np.cumsum(local[:-1, -1])])
        return local + offsets[:, None]

    def integral(self, values) -> complex:
        _, _, w = _reference(self.n)
        return complex(np.sum((values @ w) * self.half_widths))

    def refined(self) -> "Panels":
        """Same panels with twice the nodes (minus one, to stay Lobatto-nested)."""
        return Panels(self.edges, 2 * self.n - 1)


def make_panels(a: float, b: float, omega: float = 0.0, breakpoints=(), n: int = DEFAULT_NODES,
                per_panel_phase: float = math.pi) -> Panels:
    """Panels on ``[a, b]`` fine enough for integrands oscillating at rate ``omega``.

    Every segment between consecutive breakpoints is split into at least two
    panels and at most ``per_panel_phase`` radians of phase per panel.
    """
    cuts = [a, *sorted(p for p in breakpoints if a < p < b), b]
    edges = [a]
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi <= lo:
            continue
        m = max(2, math.ceil(abs(omega) * (hi - lo) / per_panel_phase))
        edges.extend(np.linspace(lo, hi, m + 1)[1:].tolist())
    if len(edges) == 1:
        edges.append(b)
    return Panels(np.asarray(edges, dtype=float), n)
