"""Zero-temperature limit: the single minimal-cost lattice path.

The path walks the (i, j) lattice from a start to an end corner using steps
(i+1, j), (i, j+1), (i+1, j+1), accumulating landscape costs. Dynamic
programming over anti-diagonal layers finds the minimum; on cost ties the
predecessor preference is diagonal, then the (i-1, j) step, then (i, j-1),
which keeps results deterministic.

Also provides the per-row argmin mapping (each observation of the first
series matched to its cheapest partner), the naive baseline that motivates
path methods: it is noise-brittle because neighboring rows are unconstrained.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidBoundaryError
from .landscape import layer_bounds

_DIAG, _UP, _LEFT, _SEED = 0, 1, 2, 3


def local_mapping(l):
    """Per-row argmin partner: mapping[i] = smallest j minimizing cost (i, j)."""
    if l.eps is not None:
        return np.argmin(l.eps, axis=1).astype(np.int64)
    out = np.empty(l.n, dtype=np.int64)
    for i in range(l.n):
        out[i] = int(np.argmin(l.row(i)))
    return out


@dataclass
class HardPath:
    """A minimal-cost lattice path.

    nodes is an (L, 2) array of (i, j) pairs, strictly nondecreasing in both
    coordinates, from start to end. mapping[i - start_i] is the last j the
    path assigns to row i. total_energy is the sum of landscape costs over
    the nodes, recomputed from the landscape (not the DP accumulator).
    """

    nodes: np.ndarray
    total_energy: float
    mapping: np.ndarray
    start: tuple
    end: tuple

    @property
    def taus(self):
        return self.nodes[:, 0] + self.nodes[:, 1]

    @property
    def lags(self):
        return self.nodes[:, 1] - self.nodes[:, 0]

    def lag_at_tau(self):
        """Dict layer -> lag for the layers the path visits."""
        return {int(t): int(x) for t, x in zip(self.taus, self.lags)}


def _aligned(prev, lo_prev, lo, width, shift):
    """Values of a previous layer at source index i - shift, aligned to the
    current layer's i = lo .. lo+width-1, +inf where the source is absent."""
    out = np.full(width, np.inf)
    if prev is None or prev.size == 0:
        return out
    hi_prev = lo_prev + prev.size - 1
    i_first = max(lo, lo_prev + shift)
    i_last = min(lo + width - 1, hi_prev + shift)
    if i_first > i_last:
        return out
    out[i_first - lo : i_last - lo + 1] = prev[i_first - shift - lo_prev : i_last - shift - lo_prev + 1]
    return out


def optimal_path(l, start=None, end=None):
    """Minimal-cost path between two lattice nodes (corners by default)."""
    n = l.n
    if start is None:
        start = (0, 0)
    if end is None:
        end = (n - 1, n - 1)
    si, sj = map(int, start)
    ei, ej = map(int, end)
    for i, j in ((si, sj), (ei, ej)):
        if not (0 <= i < n and 0 <= j < n):
            raise InvalidBoundaryError(f"node ({i}, {j}) outside the {n} x {n} lattice")
    if ei < si or ej < sj:
        raise InvalidBoundaryError(
            f"end ({ei}, {ej}) not reachable from start ({si}, {sj})"
        )

    tau0 = si + sj
    tau_end = ei + ej

    def bounds(tau):
        return max(si, tau - ej), min(ei, tau - sj)

    # Rolling two layers of costs plus per-layer backpointers for backtrack.
    codes = {}
    lows = {}
    prev1 = prev2 = None
    lo1 = lo2 = 0
    for tau in range(tau0, tau_end + 1):
        lo, hi = bounds(tau)
        width = hi - lo + 1
        eps = _layer_costs(l, tau, lo, hi)
        if tau == tau0:
            cur = eps.copy()
            code = np.full(width, _SEED, dtype=np.uint8)
        else:
            c_diag = _aligned(prev2, lo2, lo, width, 1)
            c_up = _aligned(prev1, lo1, lo, width, 1)
            c_left = _aligned(prev1, lo1, lo, width, 0)
            best = c_diag
            code = np.zeros(width, dtype=np.uint8)
            m = c_up < best
            best = np.where(m, c_up, best)
            code[m] = _UP
            m = c_left < best
            best = np.where(m, c_left, best)
            code[m] = _LEFT
            cur = eps + best
        codes[tau] = code
        lows[tau] = lo
        prev2, lo2 = prev1, lo1
        prev1, lo1 = cur, lo

    # Walk back from the end following stored predecessor codes.
    path = []
    tau, i = tau_end, ei
    while True:
        path.append((i, tau - i))
        c = codes[tau][i - lows[tau]]
        if c == _SEED:
            break
        if c == _DIAG:
            tau -= 2
            i -= 1
        elif c == _UP:
            tau -= 1
            i -= 1
        else:
            tau -= 1
    path.reverse()
    nodes = np.array(path, dtype=np.int64)
    total = float(np.sum(l.nodes(nodes[:, 0], nodes[:, 1])))

    mapping = np.empty(ei - si + 1, dtype=np.int64)
    for i, j in path:
        mapping[i - si] = j
    return HardPath(
        nodes=nodes,
        total_energy=total,
        mapping=mapping,
        start=(si, sj),
        end=(ei, ej),
    )


def _layer_costs(l, tau, lo, hi):
    """Landscape costs for layer tau restricted to i in [lo, hi]."""
    full = l.layer(tau)
    glo, _ = layer_bounds(l.n, tau)
    return full[lo - glo : hi - glo + 1]
