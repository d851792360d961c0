"""Mismatch landscape over the (t1, t2) lattice.

Each node (i, j) of the n x n lattice pairs observation i of the first series
with observation j of the second and carries a nonnegative mismatch cost.
Three cost modes are supported:

  comonotonic      |x_i - y_j|   (series move together)
  antimonotonic    |x_i + y_j|   (series mirror each other)
  mixed            min of the two, agnostic to the sign of the coupling

Anti-diagonal layers tau = i + j are the natural sweep order for the path
engines, so the landscape exposes per-layer cost vectors that are generated
on demand; the full n x n matrix is only materialized for small lattices.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import LatticeTooLargeError

# Above this size the full cost matrix is not kept; layers are generated
# inside sweeps (n = 4096 is 128 MB of float64, the last comfortable size).
MATERIALIZE_LIMIT = 4096


class DistanceMode:
    """Names for the three mismatch modes."""

    COMONOTONIC = "comonotonic"
    ANTIMONOTONIC = "antimonotonic"
    MIXED = "mixed"

    ALL = (COMONOTONIC, ANTIMONOTONIC, MIXED)

    # CLI spelling -> canonical name
    ALIASES = {
        "minus": COMONOTONIC,
        "plus": ANTIMONOTONIC,
        "mixed": MIXED,
        COMONOTONIC: COMONOTONIC,
        ANTIMONOTONIC: ANTIMONOTONIC,
        MIXED: MIXED,
    }

    @classmethod
    def canonical(cls, name):
        try:
            return cls.ALIASES[name]
        except KeyError:
            raise ValueError(
                f"unknown distance mode {name!r}; expected one of {sorted(cls.ALIASES)}"
            ) from None


def layer_bounds(n, tau):
    """Index range of lattice nodes on anti-diagonal tau.

    Returns (lo, hi) such that nodes (i, tau - i) for i in lo..hi inclusive
    are exactly the nodes of the layer. tau runs 0 .. 2n-2.
    """
    lo = max(0, tau - (n - 1))
    hi = min(tau, n - 1)
    return lo, hi


def layer_lags(n, tau):
    """Lag values x = j - i = tau - 2i for the nodes of layer tau, i ascending."""
    lo, hi = layer_bounds(n, tau)
    return tau - 2 * np.arange(lo, hi + 1, dtype=np.int64)


@dataclass
class EnergyLandscape:
    """Mismatch costs over the lattice, with on-demand layer access.

    eps holds the dense matrix when the lattice is small enough to keep it;
    otherwise it is None and entries are generated from the stored series.
    """

    x: np.ndarray
    y: np.ndarray
    mode: str
    eps: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.x = np.ascontiguousarray(self.x, dtype=np.float64)
        self.y = np.ascontiguousarray(self.y, dtype=np.float64)
        if self.x.shape != self.y.shape or self.x.ndim != 1:
            raise ValueError("landscape needs two 1-d series of equal length")
        self.mode = DistanceMode.canonical(self.mode)

    @property
    def n(self):
        return self.x.size

    @property
    def n_layers(self):
        return 2 * self.n - 1

    def _combine(self, xs, ys):
        if self.mode == DistanceMode.COMONOTONIC:
            return np.abs(xs - ys)
        if self.mode == DistanceMode.ANTIMONOTONIC:
            return np.abs(xs + ys)
        return np.minimum(np.abs(xs - ys), np.abs(xs + ys))

    def entry(self, i, j):
        """Cost at node (i, j)."""
        return float(self._combine(self.x[i], self.y[j]))

    def nodes(self, i, j):
        """Costs at arrays of node coordinates (vectorized entry)."""
        return self._combine(self.x[np.asarray(i)], self.y[np.asarray(j)])

    def row(self, i):
        """Costs of row i against every j."""
        if self.eps is not None:
            return self.eps[i]
        return self._combine(self.x[i], self.y)

    def layer(self, tau):
        """Costs on anti-diagonal tau, ordered by i ascending (lag descending)."""
        n = self.n
        lo, hi = layer_bounds(n, tau)
        # i = lo..hi pairs with j = tau-lo down to tau-hi
        ys = self.y[tau - hi : tau - lo + 1][::-1]
        return self._combine(self.x[lo : hi + 1], ys)

    def full_matrix(self):
        """Dense n x n cost matrix; refuses on lattices too large to hold."""
        if self.eps is not None:
            return self.eps
        if self.n > MATERIALIZE_LIMIT:
            raise LatticeTooLargeError(self.n, MATERIALIZE_LIMIT)
        return self._combine(self.x[:, None], self.y[None, :])

    def reflected(self):
        """Landscape of the time-reversed pair.

        Node (i, j) of the reflection costs the same as node (n-1-i, n-1-j)
        here, which lets a backward sweep run as a forward sweep.
        """
        return EnergyLandscape(self.x[::-1].copy(), self.y[::-1].copy(), self.mode)


def build_landscape(pair, mode=DistanceMode.COMONOTONIC, materialize=None):
    """Build the mismatch landscape for an aligned pair.

    pair may be an AlignedPair or any object with 1-d .x and .y arrays.
    materialize forces (True) or suppresses (False) keeping the dense matrix;
    by default it is kept for lattices up to MATERIALIZE_LIMIT.
    """
    l = EnergyLandscape(np.asarray(pair.x), np.asarray(pair.y), mode)
    if materialize is None:
        materialize = l.n <= MATERIALIZE_LIMIT
    if materialize:
        if l.n > MATERIALIZE_LIMIT:
            raise LatticeTooLargeError(l.n, MATERIALIZE_LIMIT)
        l.eps = l._combine(l.x[:, None], l.y[None, :])
    return l
