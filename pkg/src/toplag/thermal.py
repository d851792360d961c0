"""Finite-temperature path statistics over the mismatch lattice.

Every monotone lattice path (steps (i+1, j), (i, j+1), (i+1, j+1)) carries a
Boltzmann weight exp(-cost/T). A transfer-matrix sweep accumulates, layer by
layer along anti-diagonals tau = i + j, the total weight of all paths from a
seed node to each lattice node:

    G(node) = [G(i, j-1) + G(i-1, j) + G(i-1, j-1)] * exp(-eps(node)/T)

Weights shrink geometrically, so each layer is renormalized to a unit maximum
with the exact log of the scale kept per sweep; ratios and log partition
functions are reconstructed from the bookkeeping.

Per-layer lag distributions come in two flavors. Bridge mode conditions on
both a start and an end: the weight of passing through a node is
G_fwd * G_bwd * exp(+eps/T), where the positive factor undoes the node cost
counted by both sweeps. Forward mode uses the forward weights alone, i.e. a
distribution over growing-path endpoints.

The backward sweep is the forward sweep on the time-reversed pair, so one
sweep implementation serves both directions.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyLayerError,
    InvalidBoundaryError,
    LatticeTooLargeError,
)
from .landscape import MATERIALIZE_LIMIT, layer_bounds, layer_lags

FORWARD = "forward"
BACKWARD = "backward"


@dataclass(frozen=True)
class RotatedCoord:
    """Lattice node in sweep coordinates: layer tau = i + j, lag x = j - i."""

    tau: int
    x: int

    @classmethod
    def from_node(cls, i, j):
        return cls(tau=int(i) + int(j), x=int(j) - int(i))

    def to_node(self):
        if (self.tau + self.x) % 2:
            raise ValueError(f"(tau={self.tau}, x={self.x}) is not a lattice node")
        return ((self.tau - self.x) // 2, (self.tau + self.x) // 2)


def _accumulate(out, prev, lo_prev, lo, shift):
    """out[:, i-lo] += prev[:, i-shift-lo_prev] over the overlapping i."""
    if prev is None or prev.shape[1] == 0:
        return
    width = out.shape[1]
    hi_prev = lo_prev + prev.shape[1] - 1
    i_first = max(lo, lo_prev + shift)
    i_last = min(lo + width - 1, hi_prev + shift)
    if i_first > i_last:
        return
    out[:, i_first - lo : i_last - lo + 1] += prev[
        :, i_first - shift - lo_prev : i_last - shift - lo_prev + 1
    ]


class _StackedSweep:
    """Forward transfer-matrix sweeps for several seed nodes at once.

    Field f holds the path weights from seed f. Only the two most recent
    layers are retained: stored values are scaled so each field's layer
    maximum is 1, with true weights equal to stored * exp(logscale[f]).
    Layers are produced in order tau = 0, 1, ..., 2n-2 by step().
    """

    def __init__(self, l, seeds, temperature):
        if temperature <= 0:
            raise ValueError("temperature must be positive")
        self.l = l
        self.n = l.n
        self.T = float(temperature)
        self.n_fields = len(seeds)
        self.seed_by_tau = {}
        for f, (i, j) in enumerate(seeds):
            i, j = int(i), int(j)
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise InvalidBoundaryError(
                    f"seed ({i}, {j}) outside the {self.n} x {self.n} lattice"
                )
            self.seed_by_tau.setdefault(i + j, []).append((f, i))
        self.tau = -1
        self.s1 = None  # stored weights on layer tau, full layer extent
        self.lo1 = 0
        self.log1 = np.full(self.n_fields, -np.inf)
        self.s2 = None  # layer tau - 1
        self.lo2 = 0
        self.log2 = np.full(self.n_fields, -np.inf)

    def snapshot(self):
        return {
            "tau": self.tau,
            "s1": None if self.s1 is None else self.s1.copy(),
            "lo1": self.lo1,
            "log1": self.log1.copy(),
            "s2": None if self.s2 is None else self.s2.copy(),
            "lo2": self.lo2,
            "log2": self.log2.copy(),
        }

    def restore(self, snap):
        self.tau = snap["tau"]
        self.s1 = None if snap["s1"] is None else snap["s1"].copy()
        self.lo1 = snap["lo1"]
        self.log1 = snap["log1"].copy()
        self.s2 = None if snap["s2"] is None else snap["s2"].copy()
        self.lo2 = snap["lo2"]
        self.log2 = snap["log2"].copy()

    def step(self):
        """Produce the next layer; afterwards s1/log1/lo1 describe it."""
        tau = self.tau + 1
        if tau > 2 * self.n - 2:
            raise EmptyLayerError(tau)
        lo, hi = layer_bounds(self.n, tau)
        width = hi - lo + 1
        eps = self.l.layer(tau)
        emin = float(eps.min())
        w = np.exp((emin - eps) / self.T)  # in (0, 1]

        log_max = np.maximum(self.log1, self.log2)
        active = np.isfinite(log_max)
        f1 = np.zeros(self.n_fields)
        f2 = np.zeros(self.n_fields)
        if active.any():
            f1[active] = np.exp(self.log1[active] - log_max[active])
            f2[active] = np.exp(self.log2[active] - log_max[active])

        raw = np.zeros((self.n_fields, width))
        _accumulate(raw, self.s1, self.lo1, lo, 0)  # predecessor (i, j-1)
        _accumulate(raw, self.s1, self.lo1, lo, 1)  # predecessor (i-1, j)
        raw *= f1[:, None]
        if self.s2 is not None and self.s2.shape[1]:
            diag = np.zeros((self.n_fields, width))
            _accumulate(diag, self.s2, self.lo2, lo, 1)  # predecessor (i-1, j-1)
            diag *= f2[:, None]
            raw += diag
        raw *= w[None, :]

        # A field's whole mass at its seed layer is the seed's own weight.
        log_pre = np.where(active, log_max, 0.0) - emin / self.T
        for f, i_seed in self.seed_by_tau.get(tau, ()):
            if not lo <= i_seed <= hi:
                raise InvalidBoundaryError(
                    f"seed row {i_seed} not on layer {tau}"
                )
            raw[f, i_seed - lo] = w[i_seed - lo]

        peak = raw.max(axis=1)
        alive = peak > 0
        stored = np.zeros_like(raw)
        log_new = np.full(self.n_fields, -np.inf)
        if alive.any():
            stored[alive] = raw[alive] / peak[alive, None]
            log_new[alive] = log_pre[alive] + np.log(peak[alive])

        self.s2, self.lo2, self.log2 = self.s1, self.lo1, self.log1
        self.s1, self.lo1, self.log1 = stored, lo, log_new
        self.tau = tau


def _log_accumulate(out, prev, lo_prev, lo, shift):
    """out[i] = logaddexp(out[i], prev[i - shift]) on the overlapping rows."""
    hi_prev = lo_prev + prev.size - 1
    i_first = max(lo, lo_prev + shift)
    i_last = min(lo + out.size - 1, hi_prev + shift)
    if i_first > i_last:
        return
    dst = slice(i_first - lo, i_last - lo + 1)
    src = slice(i_first - shift - lo_prev, i_last - shift - lo_prev + 1)
    np.logaddexp(out[dst], prev[src], out=out[dst])


def _log_sweep(l, seed, temperature):
    """Single-seed forward recursion carried entirely in log weights.

    Yields (tau, log_row) for every layer. Rows before the seed layer and
    nodes outside the seed's cone are -inf. Log space gives the recursion
    unbounded dynamic range: near the cold limit, within-layer weight
    ratios overwhelm any linear double, scaled or not.
    """
    n = l.n
    T = float(temperature)
    si, sj = seed
    tau0 = si + sj
    prev1 = prev2 = None
    lo1 = lo2 = 0
    for tau in range(2 * n - 1):
        lo, hi = layer_bounds(n, tau)
        row = np.full(hi - lo + 1, -np.inf)
        if tau > tau0:
            _log_accumulate(row, prev1, lo1, lo, 0)  # predecessor (i, j-1)
            _log_accumulate(row, prev1, lo1, lo, 1)  # predecessor (i-1, j)
            if prev2 is not None:
                _log_accumulate(row, prev2, lo2, lo, 1)  # predecessor (i-1, j-1)
            row -= np.asarray(l.layer(tau), dtype=np.float64) / T
        elif tau == tau0:
            row[si - lo] = -float(l.entry(si, sj)) / T
        prev2, lo2 = prev1, lo1
        prev1, lo1 = row, lo
        yield tau, row


@dataclass
class WeightField:
    """Materialized path-weight field for one seed node.

    vecs[tau] holds per-node log weights over the full extent of layer tau,
    shifted so the layer maximum is 0 (None outside the field's layer
    range); the true log weight at a node is vecs[tau][k] + logscale[tau],
    and -inf marks nodes the seed cannot reach. Materialization is
    quadratic in n and is refused above the landscape's dense limit; the
    boundary-grid search streams sweeps instead and never builds these.
    """

    n: int
    temperature: float
    origin: tuple
    direction: str
    tau_min: int
    tau_max: int
    vecs: list
    logscale: np.ndarray

    def layer(self, tau):
        if not self.tau_min <= tau <= self.tau_max:
            raise EmptyLayerError(tau)
        return self.vecs[tau], float(self.logscale[tau])

    def node_log_weight(self, i, j):
        """log of the true path weight at node (i, j); -inf if unreachable."""
        tau = i + j
        vec, scale = self.layer(tau)
        lo, hi = layer_bounds(self.n, tau)
        if not lo <= i <= hi:
            raise EmptyLayerError(tau)
        return float(vec[i - lo] + scale)


def _check_node(n, node):
    i, j = int(node[0]), int(node[1])
    if not (0 <= i < n and 0 <= j < n):
        raise InvalidBoundaryError(f"node ({i}, {j}) outside the {n} x {n} lattice")
    return i, j


def forward_weights(l, start, temperature):
    """Log weights of all paths from start to every node at or after it."""
    n = l.n
    if n > MATERIALIZE_LIMIT:
        raise LatticeTooLargeError(n, MATERIALIZE_LIMIT)
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    si, sj = _check_node(n, start)
    tau0 = si + sj
    vecs = [None] * (2 * n - 1)
    logscale = np.full(2 * n - 1, -np.inf)
    for tau, row in _log_sweep(l, (si, sj), temperature):
        if tau >= tau0:
            m = float(row.max())
            vecs[tau] = row - m
            logscale[tau] = m
    return WeightField(
        n=n,
        temperature=float(temperature),
        origin=(si, sj),
        direction=FORWARD,
        tau_min=tau0,
        tau_max=2 * n - 2,
        vecs=vecs,
        logscale=logscale,
    )


def backward_weights(l, end, temperature):
    """Weights of all paths from every node at or before end, into end.

    Runs the forward sweep on the time-reversed pair and restates the result
    in the original orientation.
    """
    n = l.n
    if n > MATERIALIZE_LIMIT:
        raise LatticeTooLargeError(n, MATERIALIZE_LIMIT)
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    ei, ej = _check_node(n, end)
    tau_end = ei + ej
    reflected = l.reflected()
    vecs = [None] * (2 * n - 1)
    logscale = np.full(2 * n - 1, -np.inf)
    for tau_r, row in _log_sweep(reflected, (n - 1 - ei, n - 1 - ej), temperature):
        tau = 2 * n - 2 - tau_r
        if tau <= tau_end:
            r = row[::-1]
            m = float(r.max())
            vecs[tau] = r - m
            logscale[tau] = m
    return WeightField(
        n=n,
        temperature=float(temperature),
        origin=(ei, ej),
        direction=BACKWARD,
        tau_min=0,
        tau_max=tau_end,
        vecs=vecs,
        logscale=logscale,
    )


@dataclass
class LagPath:
    """Thermally averaged lag trajectory over a range of layers.

    taus spans the layer range inclusive; mean_lag[k] and layer_cost[k] are
    the weighted mean lag and mean landscape cost on layer taus[k]. energy is
    the mean of layer_cost over the range (the score the boundary grid search
    minimizes) and log_partition the log of the total path weight.
    """

    taus: np.ndarray
    mean_lag: np.ndarray
    layer_cost: np.ndarray
    energy: float
    log_partition: float
    temperature: float
    mode: str
    start: tuple
    end: tuple | None


def thermal_average(l, forward, backward=None, end=None):
    """Per-layer thermal lag statistics from materialized weight fields.

    With a backward field: bridge mode between forward.origin and
    backward.origin. Without: forward mode, optionally truncated at the
    layer of `end` (otherwise running to the last layer).
    """
    n = l.n
    if forward.direction != FORWARD:
        raise InvalidBoundaryError("first field must be a forward field")
    if forward.n != n:
        raise InvalidBoundaryError("field and landscape sizes differ")
    T = forward.temperature
    si, sj = forward.origin
    tau_s = forward.tau_min
    if backward is not None:
        if backward.direction != BACKWARD:
            raise InvalidBoundaryError("second field must be a backward field")
        if backward.n != n or backward.temperature != T:
            raise InvalidBoundaryError("fields disagree on lattice or temperature")
        ei, ej = backward.origin
        if ei < si or ej < sj:
            raise InvalidBoundaryError(
                f"end ({ei}, {ej}) not reachable from start ({si}, {sj})"
            )
        tau_e = ei + ej
        end = (ei, ej)
        mode = "bridge"
    else:
        if end is not None:
            ei, ej = _check_node(n, end)
            if ei < si or ej < sj:
                raise InvalidBoundaryError(
                    f"end ({ei}, {ej}) not reachable from start ({si}, {sj})"
                )
            tau_e = ei + ej
        else:
            tau_e = 2 * n - 2
        mode = "forward"

    taus = np.arange(tau_s, tau_e + 1)
    mean = np.empty(taus.size)
    cost = np.empty(taus.size)
    for k, tau in enumerate(taus):
        eps = l.layer(tau)
        x = layer_lags(n, tau)
        sf, _ = forward.layer(tau)
        if backward is not None:
            sb, _ = backward.layer(tau)
            lw = sf + sb + eps / T
            finite = np.isfinite(lw)
            if not finite.any():
                raise EmptyLayerError(tau)
            p = np.exp(lw - lw[finite].max())
        else:
            p = np.exp(sf)
        z = p.sum()
        if not z > 0:
            raise EmptyLayerError(tau)
        mean[k] = float((x * p).sum() / z)
        cost[k] = float((eps * p).sum() / z)

    if backward is not None:
        log_partition = forward.node_log_weight(ei, ej)
    else:
        sf, scale = forward.layer(tau_e)
        log_partition = float(np.log(np.exp(sf).sum()) + scale)

    return LagPath(
        taus=taus,
        mean_lag=mean,
        layer_cost=cost,
        energy=float(np.mean(cost)),
        log_partition=log_partition,
        temperature=T,
        mode=mode,
        start=(si, sj),
        end=end,
    )


def path_energy(l, forward, backward=None, end=None):
    """Mean per-layer thermal cost over the path's layer range."""
    return thermal_average(l, forward, backward=backward, end=end).energy
