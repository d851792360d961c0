"""Synthetic lag scenarios and a brute-force reference for the path engines.

generate() builds controlled pairs Y_t = s * X_{t - lag(t)} + noise with a
known lag trajectory, used throughout the test suite and the demos.

brute_force_thermal() enumerates every admissible lattice path explicitly
and aggregates Boltzmann weights in 80-bit extended precision. It shares no
code with the sweep engine (no transfer-matrix recursion, no rescaling), so
agreement between the two is meaningful evidence of correctness. It is only
viable on tiny lattices; see ORACLE_LIMIT.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidBoundaryError,
    LagOutOfRangeError,
    LatticeTooLargeError,
    ScenarioError,
)
from .ingest import AlignedPair

ORACLE_LIMIT = 10

# Sentinel marking "path does not touch this layer" in enumerated path rows.
_SKIP = np.int8(-127)

_KINDS = ("constant", "step", "sinusoid", "anti")
_DRIVERS = ("walk", "ar1")


@dataclass(frozen=True)
class LagScenario:
    """Recipe for a synthetic pair with a known lag trajectory.

    kind selects the lag shape:
      constant  lag(t) = k
      step      lag(t) = k for t < switch_index, then k2
      sinusoid  lag(t) = round(amplitude * sin(2 pi t / period))
      anti      lag(t) = k with Y = -X_{t-k} + noise (mirrored coupling)

    driver selects the X process: "walk" is a Gaussian random walk with step
    scale sigma_step, "ar1" an AR(1) with coefficient rho and innovation
    scale sigma_step. noise_sigma adds iid Gaussian noise to Y.
    """

    kind: str
    n: int
    seed: int
    k: int = 0
    k2: int = 0
    switch_index: int = 0
    amplitude: float = 0.0
    period: float = 64.0
    driver: str = "walk"
    rho: float = 0.95
    sigma_step: float = 1.0
    noise_sigma: float = 0.0


def _lag_vector(s):
    t = np.arange(s.n)
    if s.kind == "constant" or s.kind == "anti":
        return np.full(s.n, s.k, dtype=np.int64)
    if s.kind == "step":
        if not 0 < s.switch_index < s.n:
            raise ScenarioError("step scenario needs 0 < switch_index < n")
        return np.where(t < s.switch_index, s.k, s.k2).astype(np.int64)
    if s.kind == "sinusoid":
        if s.period <= 0:
            raise ScenarioError("sinusoid scenario needs period > 0")
        raw = s.amplitude * np.sin(2.0 * np.pi * t / s.period)
        return (np.sign(raw) * np.floor(np.abs(raw) + 0.5)).astype(np.int64)
    raise ScenarioError(f"unknown scenario kind {s.kind!r}; expected one of {_KINDS}")


def generate(s):
    """Materialize a scenario; returns (AlignedPair, true_lag vector).

    Deterministic for a fixed scenario: the driver innovations are drawn
    first, then the observation noise, from one seeded generator.
    """
    if s.n < 8:
        raise ScenarioError("scenario length must be at least 8")
    if s.driver not in _DRIVERS:
        raise ScenarioError(f"unknown driver {s.driver!r}; expected one of {_DRIVERS}")
    if s.noise_sigma < 0 or s.sigma_step <= 0:
        raise ScenarioError("noise_sigma must be >= 0 and sigma_step > 0")
    lag = _lag_vector(s)
    max_lag = int(np.max(np.abs(lag)))
    if max_lag >= s.n / 4:
        raise LagOutOfRangeError(max_lag, s.n)

    rng = np.random.default_rng(s.seed)
    pad = max_lag + 1
    total = s.n + 2 * pad
    innov = rng.normal(0.0, s.sigma_step, size=total)
    if s.driver == "walk":
        full = np.cumsum(innov)
    else:
        full = np.empty(total)
        full[0] = innov[0]
        for t in range(1, total):
            full[t] = s.rho * full[t - 1] + innov[t]
    noise = rng.normal(0.0, s.noise_sigma, size=s.n) if s.noise_sigma > 0 else 0.0

    x = full[pad : pad + s.n]
    sign = -1.0 if s.kind == "anti" else 1.0
    y = sign * full[pad + np.arange(s.n) - lag] + noise
    pair = AlignedPair(
        x=x.copy(),
        y=np.asarray(y, dtype=np.float64),
        grid=np.arange(s.n, dtype=np.int64),
        normalization="raw",
        x_label="x_synth",
        y_label="y_synth",
    )
    return pair, lag


# --- exhaustive path enumeration -------------------------------------------


def _node_ok(n, tau, x, i_max, j_max):
    """Vectorized lattice-and-cone membership test for nodes (tau, x)."""
    i = (tau - x) >> 1
    j = (tau + x) >> 1
    return (i >= 0) & (i <= i_max) & (j >= 0) & (j <= j_max)


def _extend_frontiers(n, start, i_max, j_max, collect_all):
    """Grow all monotone paths from start by frontier branching.

    Paths are rows of int8 matrices with one column per anti-diagonal layer;
    entries hold the lag x at visited layers and _SKIP elsewhere. A step
    advances one layer and moves the lag by +/-1, or advances two layers
    keeping the lag (the diagonal step). Returns either every frontier
    (collect_all, for endpoint statistics) or the single final frontier of
    paths reaching layer i_max + j_max (pruned to the end's backward cone).
    """
    si, sj = start
    n_layers = 2 * n - 1
    tau0 = si + sj
    tau_last = i_max + j_max
    seed = np.full((1, n_layers), _SKIP, dtype=np.int8)
    seed[0, tau0] = sj - si
    pending = {tau0: [seed]}
    collected = []
    for tau in range(tau0, tau_last + 1):
        chunks = pending.pop(tau, None)
        if not chunks:
            continue
        rows = chunks[0] if len(chunks) == 1 else np.concatenate(chunks, axis=0)
        if collect_all:
            collected.append((tau, rows))
        elif tau == tau_last:
            return rows
        xs = rows[:, tau].astype(np.int32)
        for dtau, dx in ((1, -1), (1, 1), (2, 0)):
            nt = tau + dtau
            if nt > tau_last:
                continue
            nx = xs + dx
            ok = _node_ok(n, nt, nx, i_max, j_max)
            if not ok.any():
                continue
            child = rows[ok].copy()
            child[:, nt] = nx[ok].astype(np.int8)
            pending.setdefault(nt, []).append(child)
    if collect_all:
        return collected
    return np.empty((0, n_layers), dtype=np.int8)


def enumerate_directed_paths(n, start, end):
    """All monotone lattice paths from start to end, as an int8 matrix.

    Row r column tau holds the lag x(tau) where path r touches layer tau and
    a sentinel (< -100) where the layer is skipped by a diagonal step.
    """
    _check_small(n)
    _check_cone(start, end, n)
    return _extend_frontiers(n, start, end[0], end[1], collect_all=False)


def _check_small(n):
    if n > ORACLE_LIMIT:
        raise LatticeTooLargeError(n, ORACLE_LIMIT)


def _check_cone(start, end, n):
    si, sj = start
    ei, ej = end
    for i, j in (start, end):
        if not (0 <= i < n and 0 <= j < n):
            raise InvalidBoundaryError(f"node ({i}, {j}) outside the {n} x {n} lattice")
    if ei < si or ej < sj:
        raise InvalidBoundaryError(
            f"end ({ei}, {ej}) not reachable from start ({si}, {sj})"
        )


def _path_energies(l, rows, tau_range):
    """Sum of landscape costs over each path row, in extended precision."""
    e = np.zeros(rows.shape[0], dtype=np.longdouble)
    for tau in tau_range:
        col = rows[:, tau]
        vis = col != _SKIP
        if not vis.any():
            continue
        x = col[vis].astype(np.int64)
        i = (tau - x) >> 1
        cost = _cost_at(l, tau, x, i)
        e[vis] += cost.astype(np.longdouble)
    return e


def _cost_at(l, tau, x, i):
    return np.asarray(l.nodes(i, tau - i), dtype=np.float64)


def brute_force_thermal(l, start, end=None, temperature=2.0, mode="bridge"):
    """Reference thermal statistics by explicit path enumeration.

    Returns a dict with keys:
      tau            layer indices of the reported range (inclusive)
      mean_lag       thermally averaged lag per layer
      layer_cost     thermally averaged landscape cost per layer
      path_cost      mean of layer_cost over the range (the selection score)
      log_partition  log of the total path weight (bridge: all start-to-end
                     paths; forward: all paths ending on the final layer)
      n_paths        number of enumerated complete paths (bridge mode)

    In bridge mode the distribution at layer tau is over complete start-to-end
    paths, restricted to those that touch tau. In forward mode it is over all
    partial paths from the start whose endpoint lies on tau.
    """
    n = l.n
    _check_small(n)
    if temperature <= 0:
        raise ValueError("temperature must be positive; use the hard path at zero")
    T = np.longdouble(temperature)
    si, sj = start
    tau0 = si + sj
    if mode == "bridge":
        if end is None:
            raise InvalidBoundaryError("bridge mode needs an end node")
        _check_cone(start, end, n)
        tau_end = end[0] + end[1]
        rows = _extend_frontiers(n, start, end[0], end[1], collect_all=False)
        energies = _path_energies(l, rows, range(tau0, tau_end + 1))
        e_min = energies.min()
        w = np.exp(-(energies - e_min) / T)
        taus = np.arange(tau0, tau_end + 1)
        mean_lag = np.empty(taus.size)
        layer_cost = np.empty(taus.size)
        for k, tau in enumerate(taus):
            col = rows[:, tau]
            vis = col != _SKIP
            wv = w[vis]
            z = wv.sum()
            x = col[vis].astype(np.int64)
            i = (tau - x) >> 1
            cost = _cost_at(l, tau, x, i).astype(np.longdouble)
            mean_lag[k] = float((x * wv).sum() / z)
            layer_cost[k] = float((cost * wv).sum() / z)
        log_partition = float(np.log(w.sum()) - e_min / T)
        path_cost = float(np.mean(np.asarray(layer_cost, dtype=np.longdouble)))
        n_paths = rows.shape[0]
    elif mode == "forward":
        if end is not None:
            _check_cone(start, end, n)
            tau_end = end[0] + end[1]
        else:
            tau_end = 2 * n - 2
        frontiers = _extend_frontiers(n, start, n - 1, n - 1, collect_all=True)
        by_tau = {}
        for tau, rows in frontiers:
            energies = _path_energies(l, rows, range(tau0, tau + 1))
            by_tau[tau] = (rows[:, tau].astype(np.int64), energies)
        e_min = min(e.min() for _, e in by_tau.values())
        taus = np.arange(tau0, tau_end + 1)
        mean_lag = np.empty(taus.size)
        layer_cost = np.empty(taus.size)
        z_final = None
        for k, tau in enumerate(taus):
            x, energies = by_tau[tau]
            wv = np.exp(-(energies - e_min) / T)
            z = wv.sum()
            i = (tau - x) >> 1
            cost = _cost_at(l, tau, x, i).astype(np.longdouble)
            mean_lag[k] = float((x * wv).sum() / z)
            layer_cost[k] = float((cost * wv).sum() / z)
            if tau == tau_end:
                z_final = z
        log_partition = float(np.log(z_final) - e_min / T)
        path_cost = float(np.mean(np.asarray(layer_cost, dtype=np.longdouble)))
        n_paths = int(sum(v[0].size for v in by_tau.values()))
    else:
        raise ValueError(f"unknown mode {mode!r}; expected 'bridge' or 'forward'")
    return {
        "tau": taus,
        "mean_lag": mean_lag,
        "layer_cost": layer_cost,
        "path_cost": path_cost,
        "log_partition": log_partition,
        "n_paths": n_paths,
    }
