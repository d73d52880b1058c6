"""Capacities of linear finite-field deterministic networks.

The capacity of a linear deterministic relay network is the minimum GF(2)
rank over all source/destination cuts of the cut transfer matrix. This module
evaluates that minimum, the closed forms for the single relay and diamond
topologies, the capacity of time-unfolded networks and an achievable rate for
general table-defined deterministic networks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ArgumentError, ResourceLimitError
from .gf2_linalg import rank
from .netmodel import (
    DEFAULT_NODE_CAP,
    Cut,
    DetNetwork,
    FunctionalNetwork,
    cut_transfer_matrix,
    enumerate_cuts,
    is_layered,
    transfer_matrix,
)


@dataclass
class CapacityResult:
    """Minimum cut value with its minimizing cut.

    ``per_cut`` maps cut labels to values when the full table was requested.
    """

    value: float
    argmin_cut: Cut | None
    per_cut: dict[str, float] | None = field(default=None)
    destination: str | None = None


def min_cut_capacity(net: DetNetwork, dest: str | None = None, keep_table: bool = False,
                     cap: int = DEFAULT_NODE_CAP) -> CapacityResult:
    """Exact unicast capacity: minimum cut-transfer rank toward ``dest``."""
    dest = net.destination if dest is None else dest
    best, best_cut = None, None
    table = {} if keep_table else None
    for cut in enumerate_cuts(net, dest, cap=cap):
        r = rank(cut_transfer_matrix(net, cut)) if net.q else 0
        if table is not None:
            table[cut.label(net.nodes)] = r
        if best is None or r < best:
            best, best_cut = r, cut
    return CapacityResult(best, best_cut, table, dest)


def multicast_capacity(net: DetNetwork, dests=None, keep_table: bool = False,
                       cap: int = DEFAULT_NODE_CAP) -> CapacityResult:
    """Multicast capacity: the smallest unicast capacity over the destination set."""
    dests = list(net.destinations if dests is None else dests)
    if not dests:
        raise ArgumentError("destination set must be non-empty")
    results = [min_cut_capacity(net, d, keep_table, cap) for d in dests]
    worst = min(results, key=lambda r: r.value)
    if keep_table:
        merged = {}
        for r in results:
            merged.update({f"{r.destination}:{k}": v for k, v in r.per_cut.items()})
        worst = CapacityResult(worst.value, worst.argmin_cut, merged, worst.destination)
    return worst


def relay_closed_form(n_sr: int, n_sd: int, n_rd: int) -> int:
    """Single relay capacity, in its two-branch form.

    The direct link alone is optimal once it beats the weaker relay hop;
    otherwise the weaker relay hop is the bottleneck.
    """
    if min(n_sr, n_sd, n_rd) < 0:
        raise ArgumentError("gains must be non-negative")
    weak_hop = min(n_sr, n_rd)
    value = n_sd if n_sd > weak_hop else weak_hop
    assert value == min(max(n_sr, n_sd), max(n_rd, n_sd))
    return value


def diamond_closed_form(n_sa1: int, n_sa2: int, n_a1d: int, n_a2d: int) -> int:
    if min(n_sa1, n_sa2, n_a1d, n_a2d) < 0:
        raise ArgumentError("gains must be non-negative")
    return min(max(n_sa1, n_sa2), max(n_a1d, n_a2d), n_sa1 + n_a2d, n_sa2 + n_a1d)


def lff_mimo_capacity(gains) -> int:
    """Capacity of a deterministic MIMO link given per-antenna-pair gains.

    ``gains[r][t]`` is the level count from transmit antenna ``t`` to receive
    antenna ``r``; each antenna pair is a shift-matrix block.
    """
    from .gf2_linalg import block_matrix, shift_matrix

    g = np.asarray(gains, dtype=int)
    if g.ndim != 2 or np.any(g < 0):
        raise ArgumentError("gains must be a non-negative integer matrix")
    q = int(g.max(initial=0))
    grid = [[shift_matrix(q, int(x)) for x in row] for row in g]
    return rank(block_matrix(grid, [q] * g.shape[0], [q] * g.shape[1]))


# --------------------------------------------------------------------------
# unfolding


def unfolded_capacity(net: DetNetwork, K: int, cbar: float | None = None, dest: str | None = None,
                      cap: int = 14) -> float:
    """Min-cut value of the ``K``-stage unfolded network.

    Exact dynamic programme over stages: a cut of the unfolded network is a
    sequence of node subsets (one per relay stage) and, because the unfolded
    graph is layered, its value splits into per-stage-pair terms.
    ``cap`` bounds the base node count (state space is ``2^|V|`` per stage).
    """
    dest = net.destination if dest is None else dest
    if K < 1:
        raise ArgumentError("K must be at least 1")
    nv = len(net.nodes)
    if nv > cap:
        raise ResourceLimitError(f"{nv} nodes exceeds the unfolding cap of {cap}")
    if cbar is None:
        cbar = min_cut_capacity(net, dest).value
    wired = K * cbar
    nodes = net.nodes
    full = (1 << nv) - 1
    s_bit = 1 << nodes.index(net.source)
    d_bit = 1 << nodes.index(dest)

    def members(mask):
        return [v for k, v in enumerate(nodes) if mask >> k & 1]

    @lru_cache(maxsize=None)
    def hop_rank(send_mask, recv_mask):
        if not send_mask or not recv_mask or not net.q:
            return 0
        return rank(transfer_matrix(net, members(send_mask), members(recv_mask)))

    states = range(1 << nv)
    # stage 1 entry cost: the source memory link crosses iff S[1] is outside
    cost = np.array([0.0 if m & s_bit else wired for m in states])
    for _ in range(1, K):
        new = np.full(1 << nv, np.inf)
        for nxt in states:
            outside = full & ~nxt
            best = np.inf
            for cur in states:
                c = cost[cur] + hop_rank(cur, outside) + wired * bin(cur & outside).count("1")
                if c < best:
                    best = c
            new[nxt] = best
        cost = new
    final = [
        cost[m] + hop_rank(m, d_bit) + (wired if m & d_bit else 0.0) for m in states
    ]
    return float(min(final))


# --------------------------------------------------------------------------
# general deterministic networks


def _simplex_grid(size: int, grid: int) -> np.ndarray:
    """All pmfs on ``size`` symbols with masses in multiples of ``1/grid``."""
    pts = [
        np.array(c, dtype=float) / grid
        for c in itertools.product(range(grid + 1), repeat=size)
        if sum(c) == grid
    ]
    return np.array(pts)


def _entropy_bits(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


class _FunctionalEvaluator:
    """Exact cut entropies of a table-defined network under product inputs."""

    def __init__(self, net: FunctionalNetwork):
        self.net = net
        self.tx = [v for v in net.nodes if net.alphabets[v] > 1]
        sizes = [net.alphabets[v] for v in self.tx]
        # every joint input configuration, one row each
        self.configs = np.array(list(itertools.product(*[range(a) for a in sizes])), dtype=int).reshape(-1, len(sizes))
        self.outputs = {}
        for j, (inputs, table) in net.functions.items():
            radix = [net.alphabets[i] for i in inputs]
            need = int(np.prod(radix))
            if len(table) != need or any(t is None or not isinstance(t, int) for t in table):
                raise ArgumentError(f"table for {j} must list {need} integer outputs")
            idx = np.zeros(len(self.configs), dtype=int)
            for i in inputs:
                col = self.configs[:, self.tx.index(i)] if i in self.tx else np.zeros(len(self.configs), dtype=int)
                idx = idx * net.alphabets[i] + col
            self.outputs[j] = np.asarray(table, dtype=np.int64)[idx]

    def joint_prob(self, pmfs: dict[str, np.ndarray]) -> np.ndarray:
        p = np.ones(len(self.configs))
        for k, v in enumerate(self.tx):
            p = p * pmfs[v][self.configs[:, k]]
        return p

    def cut_entropy(self, prob: np.ndarray, cut: Cut) -> float:
        """H(y_{cut complement} | x_{cut complement}) in bits."""
        outside = [v for v in self.net.nodes if v in cut.complement]
        ycols = [self.outputs[j] for j in outside if j in self.outputs]
        xcols = [self.configs[:, self.tx.index(v)] for v in outside if v in self.tx]
        return self._group_entropy(prob, ycols + xcols) - self._group_entropy(prob, xcols)

    @staticmethod
    def _group_entropy(prob, cols) -> float:
        if not cols:
            return 0.0
        keys = np.stack(cols, axis=1)
        _, inv = np.unique(keys, axis=0, return_inverse=True)
        masses = np.bincount(inv.ravel(), weights=prob)
        return _entropy_bits(masses)


def general_det_rate(net: FunctionalNetwork, grid: int = 8, fixed_pmfs: dict | None = None,
                     budget: int = 20000, dest: str | None = None) -> tuple[float, dict]:
    """Achievable rate of a table-defined deterministic network.

    Maximizes, over product input pmfs on a simplex grid of resolution
    ``1/grid``, the minimum over cuts of H(y_out | x_out) where "out" is the
    cut complement. Exhaustive when the grid product has at most ``budget``
    points, otherwise coordinate ascent over grid points from the uniform
    pmf. Either way the result is a lower bound on the true maximum.

    Returns
    -------
    rate : float
        Best min-cut entropy found, in bits.
    pmfs : dict
        Per-node input pmf attaining it.
    """
    dest = net.destination if dest is None else dest
    if len(net.nodes) > 5:
        raise ResourceLimitError("general deterministic rate supports at most 5 nodes")
    if any(a > 4 for a in net.alphabets.values()):
        raise ArgumentError("alphabets are limited to 4 symbols")
    layered, _ = is_layered(net)
    if not layered:
        raise ArgumentError("general deterministic rate requires a layered network")
    fixed_pmfs = {k: np.asarray(v, dtype=float) for k, v in (fixed_pmfs or {}).items()}
    ev = _FunctionalEvaluator(net)
    cuts = list(enumerate_cuts(net, dest))

    choices = {}
    for v in ev.tx:
        a = net.alphabets[v]
        if v in fixed_pmfs:
            choices[v] = fixed_pmfs[v][None, :]
        else:
            pts = _simplex_grid(a, grid)
            uni = np.full(a, 1.0 / a)
            if not np.any(np.all(np.isclose(pts, uni), axis=1)):
                pts = np.vstack([uni, pts])
            choices[v] = pts

    def score(sel: dict[str, np.ndarray]) -> float:
        prob = ev.joint_prob(sel)
        return min(ev.cut_entropy(prob, c) for c in cuts)

    total = int(np.prod([len(c) for c in choices.values()])) if choices else 1
    if total <= budget:
        best, best_sel = -1.0, None
        for combo in itertools.product(*[range(len(choices[v])) for v in ev.tx]):
            sel = {v: choices[v][k] for v, k in zip(ev.tx, combo)}
            s = score(sel)
            if s > best + 1e-15:
                best, best_sel = s, sel
        return max(best, 0.0), best_sel or {}

    sel = {}
    for v in ev.tx:
        a = net.alphabets[v]
        uni = np.full(a, 1.0 / a)
        hit = np.flatnonzero(np.all(np.isclose(choices[v], uni), axis=1))
        sel[v] = choices[v][hit[0]] if len(hit) else choices[v][0]
    best = score(sel)
    improved = True
    while improved:
        improved = False
        for v in ev.tx:
            for cand in choices[v]:
                trial = dict(sel)
                trial[v] = cand
                s = score(trial)
                if s > best + 1e-12:
                    best, sel, improved = s, trial, True
    return max(best, 0.0), sel


def det_as_functional(net: DetNetwork) -> FunctionalNetwork:
    """Express a linear deterministic network as lookup tables.

    Symbols are integers whose bit ``k`` is level ``k`` (bit 0 the most
    significant level). Only practical for small ``q`` and in-degree.
    """
    from .gf2_linalg import shift_matrix

    q = net.q
    alph = {v: (1 << q) if net.out_neighbors(v) else 1 for v in net.nodes}
    if any(a > 4 for a in alph.values()):
        raise ArgumentError("table form needs q <= 2")
    functions = {}
    for j in net.nodes:
        inputs = net.in_neighbors(j)
        if not inputs:
            continue
        mats = [shift_matrix(q, net.gains[(i, j)]) for i in inputs]
        table = []
        for xs in itertools.product(*[range(alph[i]) for i in inputs]):
            y = 0
            for m, x in zip(mats, xs):
                y ^= m.apply(x)
            table.append(y)
        functions[j] = (tuple(inputs), tuple(table))
    return FunctionalNetwork(net.nodes, net.source, net.destinations, alph, functions)
