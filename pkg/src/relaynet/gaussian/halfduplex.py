"""Cut-set bound for half-duplex relays under fixed transmit/receive schedules."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..errors import ResourceLimitError
from ..netmodel import GaussNetwork, enumerate_cuts
from .lp import simplex_max
from .mimo import iid_capacity

MAX_NODES = 12


@dataclass
class ModeSchedule:
    """Half-duplex states and their time shares.

    ``modes[k]`` is the set of transmitting nodes in state ``k``; the source
    always transmits and the destination always listens.
    """

    modes: list[frozenset]
    t: np.ndarray
    inputs: str = "iid"


def enumerate_modes(net: GaussNetwork, dest: str | None = None) -> list[frozenset]:
    dest = net.destination if dest is None else dest
    relays = [v for v in net.nodes if v not in (net.source, dest)]
    modes = []
    for flags in itertools.product((False, True), repeat=len(relays)):
        tx = {net.source} | {v for v, f in zip(relays, flags) if f}
        modes.append(frozenset(tx))
    return modes


def mode_cut_value(net: GaussNetwork, tx: frozenset, source_side: frozenset) -> float:
    """Cut value with independent unit-power inputs over the active links only."""
    senders = [v for v in net.nodes if v in source_side and v in tx]
    receivers = [v for v in net.nodes if v not in source_side and v not in tx]
    if not senders or not receivers:
        return 0.0
    m = sum(net.tx_antennas[v] for v in senders)
    n = sum(net.rx_antennas[v] for v in receivers)
    g = np.zeros((n, m), dtype=complex)
    r0 = 0
    for j in receivers:
        c0 = 0
        for i in senders:
            h = net.channels.get((i, j))
            if h is not None:
                g[r0:r0 + net.rx_antennas[j], c0:c0 + net.tx_antennas[i]] = h
            c0 += net.tx_antennas[i]
        r0 += net.rx_antennas[j]
    return iid_capacity(g, net.power, net.rate_factor)


def half_duplex_cutset(net: GaussNetwork, dest: str | None = None) -> tuple[float, ModeSchedule]:
    """Best schedule for the minimum over cuts of time-averaged cut values.

    Solved as ``max s`` subject to ``s <= sum_m t_m v(m, cut)`` for every cut
    and ``sum_m t_m <= 1``. Relaxing the equality is harmless because cut
    values are non-negative.
    """
    dest = net.destination if dest is None else dest
    if len(net.nodes) > MAX_NODES:
        raise ResourceLimitError(f"half-duplex bound supports at most {MAX_NODES} nodes")
    modes = enumerate_modes(net, dest)
    cuts = list(enumerate_cuts(net, dest))
    V = np.array([[mode_cut_value(net, tx, c.source_side) for tx in modes] for c in cuts])
    M = len(modes)
    # variables: t_1..t_M, s
    A = np.zeros((len(cuts) + 1, M + 1))
    A[:len(cuts), :M] = -V
    A[:len(cuts), M] = 1.0
    A[-1, :M] = 1.0
    b = np.zeros(len(cuts) + 1)
    b[-1] = 1.0
    c = np.zeros(M + 1)
    c[M] = 1.0
    value, x = simplex_max(c, A, b)
    t = x[:M]
    slack = 1.0 - t.sum()
    if slack > 0:
        t = t + slack / M
    return value, ModeSchedule(modes, t)
