"""Point-to-point MIMO capacities and the Gaussian cut-set bounds built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ArgumentError
from ..netmodel import DEFAULT_NODE_CAP, Cut, GaussNetwork, cut_channel_matrix, enumerate_cuts


@dataclass(frozen=True)
class MimoCutChannel:
    G: np.ndarray
    per_antenna_power: float = 1.0

    def __post_init__(self):
        g = np.atleast_2d(np.asarray(self.G, dtype=complex))
        if not np.all(np.isfinite(g)):
            raise ArgumentError("channel entries must be finite")
        if self.per_antenna_power <= 0:
            raise ArgumentError("power must be positive")
        object.__setattr__(self, "G", g)


def gram_eigenvalues(g: np.ndarray) -> np.ndarray:
    """The min(m, n) largest eigenvalues of G G*, clipped at zero, descending."""
    g = np.atleast_2d(g)
    n, m = g.shape
    k = min(m, n)
    if k == 0:
        return np.zeros(0)
    sv = np.linalg.svd(g, compute_uv=False)
    lam = np.clip(sv[:k] ** 2, 0.0, None)
    return np.sort(lam)[::-1]


def waterfill(lam: np.ndarray, total_power: float) -> np.ndarray:
    """Optimal powers for parallel channels with gains ``lam`` and a sum constraint.

    Exact: the active set is always a prefix of the descending gains, so the
    water level follows from a linear scan.
    """
    lam = np.asarray(lam, dtype=float)
    p = np.zeros_like(lam)
    order = np.argsort(-lam)
    # subnormal gains would overflow 1/lam; they carry no rate anyway
    pos = [i for i in order if lam[i] > np.finfo(float).tiny]
    if not pos or total_power <= 0:
        return p
    inv = np.array([1.0 / lam[i] for i in pos])
    level = None
    for k in range(len(pos), 0, -1):
        mu = (total_power + inv[:k].sum()) / k
        if mu > inv[k - 1]:
            level = mu
            break
    for i, iv in zip(pos, inv):
        p[i] = max(level - iv, 0.0)
    return p


def mimo_capacity(ch: MimoCutChannel | np.ndarray, allocation: str = "waterfill",
                  rate_factor: float = 1.0) -> float:
    """Capacity of ``y = G x + z`` with sum power ``m * P`` over ``m`` transmit antennas.

    ``allocation='waterfill'`` optimizes powers across eigenmodes;
    ``'equal_power'`` gives each of the ``min(m, n)`` modes ``m P / min(m, n)``.
    """
    if not isinstance(ch, MimoCutChannel):
        ch = MimoCutChannel(ch)
    n, m = ch.G.shape
    k = min(m, n)
    if k == 0:
        return 0.0
    lam = gram_eigenvalues(ch.G)
    total = m * ch.per_antenna_power
    if allocation == "waterfill":
        p = waterfill(lam, total)
    elif allocation == "equal_power":
        p = np.full(k, total / k)
    else:
        raise ArgumentError(f"unknown allocation {allocation!r}")
    return rate_factor * float(np.sum(np.log2(1.0 + p * lam)))


def iid_capacity(g: np.ndarray, power: float = 1.0, rate_factor: float = 1.0) -> float:
    """log det(I + P G G*) in bits, the rate of independent unit-power inputs."""
    g = np.atleast_2d(g)
    if g.size == 0:
        return 0.0
    lam = gram_eigenvalues(g)
    return rate_factor * float(np.sum(np.log2(1.0 + power * lam)))


def snr_to_levels(snr: float, convention: str = "complex") -> int:
    """Deterministic-model level count matching a link SNR."""
    if snr <= 1:
        return 0
    bits = math.log2(snr)
    if convention == "real":
        bits /= 2
    elif convention != "complex":
        raise ArgumentError(f"unknown convention {convention!r}")
    # guard against log2 round-off on exact powers of two
    r = round(bits)
    if abs(bits - r) < 1e-12:
        return int(r)
    return int(math.ceil(bits))


@dataclass
class GaussCutsetResult:
    """Cut-set values of a Gaussian network.

    ``upper`` is the minimum over cuts of the sum-power water-filled MIMO
    capacity (an upper bound on the cut-set bound); ``iid`` uses independent
    unit-power Gaussian inputs at every antenna.
    """

    upper: float
    iid: float
    upper_cut: Cut | None
    iid_cut: Cut | None
    per_cut: dict[str, tuple[float, float]] | None = None


def cutset_bounds(net: GaussNetwork, dest: str | None = None, keep_table: bool = False,
                  cap: int = DEFAULT_NODE_CAP) -> GaussCutsetResult:
    dest = net.destination if dest is None else dest
    f = net.rate_factor
    best_u = best_i = math.inf
    cut_u = cut_i = None
    table = {} if keep_table else None
    for cut in enumerate_cuts(net, dest, cap=cap):
        g = cut_channel_matrix(net, cut)
        u = mimo_capacity(MimoCutChannel(g, net.power), "waterfill", f) if g.size else 0.0
        i = iid_capacity(g, net.power, f)
        if table is not None:
            table[cut.label(net.nodes)] = (u, i)
        if u < best_u:
            best_u, cut_u = u, cut
        if i < best_i:
            best_i, cut_i = i, cut
    return GaussCutsetResult(best_u, best_i, cut_u, cut_i, table)
