"""Monte Carlo simulator for random linear relaying on deterministic networks.

Blocks of ``T`` symbols are packed into unsigned 64-bit words: bit
``t*q + r`` is level ``r`` (0 = most significant) of time slot ``t``. This
caps ``q*T`` at 64. Relay maps are applied through per-byte lookup tables so a
whole message set propagates with a handful of vectorized gathers.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .detcap import min_cut_capacity
from .errors import ArgumentError, ResourceLimitError
from .gf2_linalg import BitMatrix, random_matrix, shift_matrix
from .netmodel import DetNetwork, _relevant_nodes, cut_count, is_layered

MAX_RT = 20
WORD_BITS = 64


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream for one trial; identical in serial and parallel runs."""
    return np.random.default_rng([int(seed), int(trial)])


@dataclass
class RelayCode:
    """Random linear relaying code for one network.

    Attributes
    ----------
    T : int
        Block length in channel uses.
    R : float
        Rate in bits per channel use.
    q : int
        Levels per channel use.
    codebook : ndarray of uint64
        Source codeword for each message index.
    maps : dict
        Relay node -> ``qT x qT`` ``BitMatrix`` applied to its received block.
    """

    T: int
    R: float
    q: int
    codebook: np.ndarray
    maps: dict[str, BitMatrix]

    @property
    def message_count(self) -> int:
        return len(self.codebook)

    @property
    def block_bits(self) -> int:
        return self.q * self.T


@dataclass
class SimOutcome:
    trials: int
    errors: int
    p_hat: float
    bound: float
    ci_low: float
    ci_high: float
    flags: np.ndarray | None = None

    @property
    def sigma(self) -> float:
        return math.sqrt(max(self.p_hat * (1 - self.p_hat), 0.0) / self.trials)


def message_count(R: float, T: int) -> int:
    return max(1, math.ceil(2.0 ** (R * T) - 1e-9))


def _processing_order(net: DetNetwork, acyclic_ok: bool) -> list[str]:
    layered, layers = is_layered(net)
    relevant = _relevant_nodes(net)
    if layered:
        return sorted((v for v in relevant), key=lambda v: (layers[v], net.nodes.index(v)))
    if not acyclic_ok:
        raise ArgumentError("network is not layered; unfold it first (netmodel.unfold)")
    indeg = {v: 0 for v in relevant}
    for i, j in net.gains:
        if i in relevant and j in relevant:
            indeg[j] += 1
    todo = deque(v for v in net.nodes if v in relevant and indeg[v] == 0)
    order = []
    while todo:
        u = todo.popleft()
        order.append(u)
        for j in net.out_neighbors(u):
            if j in relevant:
                indeg[j] -= 1
                if indeg[j] == 0:
                    todo.append(j)
    if len(order) != len(relevant):
        raise ArgumentError("network has a cycle between source and destination; unfold it first")
    return order


def _check_sizes(net: DetNetwork, T: int, R: float):
    if T < 1:
        raise ArgumentError("T must be at least 1")
    if R < 0:
        raise ArgumentError("R must be non-negative")
    if R * T > MAX_RT:
        raise ResourceLimitError(f"R*T = {R * T:g} exceeds {MAX_RT}; the message table cannot be enumerated")
    if net.q * T > WORD_BITS:
        raise ResourceLimitError(f"q*T = {net.q * T} exceeds {WORD_BITS} packed bits")


def random_words(rng: np.random.Generator, size: int, nbits: int) -> np.ndarray:
    """Uniform ``nbits``-bit words as uint64."""
    hi = rng.integers(0, 1 << 32, size=size, dtype=np.uint64)
    lo = rng.integers(0, 1 << 32, size=size, dtype=np.uint64)
    words = (hi << np.uint64(32)) | lo
    if nbits < 64:
        words &= np.uint64((1 << nbits) - 1)
    return words


def sample_code(net: DetNetwork, T: int, R: float, seed=None, rng: np.random.Generator | None = None,
                acyclic_ok: bool = False) -> RelayCode:
    """Draw a random code: uniform source codewords and uniform relay matrices."""
    _check_sizes(net, T, R)
    order = _processing_order(net, acyclic_ok)
    if rng is None:
        rng = np.random.default_rng(seed)
    n = net.q * T
    codebook = random_words(rng, message_count(R, T), n) if n else np.zeros(message_count(R, T), dtype=np.uint64)
    maps = {}
    for v in order:
        if v != net.source and v not in net.destinations:
            maps[v] = random_matrix(n, n, rng)
    return RelayCode(T, R, net.q, codebook, maps)


# --------------------------------------------------------------------------
# reference propagation on Python integers


def _shift_block(x: int, q: int, n: int, T: int) -> int:
    s = shift_matrix(q, n)
    out = 0
    mask = (1 << q) - 1
    for t in range(T):
        out |= s.apply((x >> (t * q)) & mask) << (t * q)
    return out


def simulate_block(net: DetNetwork, code: RelayCode, w: int, dest: str | None = None,
                   acyclic_ok: bool = False) -> int:
    """Received block at ``dest`` when message ``w`` is sent, as a packed integer."""
    dest = net.destination if dest is None else dest
    if not 0 <= w < code.message_count:
        raise ArgumentError(f"message index {w} out of range")
    order = _processing_order(net, acyclic_ok)
    q, T = code.q, code.T
    sent = {net.source: int(code.codebook[w])}
    received = {}
    for v in order:
        if v == net.source:
            continue
        y = 0
        for i in net.in_neighbors(v):
            if i in sent:
                y ^= _shift_block(sent[i], q, net.gains[(i, v)], T)
        received[v] = y
        if v in code.maps:
            sent[v] = code.maps[v].apply(y)
    return received.get(dest, 0)


# --------------------------------------------------------------------------
# vectorized propagation


def byte_tables(columns, nbits: int) -> np.ndarray:
    """Lookup tables applying a linear map given by packed columns.

    ``tables[b][v]`` is the image of byte value ``v`` placed at input bits
    ``8b..8b+7``.
    """
    nbytes = max(1, (nbits + 7) // 8)
    cols = list(columns) + [0] * (8 * nbytes - len(columns))
    tables = np.zeros((nbytes, 256), dtype=np.uint64)
    for b in range(nbytes):
        row = tables[b]
        for k in range(8):
            # entries with top set bit k extend the already-filled prefix
            row[1 << k:2 << k] = row[:1 << k] ^ np.uint64(cols[8 * b + k])
    return tables


def apply_tables(tables: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    for b in range(tables.shape[0]):
        out ^= tables[b][(x >> np.uint64(8 * b)) & np.uint64(0xFF)]
    return out


def _slot_mask(q: int, n: int, T: int) -> np.uint64:
    s = q - n
    per_slot = ((1 << q) - 1) & ~((1 << s) - 1)
    mask = 0
    for t in range(T):
        mask |= per_slot << (t * q)
    return np.uint64(mask & ((1 << 64) - 1))


def propagate(net: DetNetwork, code: RelayCode, x_source: np.ndarray, order: list[str]) -> dict[str, np.ndarray]:
    """Push an array of source blocks through the network; returns received blocks."""
    q, T = code.q, code.T
    sent = {net.source: x_source}
    received = {}
    tables = {v: byte_tables(m.columns(), code.block_bits) for v, m in code.maps.items()}
    for v in order:
        if v == net.source:
            continue
        y = np.zeros_like(x_source)
        for i in net.in_neighbors(v):
            if i in sent:
                n = net.gains[(i, v)]
                y ^= (sent[i] << np.uint64(q - n)) & _slot_mask(q, n, T)
        received[v] = y
        if v in tables:
            sent[v] = apply_tables(tables[v], y)
    return received


def end_to_end_columns(net: DetNetwork, code: RelayCode, dest: str, order: list[str]) -> list[int]:
    """Packed columns of the overall source-to-``dest`` linear map."""
    n = code.block_bits
    basis = np.array([1 << k for k in range(n)], dtype=np.uint64)
    rec = propagate(net, code, basis, order)
    return [int(c) for c in rec.get(dest, np.zeros(n, dtype=np.uint64))]


def _wilson(k: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    p = k / n
    den = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    return max(0.0, centre - half), min(1.0, centre + half)


def union_bound(net: DetNetwork, T: int, R: float, dests=None) -> float:
    """min(1, sum over destinations of 2^(RT) * (number of cuts) * 2^(-T * mincut))."""
    dests = list(net.destinations if dests is None else dests)
    total = 0.0
    for d in dests:
        c = min_cut_capacity(net, d).value
        total += 2.0 ** (R * T) * cut_count(net, d) * 2.0 ** (-T * c)
    return min(1.0, total)


def estimate_error(net: DetNetwork, T: int, R: float, trials: int, seed: int = 0,
                   keep_flags: bool = False, acyclic_ok: bool = False) -> SimOutcome:
    """Empirical decoding error of random linear relaying.

    Each trial draws a fresh code and a uniform message. Decoding is
    exhaustive: an error occurs when another message yields the same block at
    some destination.
    """
    if trials < 1:
        raise ArgumentError("trials must be at least 1")
    _check_sizes(net, T, R)
    order = _processing_order(net, acyclic_ok)
    flags = np.zeros(trials, dtype=bool)
    for k in range(trials):
        rng = trial_rng(seed, k)
        code = sample_code(net, T, R, rng=rng, acyclic_ok=acyclic_ok)
        w = int(rng.integers(code.message_count))
        if code.message_count == 1:
            continue
        for d in net.destinations:
            cols = end_to_end_columns(net, code, d, order)
            y = apply_tables(byte_tables(cols, code.block_bits), code.codebook)
            if np.count_nonzero(y == y[w]) > 1:
                flags[k] = True
                break
    errors = int(flags.sum())
    lo, hi = _wilson(errors, trials)
    return SimOutcome(trials, errors, errors / trials, union_bound(net, T, R), lo, hi,
                      flags if keep_flags else None)
