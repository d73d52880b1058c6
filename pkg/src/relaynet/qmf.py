"""Quantize-map-and-forward relaying: quantizer, entropy constants, estimators, simulator.

Conventions: ``CN(0, s)`` has independent real and imaginary parts of
variance ``s / 2``. Entropies and mutual informations are in bits.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp, ndtr

from .errors import ArgumentError, ResourceLimitError
from .netmodel import GaussNetwork, _relevant_nodes, is_layered

LOG2E = math.log2(math.e)


# --------------------------------------------------------------------------
# quantizer


def round_half_away(x):
    """Nearest integer, halves rounded away from zero."""
    x = np.asarray(x, dtype=float)
    return (np.sign(x) * np.floor(np.abs(x) + 0.5)).astype(np.int64)


def quantize(v) -> tuple[int, int]:
    """Nearest Gaussian integer to a complex sample, as ``(re, im)``."""
    v = complex(v)
    if not (math.isfinite(v.real) and math.isfinite(v.imag)):
        raise ArgumentError("quantizer input must be finite")
    return int(round_half_away(v.real)), int(round_half_away(v.imag))


def quantize_array(v) -> np.ndarray:
    """Component-wise quantization; output has a trailing axis ``(re, im)``."""
    v = np.asarray(v)
    return np.stack([round_half_away(v.real), round_half_away(v.imag)], axis=-1)


# --------------------------------------------------------------------------
# constants


def entropy_bound_constant(tol: float = 1e-6) -> float:
    """The quantization-entropy constant, about 5.89.

    Sums ``f(k) exp(-f(k))`` with ``f(k) = (k - 1/2)^2 / 2`` until the
    geometric tail bound on the remainder drops below ``tol``.
    """
    total = 0.0
    k = 1
    while True:
        f = (k - 0.5) ** 2 / 2
        term = f * math.exp(-f)
        total += term
        f_next = (k + 0.5) ** 2 / 2
        nxt = f_next * math.exp(-f_next)
        ratio = nxt / term
        # terms shrink geometrically once ratio < 1
        if k >= 3 and ratio < 1 and nxt / (1 - ratio) < tol / (2 * LOG2E):
            break
        k += 1
    return 2 * LOG2E * total + 2.5 + math.log2(3)


def quantization_mi_constant() -> float:
    """log2(11 pi e), the per-dimension constant of the noisy-quantization gap."""
    return math.log2(11 * math.pi * math.e)


# --------------------------------------------------------------------------
# plug-in entropies


def plugin_entropy(symbols: np.ndarray) -> tuple[float, float]:
    """Plug-in entropy of the rows of an integer array, with its standard error."""
    symbols = np.asarray(symbols)
    if symbols.ndim == 1:
        symbols = symbols[:, None]
    n = len(symbols)
    _, inv, counts = np.unique(symbols, axis=0, return_inverse=True, return_counts=True)
    p = counts / n
    h = float(-(p * np.log2(p)).sum())
    info = -np.log2(p)[inv.ravel()]
    se = float(info.std() / math.sqrt(n))
    return h, se


def rounded_gaussian_entropy(mean, std: float, span: float = 10.0) -> np.ndarray:
    """Exact entropy of ``round(N(mean, std^2))`` for each entry of ``mean``."""
    mean = np.asarray(mean, dtype=float)
    if std == 0:
        return np.zeros_like(mean)
    width = int(math.ceil(span * std)) + 2
    offs = np.arange(-width, width + 1)
    centre = np.rint(mean)[..., None] + offs
    upper = ndtr((centre + 0.5 - mean[..., None]) / std)
    lower = ndtr((centre - 0.5 - mean[..., None]) / std)
    p = np.clip(upper - lower, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log2(p), 0.0)
    return terms.sum(axis=-1)


@dataclass
class CondEntropyEstimate:
    h_noisy_given_clean: float
    h_clean_given_noisy: float
    h_noisy_given_clean_real: float
    h_clean_given_noisy_real: float
    samples: int


def cond_entropy_quantized(sampler, samples: int = 10**6, seed: int = 0,
                           noise_std: float = 1.0) -> CondEntropyEstimate:
    """Plug-in estimates of H([v+z] | [v]) and H([v] | [v+z]).

    ``sampler(rng, n)`` returns ``n`` complex values of ``v``. The noise has
    independent real and imaginary parts of standard deviation
    ``noise_std``; zero gives the noiseless variant.
    """
    if samples < 1:
        raise ArgumentError("samples must be positive")
    rng = np.random.default_rng(seed)
    v = np.asarray(sampler(rng, samples), dtype=complex)
    if v.shape != (samples,) or not np.all(np.isfinite(v)):
        raise ArgumentError("sampler must return the requested number of finite values")
    z = noise_std * (rng.standard_normal(samples) + 1j * rng.standard_normal(samples))
    a = quantize_array(v + z)
    b = quantize_array(v)
    h_ab, _ = plugin_entropy(np.hstack([a, b]))
    h_a, _ = plugin_entropy(a)
    h_b, _ = plugin_entropy(b)
    h_ab_re, _ = plugin_entropy(np.stack([a[:, 0], b[:, 0]], axis=1))
    h_a_re, _ = plugin_entropy(a[:, 0])
    h_b_re, _ = plugin_entropy(b[:, 0])
    return CondEntropyEstimate(h_ab - h_b, h_ab - h_a, h_ab_re - h_b_re, h_ab_re - h_a_re, samples)


# --------------------------------------------------------------------------
# mutual-information gaps


def _cn(rng, shape, var=1.0):
    return math.sqrt(var / 2) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


@dataclass
class MiGapReport:
    """Mutual informations of ``y = G x + z`` under several quantizations.

    ``mi_gauss`` is I(x; Gx+z); ``mi_trunc`` is I(x; [Gx]);
    ``mi_quant`` is I(x; [Gx+z]). Gaps carry ``3 sigma`` slacks and the bounds
    19n, 12n and 7n with ``n`` receive dimensions.
    """

    n: int
    mi_gauss: float
    mi_trunc: float
    mi_quant: float
    gap_gauss_trunc: float
    gap_quant_trunc: float
    gap_gauss_quant: float
    slack_gauss_trunc: float
    slack_quant_trunc: float
    slack_gauss_quant: float
    diagnostic: str = ""

    @property
    def bounds(self) -> tuple[int, int, int]:
        return 19 * self.n, 12 * self.n, 7 * self.n

    def within_bounds(self) -> tuple[bool, bool, bool]:
        b = self.bounds
        return (
            self.gap_gauss_trunc <= b[0] + self.slack_gauss_trunc,
            self.gap_quant_trunc <= b[1] + self.slack_quant_trunc,
            self.gap_gauss_quant <= b[2] + self.slack_gauss_quant,
        )


def mi_gap_check(G, samples: int = 10**6, seed: int = 0, ci_target: float = 0.05) -> MiGapReport:
    G = np.atleast_2d(np.asarray(G, dtype=complex))
    n, m = G.shape
    if n > 2 or m > 2:
        raise ArgumentError("matrices up to 2x2 are supported")
    rng = np.random.default_rng(seed)
    x = _cn(rng, (samples, m))
    z = _cn(rng, (samples, n))
    gx = x @ G.T
    mi_gauss = float(np.log2(np.linalg.det(np.eye(n) + G @ G.conj().T).real))

    trunc = quantize_array(gx).reshape(samples, -1)
    mi_trunc, se_trunc = plugin_entropy(trunc)
    noisy = quantize_array(gx + z).reshape(samples, -1)
    h_noisy, se_noisy = plugin_entropy(noisy)
    # given x each real dimension is an independent rounded Gaussian
    std = math.sqrt(0.5)
    cond = rounded_gaussian_entropy(gx.real, std).sum(axis=1) + rounded_gaussian_entropy(gx.imag, std).sum(axis=1)
    h_cond = float(cond.mean())
    se_cond = float(cond.std() / math.sqrt(samples))
    mi_quant = h_noisy - h_cond
    se_quant = se_noisy + se_cond
    diag = ""
    if max(se_trunc, se_quant) > ci_target:
        diag = f"standard error {max(se_trunc, se_quant):.3g} exceeds target {ci_target:g}; raise samples"
    return MiGapReport(
        n, mi_gauss, mi_trunc, mi_quant,
        abs(mi_gauss - mi_trunc), abs(mi_quant - mi_trunc), abs(mi_gauss - mi_quant),
        3 * se_trunc, 3 * (se_trunc + se_quant), 3 * se_quant, diag,
    )


# --------------------------------------------------------------------------
# Chernoff event


@dataclass
class ChernoffReport:
    p_hat: float
    sigma: float
    bound: float
    trials: int
    T: int

    @property
    def holds(self) -> bool:
        return self.p_hat <= self.bound + 3 * self.sigma


def chernoff_bound(H, T: int) -> float:
    """2^(-T (I(x; Hx+z) - min(m, n))) for unit-power inputs and noise."""
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    n, m = H.shape
    mi = float(np.log2(np.linalg.det(np.eye(n) + H @ H.conj().T).real))
    return 2.0 ** (-T * (mi - min(m, n)))


def chernoff_event_check(H, T: int, trials: int = 10**5, seed: int = 0, chunk: int = 20000) -> ChernoffReport:
    """Empirical P(every one of T inputs has max |(H x)_k| <= sqrt 2), x ~ CN(0, 2 I)."""
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    n, m = H.shape
    if max(m, n) > 3 or T > 8 or T < 1:
        raise ArgumentError("supports m, n <= 3 and 1 <= T <= 8")
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < trials:
        b = min(chunk, trials - done)
        x = _cn(rng, (b, T, m), var=2.0)
        y = np.abs(x @ H.T)
        hits += int(np.count_nonzero(np.all(y.max(axis=2) <= math.sqrt(2), axis=1)))
        done += b
    p = hits / trials
    sigma = math.sqrt(max(p * (1 - p), 0.0) / trials)
    return ChernoffReport(p, sigma, chernoff_bound(H, T), trials, T)


# --------------------------------------------------------------------------
# end-to-end simulation

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GOLD = np.uint64(0x9E3779B97F4A7C15)


def _mix(x: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer, element-wise on uint64 arrays."""
    x = x + _GOLD
    x = (x ^ (x >> np.uint64(30))) * _M1
    x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


def _fold_hash(h: np.ndarray, column: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return _mix(h ^ np.asarray(column, dtype=np.int64).astype(np.uint64))


def _seed_hash(key: int, count: int) -> np.ndarray:
    return np.full(count, np.uint64(key & 0xFFFFFFFFFFFFFFFF), dtype=np.uint64)


def _codewords_from_hash(h: np.ndarray, T: int) -> np.ndarray:
    out = np.empty((len(h), T), dtype=complex)
    with np.errstate(over="ignore"):
        for t in range(T):
            u1 = _mix(h ^ np.uint64(2 * t + 1))
            u2 = _mix(h ^ np.uint64(2 * t + 2) ^ _M1)
            a = ((u1 >> np.uint64(11)).astype(float) + 1.0) * 2.0 ** -53
            b = (u2 >> np.uint64(11)).astype(float) * 2.0 ** -53
            r = np.sqrt(-np.log(a))  # radius for CN(0,1)
            out[:, t] = r * np.exp(2j * np.pi * b)
    return out


def hashed_codewords(key: int, symbols: np.ndarray, T: int) -> np.ndarray:
    """Pseudo-random CN(0,1) length-``T`` codewords keyed by integer rows.

    The same ``(key, row)`` always yields the same codeword, so a relay's
    random map exists implicitly over all possible quantized blocks. The row
    hash folds one column at a time, left to right.
    """
    symbols = np.asarray(symbols, dtype=np.int64)
    h = _seed_hash(key, symbols.shape[0])
    for c in range(symbols.shape[1]):
        h = _fold_hash(h, symbols[:, c])
    return _codewords_from_hash(h, T)


@dataclass
class QmfCode:
    T: int
    R_in: float
    codebook: np.ndarray
    node_keys: dict[str, int]

    @property
    def message_count(self) -> int:
        return len(self.codebook)

    def relay_map(self, node: str, quantized: np.ndarray) -> np.ndarray:
        """Codewords for quantized blocks shaped ``(..., T, 2)``."""
        flat = quantized.reshape(-1, 2 * self.T)
        return hashed_codewords(self.node_keys[node], flat, self.T).reshape(quantized.shape[:-2] + (self.T,))


@dataclass
class QmfOutcome:
    trials: int
    errors: int
    error_rate: float
    ci_low: float
    ci_high: float
    T: int
    R_in: float
    records: list = field(default_factory=list)
    flags: np.ndarray | None = None

    def summary(self) -> dict:
        return {
            "scheme": "qmf", "T": self.T, "R_in": self.R_in, "trials": self.trials,
            "errors": self.errors, "error_rate": self.error_rate,
            "ci95": [self.ci_low, self.ci_high],
        }


def _order(net: GaussNetwork, acyclic_ok: bool) -> list[str]:
    layered, layers = is_layered(net)
    relevant = _relevant_nodes(net)
    if layered:
        return sorted(relevant, key=lambda v: (layers[v], net.nodes.index(v)))
    if not acyclic_ok:
        raise ArgumentError("network is not layered; pass acyclic_ok for zero-delay block relaying")
    indeg = {v: 0 for v in relevant}
    for i, j in net.channels:
        if i in relevant and j in relevant:
            indeg[j] += 1
    todo = deque(v for v in net.nodes if v in relevant and indeg[v] == 0)
    order = []
    while todo:
        u = todo.popleft()
        order.append(u)
        for (i, j) in net.channels:
            if i == u and j in relevant:
                indeg[j] -= 1
                if indeg[j] == 0:
                    todo.append(j)
    if len(order) != len(relevant):
        raise ArgumentError("network has a cycle between source and destination")
    return order


def sample_qmf_code(net: GaussNetwork, T: int, R_in: float, rng: np.random.Generator) -> QmfCode:
    count = max(1, math.ceil(2.0 ** (R_in * T) - 1e-9))
    codebook = _cn(rng, (count, T))
    keys = {v: int(rng.integers(0, 2**63)) for v in net.nodes}
    return QmfCode(T, R_in, codebook, keys)


def _propagate(net, code, order, x_source, noise, dest):
    """Signals through the network; ``noise[v]`` broadcasts against the leading axes."""
    sent = {net.source: x_source}
    received = None
    for v in order:
        if v == net.source:
            continue
        y = noise[v].astype(complex, copy=True)
        for (i, j), h in net.channels.items():
            if j == v and i in sent:
                y = y + complex(h[0, 0]) * sent[i]
        if v == dest:
            received = y
            continue
        sent[v] = code.relay_map(v, quantize_array(y))
    return received


def _cell_candidates(mu: np.ndarray, std: float, p_min: float):
    """Per real dimension: plausible quantization cells and their log-probabilities."""
    cands = []
    for m in mu:
        base = int(np.rint(m))
        ks = np.arange(base - 3, base + 4)
        p = ndtr((ks + 0.5 - m) / std) - ndtr((ks - 0.5 - m) / std)
        keep = p >= p_min
        order = np.argsort(-p[keep])
        cands.append((ks[keep][order], np.log(p[keep][order])))
    return cands


def _relay_list(mu: np.ndarray, std: float, budget: int, p_min: float = 1e-3, key: int | None = None):
    """The ``budget`` most likely quantized blocks of one relay.

    ``mu`` lists the noiseless real components in the order a relay map
    hashes them. Beam search ranks prefixes by log-probability plus the best
    possible completion; that bound never undercounts, so every prefix of a
    true top-``budget`` block survives and the result is exact among cells of
    probability at least ``p_min``.

    Returns ``(cells, logprior, hashes)``; ``hashes`` are the relay-map row
    hashes under ``key`` (``None`` without a key).
    """
    cands = _cell_candidates(mu, std, p_min)
    best_rest = np.concatenate([np.cumsum([lp[0] for _, lp in cands][::-1])[::-1], [0.0]])
    logp = np.zeros(1)
    h = None if key is None else _seed_hash(key, 1)
    trail = []
    for d, (ks, lp) in enumerate(cands):
        n = len(ks)
        parent = np.repeat(np.arange(len(logp)), n)
        choice = np.tile(np.arange(n), len(logp))
        logp = logp[parent] + lp[choice]
        if len(logp) > budget:
            keep = np.argpartition(-(logp + best_rest[d + 1]), budget - 1)[:budget]
            parent, choice, logp = parent[keep], choice[keep], logp[keep]
        if h is not None:
            h = _fold_hash(h[parent], ks[choice])
        trail.append((parent, choice))
    cells = np.empty((len(logp), len(cands)), dtype=np.int64)
    idx = np.arange(len(logp))
    for d in range(len(cands) - 1, -1, -1):
        parent, choice = trail[d]
        cells[:, d] = cands[d][0][choice[idx]]
        idx = parent[idx]
    return cells, logp, h


def simulate_qmf(net: GaussNetwork, T: int, R_in: float, trials: int, seed: int = 0,
                 list_budget: int = 2**16, cell_floor: float = 1e-3, acyclic_ok: bool = False, keep_records: bool = False) -> QmfOutcome:
    """Inner-symbol error rate of quantize-map-and-forward relaying.

    The destination scores every message by the likelihood of its quantized
    block, evaluated at cell centres. Relay outputs are unknown to it, so for
    each message it sums over the most likely quantized relay blocks (at most
    ``list_budget`` joint configurations, built from cells of probability at
    least ``cell_floor`` per dimension and mapped through the true relay
    codebooks) and treats the probability mass outside that list as Gaussian
    interference. When the list covers every plausible cell this is the
    exact likelihood. Relays must hear only the source.
    """
    if not net.is_single_antenna():
        raise ArgumentError("QMF simulation needs single-antenna nodes")
    if len(net.nodes) > 5:
        raise ResourceLimitError("QMF simulation supports at most 5 nodes")
    if R_in < 0 or T < 1 or trials < 1:
        raise ArgumentError("need R_in >= 0, T >= 1 and trials >= 1")
    if R_in * T > 16:
        raise ResourceLimitError("message count 2^(R_in T) exceeds 2^16")
    dest = net.destination
    order = _order(net, acyclic_ok)
    relays = [v for v in order if v not in (net.source, dest)]
    gain = {e: complex(h[0, 0]) for e, h in net.channels.items()}
    for r in relays:
        feeds = [i for (i, j) in gain if j == r and i in order]
        if any(i != net.source for i in feeds):
            raise ArgumentError("the QMF decoder supports relays fed by the source only")
    helpers = [r for r in relays if (r, dest) in gain]
    h_sd = gain.get((net.source, dest), 0.0)
    relay_power = sum(abs(gain[(r, dest)]) ** 2 for r in helpers)
    per_relay_budget = max(1, int(list_budget ** (1.0 / max(len(helpers), 1))))
    std = math.sqrt(0.5)

    flags = np.zeros(trials, dtype=bool)
    records = []
    for k in range(trials):
        rng = np.random.default_rng([int(seed), int(k)])
        code = sample_qmf_code(net, T, R_in, rng)
        M = code.message_count
        w = int(rng.integers(M))
        noise = {v: _cn(rng, (T,)) for v in order if v != net.source}
        y = _propagate(net, code, order, code.codebook[w], noise, dest)
        if M == 1:
            decoded = 0
        elif y is None:
            decoded = -1
        else:
            c = quantize_array(y)
            obs = c[..., 0] + 1j * c[..., 1]
            scores = np.empty(M)
            for u in range(M):
                x = code.codebook[u]
                direct = h_sd * x
                terms = []
                if helpers:
                    mean = np.broadcast_to(direct, (1, T))
                    logprior = np.zeros(1)
                    for r in helpers:
                        mu = gain[(net.source, r)] * x
                        flat = np.stack([mu.real, mu.imag], axis=-1).ravel()
                        _, lp, hashes = _relay_list(flat, std, per_relay_budget, cell_floor, code.node_keys[r])
                        xr = _codewords_from_hash(hashes, T)
                        mean = (mean[:, None, :] + gain[(r, dest)] * xr[None, :, :]).reshape(-1, T)
                        logprior = (logprior[:, None] + lp[None, :]).ravel()
                    terms.append(logprior - np.sum(np.abs(obs - mean) ** 2, axis=1))
                    covered = float(np.exp(logsumexp(logprior)))
                    if covered < 1.0:
                        spread = 1.0 + relay_power
                        terms.append(np.array([
                            math.log1p(-covered) - np.sum(np.abs(obs - direct) ** 2) / spread - T * math.log(spread)
                        ]))
                    scores[u] = logsumexp(np.concatenate(terms))
                else:
                    scores[u] = -np.sum(np.abs(obs - direct) ** 2)
            decoded = int(np.argmax(scores))
        flags[k] = decoded != w
        if keep_records:
            records.append((k, w, decoded, int(flags[k])))
    errors = int(flags.sum())
    lo, hi = _wilson(errors, trials)
    return QmfOutcome(trials, errors, errors / trials, lo, hi, T, R_in, records, flags)


def _wilson(k, n, z=1.959963984540054):
    p = k / n
    den = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    return max(0.0, centre - half), min(1.0, centre + half)


def paired_improvement(a: np.ndarray, b: np.ndarray, z: float = 1.959963984540054) -> tuple[float, float, float]:
    """Mean and normal-approximation CI of per-trial error differences ``a - b``."""
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    mean = float(d.mean())
    se = float(d.std(ddof=1) / math.sqrt(len(d))) if len(d) > 1 else 0.0
    return mean, mean - z * se, mean + z * se
