"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run under pytest (lines are repeated in the terminal summary) or directly
with ``python tests/test_acceptance.py``.
"""

import io
import math
import time

import numpy as np
import pytest

from relaynet.detcap import (
    diamond_closed_form, lff_mimo_capacity, min_cut_capacity, relay_closed_form, unfolded_capacity,
)
from relaynet.detsim import estimate_error
from relaynet.gaussian import (
    cutset_bounds, df_gap_surface, df_rate_diamond_upper, df_rate_relay, diamond_cutset, enumerate_modes,
    skewed_diamond_gains, half_duplex_cutset, mimo_capacity, orthogonal_routing_bound, pdf_rate_diamond,
    region_gap_mac_bc, relay_cutset, snr_to_levels, support_degree, write_gap_csv,
)
from relaynet.netmodel import det_network, gauss_network
from relaynet.qmf import (
    chernoff_event_check, cond_entropy_quantized, entropy_bound_constant, mi_gap_check, paired_improvement,
    quantization_mi_constant, simulate_qmf,
)

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script from elsewhere
    ACCEPTANCE_LINES = []

SEED = 24301


def report(number, title, ok, detail, elapsed, budget):
    timed = elapsed < budget
    status = "PASS" if ok and timed else "FAIL"
    line = f"AC{number:02d} {status}  {title}: {detail}; {elapsed:.1f}s (limit {budget:g}s)"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line
    assert timed, line


def crandn(rng, shape=()):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)


def random_gauss_net(rng, n_nodes, p_edge=0.6):
    nodes = ["S"] + [f"v{k}" for k in range(n_nodes - 2)] + ["D"]
    ch = {}
    for i in nodes:
        for j in nodes:
            if i != j and j != "S" and i != "D" and rng.random() < p_edge:
                ch[(i, j)] = crandn(rng) * 10 ** rng.uniform(-1, 2)
    return gauss_network(ch, nodes=nodes)


# ------------------------------------------------------------------ 1


def test_ac01_deterministic_closed_forms():
    t0 = time.perf_counter()
    bad = []
    r = range(7)
    for sr in r:
        for sd in r:
            for rd in r:
                net = det_network({("S", "R"): sr, ("S", "D"): sd, ("R", "D"): rd}, nodes=["S", "R", "D"])
                got = min_cut_capacity(net).value
                # independent two-cut formula alongside the packaged closed form
                direct = min(max(sr, sd), max(sd, rd))
                if not (got == relay_closed_form(sr, sd, rd) == direct):
                    bad.append(("relay", sr, sd, rd, got))
    for a in r:
        for b in r:
            for c in r:
                for d in r:
                    net = det_network({("S", "A"): a, ("S", "B"): b, ("A", "D"): c, ("B", "D"): d},
                                      nodes=["S", "A", "B", "D"])
                    got = min_cut_capacity(net).value
                    direct = min(max(a, b), max(c, d), a + d, b + c)
                    if not (got == diamond_closed_form(a, b, c, d) == direct):
                        bad.append(("diamond", a, b, c, d, got))
    report(1, "deterministic min-cut equals closed forms", not bad,
           f"{7 ** 3} relay + {7 ** 4} diamond cases, {len(bad)} mismatches", time.perf_counter() - t0, 10)


# ------------------------------------------------------------------ 2


def two_by_two_real(k):
    h = 2.0 ** k * np.array([[0.75, 1.0], [1.0, 1.0]])
    return gauss_network({("S", "D"): h}, tx_antennas={"S": 2}, rx_antennas={"D": 2}, convention="real")


def eigen_oracle(h, total):
    a = h @ h.T
    tr, det = np.trace(a), np.linalg.det(a)
    disc = math.sqrt(tr * tr / 4 - det)
    l1, l2 = tr / 2 + disc, tr / 2 - disc
    grid = np.linspace(0, total, 200001)
    return 0.5 * float(np.max(np.log2(1 + grid * l1) + np.log2(1 + (total - grid) * l2)))


def test_ac02_mimo_lff_gap_grows():
    t0 = time.perf_counter()
    rows = []
    ok = True
    for k in range(3, 13):
        net = two_by_two_real(k)
        h = net.channels[("S", "D")].real
        levels = [[snr_to_levels(x * x, "real") for x in row] for row in h]
        lff = lff_mimo_capacity(levels)
        upper = cutset_bounds(net).upper
        oracle = eigen_oracle(h, 2.0)
        ok &= lff == k and abs(upper - oracle) <= 0.5 and upper - lff >= k - 2
        rows.append(f"k={k}:{upper - lff:.2f}")
    report(2, "Gaussian upper minus LFF capacity >= k-2", ok, " ".join(rows), time.perf_counter() - t0, 5)


# ------------------------------------------------------------------ 3


def test_ac03_relay_gap_surface(tmp_path):
    t0 = time.perf_counter()
    xs, ys, gap = df_gap_surface((-20, 60), (-20, 60), 1.0)
    out = tmp_path / "surface.csv"
    write_gap_csv(str(out), xs, ys, gap)
    lines = out.read_text().splitlines()
    in_range = bool(np.all(gap >= 0) and np.all(gap <= 1 + 1e-9))
    i, j = np.unravel_index(np.argmax(gap), gap.shape)
    # x: relay-destination gain over the direct link, y: source-relay gain over the direct link
    on_coincidence_line = xs[j] == 0 or ys[i] == 0
    row_max = gap[list(ys).index(0.0)].max()
    ok = (gap.shape == (81, 81) and len(lines) == 81 * 81 + 1 and in_range and on_coincidence_line
          and row_max >= gap.max() - 0.01)
    detail = (f"max {gap.max():.4f} at (x={xs[j]:g} dB, y={ys[i]:g} dB), source-relay = direct row max "
              f"{row_max:.4f}, min {gap.min():.2e}, csv rows {len(lines) - 1}")
    report(3, "relay cut-set minus decode-forward surface", ok, detail, time.perf_counter() - t0, 30)


# ------------------------------------------------------------------ 4


def test_ac04_diamond_partial_decode_within_one_bit():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst = -1.0
    lowest = 1.0
    for _ in range(10 ** 4):
        db = rng.uniform(-20, 60, 4)
        h = 10 ** (db / 20) * np.exp(2j * math.pi * rng.random(4))
        g = diamond_cutset(*h) - pdf_rate_diamond(*h)
        worst = max(worst, g)
        lowest = min(lowest, g)
    ok = worst <= 1 + 1e-9 and lowest >= -1e-9
    report(4, "diamond cut-set minus partial decode-forward", ok,
           f"10000 draws, max gap {worst:.6f}, min gap {lowest:.2e}", time.perf_counter() - t0, 30)


# ------------------------------------------------------------------ 5


def test_ac05_diamond_decode_forward_falls_behind():
    t0 = time.perf_counter()
    rows = []
    ok = True
    for a in (10.0, 100.0, 1000.0):
        g = skewed_diamond_gains(a)
        diff = diamond_cutset(*g) - df_rate_diamond_upper(*g)
        ok &= diff >= math.log2(a) - 3
        rows.append(f"a={a:g}: {diff:.3f} >= {math.log2(a) - 3:.3f}")
    report(5, "diamond cut-set minus decode-forward >= log2 a - 3", ok, ", ".join(rows),
           time.perf_counter() - t0, 1)


# ------------------------------------------------------------------ 6


def test_ac06_waterfilling_gain_bounded():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst_hi = 0.0
    worst_lo = 0.0
    ok = True
    for _ in range(1000):
        n, m = rng.integers(1, 7, 2)
        g = crandn(rng, (n, m)) * 10 ** rng.uniform(-2, 3)
        diff = mimo_capacity(g) - mimo_capacity(g, "equal_power")
        ok &= -1e-9 <= diff <= min(m, n) + 1e-9
        worst_hi = max(worst_hi, diff - min(m, n))
        worst_lo = min(worst_lo, diff)
    report(6, "0 <= water-filled minus equal-power <= min(m,n)", ok,
           f"1000 matrices, max excess over min(m,n) {worst_hi:.3f}, min difference {worst_lo:.2e}",
           time.perf_counter() - t0, 10)


# ------------------------------------------------------------------ 7


def test_ac07_upper_within_node_count_of_iid():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst = -math.inf
    ok = True
    for _ in range(200):
        net = random_gauss_net(rng, int(rng.integers(2, 7)))
        res = cutset_bounds(net)
        slack = res.upper - res.iid - len(net.nodes)
        ok &= slack <= 1e-9 and res.upper >= res.iid - 1e-9
        worst = max(worst, slack)
    report(7, "cut-set upper minus iid <= node count", ok,
           f"200 networks, max (upper - iid - |V|) {worst:.3f}", time.perf_counter() - t0, 60)


# ------------------------------------------------------------------ 8


def random_det_net(rng, n_nodes):
    nodes = ["S"] + [f"v{k}" for k in range(n_nodes - 2)] + ["D"]
    edges = {}
    for i in nodes:
        for j in nodes:
            if i != j and j != "S" and i != "D" and rng.random() < 0.6:
                edges[(i, j)] = int(rng.integers(1, 5))
    return det_network(edges, nodes=nodes)


def test_ac08_unfolding_sandwich():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    failures = 0
    checked = 0
    for _ in range(50):
        net = random_det_net(rng, int(rng.integers(2, 5)))
        cbar = min_cut_capacity(net).value
        nv = len(net.nodes)
        for K in (2, 4, 6):
            val = unfolded_capacity(net, K, cbar)
            checked += 1
            if not ((K - nv) * cbar <= val <= K * cbar):
                failures += 1
    report(8, "unfolded min-cut sandwich", failures == 0, f"{checked} (net, K) cases, {failures} violations",
           time.perf_counter() - t0, 60)


# ------------------------------------------------------------------ 9


def test_ac09_random_linear_code_error_bound():
    t0 = time.perf_counter()
    nets = [
        ("relay(3,2,3)", det_network({("S", "R"): 3, ("S", "D"): 2, ("R", "D"): 3}, nodes=["S", "R", "D"]), True),
        ("diamond(3,2,2,3)", det_network({("S", "A"): 3, ("S", "B"): 2, ("A", "D"): 2, ("B", "D"): 3},
                                         nodes=["S", "A", "B", "D"]), False),
    ]
    rows = []
    ok = True
    trials = 10 ** 4
    for name, net, acyclic in nets:
        cbar = min_cut_capacity(net).value
        res = estimate_error(net, 8, cbar - 1, trials, seed=SEED, acyclic_ok=acyclic)
        sigma = math.sqrt(res.bound * (1 - res.bound) / trials)
        ok &= res.p_hat <= res.bound + 3 * sigma
        rows.append(f"{name} R={cbar - 1:g}: {res.p_hat:.4f} <= {res.bound:.4f} + 3*{sigma:.4f}")
    report(9, "random linear relaying error within analytical bound", ok, "; ".join(rows),
           time.perf_counter() - t0, 120)


# ------------------------------------------------------------------ 10


def test_ac10_quantization_constants():
    t0 = time.perf_counter()
    c1 = entropy_bound_constant()
    c2 = quantization_mi_constant()
    laws = {
        "constant": lambda rng, n: np.full(n, 3.3 - 1.7j),
        "gauss var 1": lambda rng, n: crandn(rng, n),
        "gauss var 1e4": lambda rng, n: 100 * crandn(rng, n),
        "uniform [-50,50]^2": lambda rng, n: rng.uniform(-50, 50, n) + 1j * rng.uniform(-50, 50, n),
    }
    ok = abs(c1 - 5.89) <= 0.01 and abs(c2 - 6.55) <= 0.01 and abs(c2 - math.log2(11 * math.pi * math.e)) < 1e-12
    parts = [f"constants {c1:.4f}, {c2:.4f}"]
    for k, (name, sampler) in enumerate(laws.items()):
        est = cond_entropy_quantized(sampler, samples=10 ** 6, seed=SEED + k)
        ok &= est.h_noisy_given_clean <= 12 and est.h_noisy_given_clean_real <= 6
        parts.append(f"{name}: {est.h_noisy_given_clean:.3f} bits")
    report(10, "quantization constants and conditional entropy <= 12 bits", ok, ", ".join(parts),
           time.perf_counter() - t0, 120)


# ------------------------------------------------------------------ 11


def test_ac11_mutual_information_gaps():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    mats = [np.zeros((1, 1)), np.array([[10.0]])]
    for _ in range(3):
        mats.append(10 * rng.uniform(0, 1, (1, 1)) * np.exp(2j * math.pi * rng.random((1, 1))))
    mats.append(np.zeros((2, 2)))
    mats.append(10 * np.eye(2))
    for _ in range(3):
        mats.append(10 * rng.uniform(0, 1, (2, 2)) * np.exp(2j * math.pi * rng.random((2, 2))))
    ok = True
    worst = [0.0, 0.0, 0.0]
    for k, G in enumerate(mats):
        rep = mi_gap_check(G, samples=10 ** 6, seed=SEED + k)
        ok &= all(rep.within_bounds())
        gaps = (rep.gap_gauss_trunc, rep.gap_quant_trunc, rep.gap_gauss_quant)
        worst = [max(w, g / rep.n) for w, g in zip(worst, gaps)]
    report(11, "quantized mutual-information gaps within 19n/12n/7n", ok,
           f"{len(mats)} matrices, worst gaps per n {worst[0]:.3f}/{worst[1]:.3f}/{worst[2]:.3f}",
           time.perf_counter() - t0, 300)


# ------------------------------------------------------------------ 12


def test_ac12_small_output_event_bound():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    ok = True
    parts = []
    for k in range(20):
        n, m = rng.integers(1, 4, 2)
        T = int(rng.integers(1, 9))
        H = crandn(rng, (n, m)) * 10 ** rng.uniform(0, 1)
        rep = chernoff_event_check(H, T, trials=10 ** 5, seed=SEED + k)
        ok &= rep.holds
        if not rep.holds:
            parts.append(f"({n}x{m}, T={T}): {rep.p_hat:.4f} > {rep.bound:.4f}")
    report(12, "small-output event probability within exponential bound", ok,
           "20 (H, T) pairs" + (", violations " + "; ".join(parts) if parts else ", no violations"),
           time.perf_counter() - t0, 300)


# ------------------------------------------------------------------ 13


def test_ac13_half_duplex_symmetric_relay():
    t0 = time.perf_counter()
    snr = 15.0
    h = math.sqrt(snr)
    net = gauss_network({("S", "R"): h, ("R", "D"): h}, nodes=["S", "R", "D"])
    value, _ = half_duplex_cutset(net)
    expect = 0.5 * math.log2(1 + snr)
    counts_ok = True
    for n in range(3, 7):
        nodes = ["S"] + [f"v{k}" for k in range(n - 2)] + ["D"]
        counts_ok &= len(enumerate_modes(gauss_network({("S", "D"): 1.0}, nodes=nodes))) == 2 ** (n - 2)
    ok = abs(value - expect) <= 1e-6 and counts_ok
    report(13, "half-duplex schedule optimum and mode count", ok,
           f"LP {value:.9f} vs time-split {expect:.9f}, mode counts {'ok' if counts_ok else 'wrong'}",
           time.perf_counter() - t0, 1)


# ------------------------------------------------------------------ 14


def test_ac14_orthogonal_routing_guarantee():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst = math.inf
    violations = 0
    for _ in range(100):
        net = random_gauss_net(rng, int(rng.integers(2, 7)))
        d = support_degree(net)
        guarantee = cutset_bounds(net).upper / (2 * d * (d + 1)) if d else 0.0
        margin = orthogonal_routing_bound(net) - guarantee
        worst = min(worst, margin)
        violations += margin < -1e-9
    report(14, "orthogonal routing rate >= cut-set upper / 2d(d+1)", violations == 0,
           f"100 networks, {violations} violations, worst margin {worst:.3e}", time.perf_counter() - t0, 30)


# ------------------------------------------------------------------ 15


def test_ac15_qmf_block_length_improvement():
    t0 = time.perf_counter()
    parts = []
    ok = True
    relay = gauss_network({("S", "R"): math.sqrt(7), ("S", "D"): 1.0, ("R", "D"): 10.0}, nodes=["S", "R", "D"])
    p2p = gauss_network({("S", "D"): math.sqrt(8)})
    for name, net, acyclic in (("point-to-point", p2p, False), ("relay", relay, True)):
        zero = simulate_qmf(net, 2, 0.0, 200, seed=SEED, acyclic_ok=acyclic)
        ok &= zero.errors == 0
        parts.append(f"{name} rate 0: {zero.errors} errors")
    cases = (
        ("point-to-point", p2p, False, 1.0, (2, 4, 8), 4000),
        ("relay", relay, True, 0.5, (1, 2, 4), 1000),
    )
    for name, net, acyclic, R, blocks, trials in cases:
        ok &= R < cutset_bounds(net).iid - 2
        flags = [simulate_qmf(net, T, R, trials, seed=SEED, acyclic_ok=acyclic).flags for T in blocks]
        rates = [f.mean() for f in flags]
        for (Ta, fa), (Tb, fb) in zip(zip(blocks, flags), zip(blocks[1:], flags[1:])):
            mean, lo, hi = paired_improvement(fa, fb)
            ok &= lo > 0
            parts.append(f"{name} T {Ta}->{Tb}: drop {mean:.4f} CI [{lo:.4f},{hi:.4f}]")
        parts.append(f"{name} R={R:g} rates " + "/".join(f"{r:.4f}" for r in rates))
    report(15, "QMF error falls as the block length doubles", ok, "; ".join(parts),
           time.perf_counter() - t0, 600)


# ------------------------------------------------------------------ 16


def test_ac16_one_bit_region_containment():
    t0 = time.perf_counter()
    snrs = 10 ** (np.linspace(0, 60, 40) / 10)
    cache = {}
    mac = bc = 0.0
    bc_worst = None
    bc_count = 0
    for a in range(40):
        for b in range(40):
            key = (max(a, b), min(a, b))
            if key not in cache:
                cache[key] = region_gap_mac_bc(snrs[key[0]], snrs[key[1]])
            rep = cache[key]
            mac = max(mac, rep.mac_gap)
            bc_count += rep.bc_gap > 1 + 1e-9
            if rep.bc_gap > bc:
                bc, bc_worst = rep.bc_gap, (10 * math.log10(snrs[key[0]]), 10 * math.log10(snrs[key[1]]))
    ok = mac <= 1 + 1e-9 and bc <= 1 + 1e-9
    detail = (f"40x40 grid 0..60 dB, MAC max shortfall {mac:.4f}, BC max shortfall {bc:.4f}"
              f" at ({bc_worst[0]:.1f} dB, {bc_worst[1]:.1f} dB), BC points over 1 bit: {bc_count}")
    report(16, "per-user shortfall of Gaussian vs deterministic MAC and BC <= 1 bit", ok, detail,
           time.perf_counter() - t0, 10)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
