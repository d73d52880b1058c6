"""Single-relay and diamond rates under the complex convention (log base 2)."""

from __future__ import annotations

import csv
import itertools
import math

import numpy as np

_GOLDEN = (math.sqrt(5) - 1) / 2


def _lg(x: float) -> float:
    return math.log2(1.0 + x)


def golden_max(f, lo: float, hi: float, tol: float = 1e-9) -> tuple[float, float]:
    """Maximize a unimodal function on ``[lo, hi]``; returns (argmax, max)."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    best = max([(f(a), a), (f(b), b), (fc, c), (fd, d)])
    return best[1], best[0]


def df_rate_relay(h_sd, h_sr, h_rd) -> float:
    """Decode-forward rate, taking the better of direct transmission and relaying."""
    sd, sr, rd = abs(h_sd) ** 2, abs(h_sr) ** 2, abs(h_rd) ** 2
    return max(_lg(sd), min(_lg(sr), _lg(sd + rd)))


def relay_cutset(h_sd, h_sr, h_rd, tol: float = 1e-9) -> float:
    """Cut-set bound of the single relay channel, maximized over the correlation."""
    sd, sr, rd = abs(h_sd) ** 2, abs(h_sr) ** 2, abs(h_rd) ** 2
    coh = math.sqrt(sd * rd)

    def value(rho):
        return min(_lg((1 - rho * rho) * (sd + sr)), _lg(sd + rd + 2 * rho * coh))

    # broadcast term falls and MAC term rises in rho, so the min is unimodal
    _, best = golden_max(value, 0.0, 1.0, tol)
    return max(best, value(0.0))


def diamond_cutset(h_sa1, h_sa2, h_a1d, h_a2d) -> float:
    """Four-cut upper bound on the two-relay diamond (coherent relay combining)."""
    s1, s2 = abs(h_sa1) ** 2, abs(h_sa2) ** 2
    d1, d2 = abs(h_a1d) ** 2, abs(h_a2d) ** 2
    return min(
        _lg(s1 + s2),
        _lg((abs(h_a1d) + abs(h_a2d)) ** 2),
        _lg(s1) + _lg(d2),
        _lg(s2) + _lg(d1),
    )


def pdf_rate_diamond(h_sa1, h_sa2, h_a1d, h_a2d) -> float:
    """Partial decode-forward rate on the diamond.

    Relays are relabelled so the first has the stronger source link. If that
    relay's outgoing link is at least as strong, routing everything through
    it is used. Otherwise the message is split: the first relay carries what
    its weaker outgoing link supports and the remainder is superposed for the
    second relay. The result never falls below the best single-relay route.
    """
    s1, s2 = abs(h_sa1) ** 2, abs(h_sa2) ** 2
    d1, d2 = abs(h_a1d) ** 2, abs(h_a2d) ** 2
    if s1 < s2:
        s1, s2, d1, d2 = s2, s1, d2, d1
    single = max(min(_lg(s1), _lg(d1)), min(_lg(s2), _lg(d2)))
    if s1 <= d1:
        rate = _lg(s1)
    else:
        alpha = d1 / s1
        split = math.log2((1 + s2) * (1 + d1) / (alpha * s2 + 1))
        rate = min(split, _lg(d1 + d2))
    return max(rate, single)


def df_rate_diamond_upper(h_sa1, h_sa2, h_a1d, h_a2d) -> float:
    """Upper bound on decode-forward over any non-empty set of decoding relays.

    Every relay in the set must decode the full message, and the set then
    sends it coherently to the destination.
    """
    s = [abs(h_sa1) ** 2, abs(h_sa2) ** 2]
    h = [abs(h_a1d), abs(h_a2d)]
    best = 0.0
    for k in (1, 2):
        for group in itertools.combinations(range(2), k):
            bc = min(_lg(s[i]) for i in group)
            mac = _lg(sum(h[i] for i in group) ** 2)
            best = max(best, min(bc, mac))
    return best


def af_rate_diamond(h_sa1, h_sa2, h_a1d, h_a2d) -> float:
    """Amplify-forward diamond rate with phase-aligned relays (illustrative).

    Each relay scales its received signal to unit power; the destination sees
    the coherently combined signal plus both relays' forwarded noise.
    """
    sa = [abs(h_sa1), abs(h_sa2)]
    ad = [abs(h_a1d), abs(h_a2d)]
    beta = [1.0 / math.sqrt(1.0 + x * x) for x in sa]
    signal = sum(a * b * s for a, b, s in zip(ad, beta, sa)) ** 2
    noise = 1.0 + sum((a * b) ** 2 for a, b in zip(ad, beta))
    return _lg(signal / noise)


def skewed_diamond_gains(a: float) -> tuple[float, float, float, float]:
    """Diamond magnitudes with squared gains a^3, a^2, a, a^3 (S-A1, S-A2, A1-D, A2-D)."""
    return (a ** 1.5, a, a ** 0.5, a ** 1.5)


# --------------------------------------------------------------------------
# decode-forward gap surface


def df_gap_surface(x_range=(-20.0, 60.0), y_range=(-20.0, 60.0), step: float = 1.0,
                   sd_db: float = 20.0):
    """Cut-set minus decode-forward over a dB grid.

    ``x`` is the relay-destination gain and ``y`` the source-relay gain, both
    relative to the direct link, whose own SNR is ``sd_db``.

    Returns
    -------
    xs, ys : ndarray
        Grid axes in dB.
    gap : ndarray, shape (len(ys), len(xs))
        ``gap[i, j]`` at ``(xs[j], ys[i])``.
    """
    xs = _axis(x_range, step)
    ys = _axis(y_range, step)
    sd = 10 ** (sd_db / 10)
    h_sd = math.sqrt(sd)
    gap = np.empty((len(ys), len(xs)))
    for i, y in enumerate(ys):
        h_sr = math.sqrt(sd * 10 ** (y / 10))
        for j, x in enumerate(xs):
            h_rd = math.sqrt(sd * 10 ** (x / 10))
            gap[i, j] = relay_cutset(h_sd, h_sr, h_rd) - df_rate_relay(h_sd, h_sr, h_rd)
    return xs, ys, gap


def _axis(rng, step) -> np.ndarray:
    lo, hi = rng
    if step <= 0:
        raise ValueError("step must be positive")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def write_gap_csv(path_or_file, xs, ys, gap):
    """Row-major CSV: ``y`` outer, ``x`` inner, header ``x_db,y_db,gap``."""
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x_db", "y_db", "gap"])
        for i, y in enumerate(ys):
            for j, x in enumerate(xs):
                w.writerow([f"{x:.9g}", f"{y:.9g}", f"{gap[i, j]:.9g}"])
    finally:
        if own:
            fh.close()
