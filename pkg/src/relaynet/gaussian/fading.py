"""Monte Carlo wrappers over random channel realizations."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ArgumentError
from ..netmodel import GaussNetwork
from .mimo import cutset_bounds


def _trial_rng(seed, trial):
    return np.random.default_rng([int(seed), int(trial)])


def rayleigh_sampler(net: GaussNetwork):
    """Entry-wise Rayleigh fading around the template's channel magnitudes."""
    edges = list(net.channels)

    def draw(rng):
        out = {}
        for e in edges:
            h = net.channels[e]
            z = (rng.standard_normal(h.shape) + 1j * rng.standard_normal(h.shape)) / math.sqrt(2)
            out[e] = np.abs(h) * z
        return out

    return draw


@dataclass
class ErgodicResult:
    mean: float
    stderr: float
    ci_low: float
    ci_high: float
    samples: np.ndarray


def sample_cutset(net: GaussNetwork, sampler, trials: int, seed: int) -> np.ndarray:
    if trials < 1:
        raise ArgumentError("trials must be at least 1")
    vals = np.empty(trials)
    for k in range(trials):
        vals[k] = cutset_bounds(net.with_channels(sampler(_trial_rng(seed, k)))).upper
    return vals


def ergodic_cutset(net: GaussNetwork, sampler, trials: int, seed: int = 0) -> ErgodicResult:
    vals = sample_cutset(net, sampler, trials, seed)
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return ErgodicResult(mean, se, mean - 1.96 * se, mean + 1.96 * se, vals)


@dataclass
class OutageResult:
    rates: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    margin: float


def outage_curve(net: GaussNetwork, sampler, rates, margin: float, trials: int, seed: int = 0) -> OutageResult:
    """Empirical P(C̄ < R) and P(C̄ < R + margin), which bracket the outage probability."""
    if margin < 0:
        raise ArgumentError("margin must be non-negative")
    vals = sample_cutset(net, sampler, trials, seed)
    rates = np.asarray(rates, dtype=float)
    lower = np.array([(vals < r).mean() for r in rates])
    upper = np.array([(vals < r + margin).mean() for r in rates])
    return OutageResult(rates, lower, upper, margin)
