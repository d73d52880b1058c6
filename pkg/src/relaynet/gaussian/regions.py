"""Two-user MAC and BC: Gaussian regions against their deterministic models."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ArgumentError
from .mimo import snr_to_levels


def mac_contains(r1: float, r2: float, snr1: float, snr2: float, tol: float = 1e-12) -> bool:
    return (
        r1 <= math.log2(1 + snr1) + tol
        and r2 <= math.log2(1 + snr2) + tol
        and r1 + r2 <= math.log2(1 + snr1 + snr2) + tol
    )


def bc_contains(r1: float, r2: float, snr1: float, snr2: float, tol: float = 1e-12) -> bool:
    """Degraded BC with user 1 strong: superposition with a power split.

    For a target ``r1`` the smallest sufficient power share for user 1 is
    unique, which fixes the largest feasible ``r2``.
    """
    if r1 > math.log2(1 + snr1) + tol:
        return False
    share = (2.0 ** max(r1, 0.0) - 1) / snr1 if snr1 > 0 else 0.0
    share = min(max(share, 0.0), 1.0)
    r2_max = math.log2(1 + (1 - share) * snr2 / (1 + share * snr2))
    return r2 <= r2_max + tol


def det_boundary(n1: int, n2: int, points: int = 65) -> list[tuple[float, float]]:
    """Dominant boundary of ``{R2 <= n2, R1 + R2 <= n1}`` with ``n1 >= n2``."""
    pts = [(float(n1), 0.0)]
    for r2 in np.linspace(0.0, n2, points):
        pts.append((n1 - r2, r2))
    pts.append((0.0, float(n2)))
    return pts


def shortfall(point, contains, snr1, snr2, tol: float = 1e-12) -> float:
    """Smallest ``d >= 0`` with ``((R1 - d)^+, (R2 - d)^+)`` inside the region."""
    r1, r2 = point
    if contains(r1, r2, snr1, snr2):
        return 0.0
    lo, hi = 0.0, max(r1, r2)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if contains(max(r1 - mid, 0.0), max(r2 - mid, 0.0), snr1, snr2):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass
class RegionGapReport:
    n1: int
    n2: int
    mac_gap: float
    bc_gap: float
    mac_worst: tuple[float, float]
    bc_worst: tuple[float, float]
    bc_corner: tuple[int, int]


def region_gap_mac_bc(snr1: float, snr2: float, points: int = 65) -> RegionGapReport:
    """Largest per-user shortfall of the Gaussian MAC and BC regions.

    Each point on the deterministic boundary (levels ``ceil(log2 SNR)^+``)
    is pulled back equally in both coordinates until it lies inside the
    Gaussian region; the largest pull-back is reported.
    """
    if snr2 < 0 or snr1 < snr2:
        raise ArgumentError("need snr1 >= snr2 >= 0")
    n1 = snr_to_levels(snr1, "complex")
    n2 = snr_to_levels(snr2, "complex")
    best = {"mac": (0.0, (0.0, 0.0)), "bc": (0.0, (0.0, 0.0))}
    for p in det_boundary(n1, n2, points):
        for key, fn in (("mac", mac_contains), ("bc", bc_contains)):
            s = shortfall(p, fn, snr1, snr2)
            if s > best[key][0]:
                best[key] = (s, p)
    return RegionGapReport(n1, n2, best["mac"][0], best["bc"][0], best["mac"][1], best["bc"][1],
                           (n1 - n2, n2))
