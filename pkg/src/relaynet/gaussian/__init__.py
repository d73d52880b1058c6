"""Gaussian-network bounds, relaying rates and their constant-gap checks."""

from .fading import ErgodicResult, OutageResult, ergodic_cutset, outage_curve, rayleigh_sampler
from .halfduplex import ModeSchedule, enumerate_modes, half_duplex_cutset
from .lowrate import max_flow, orthogonal_routing_bound, support_degree
from .lp import simplex_max
from .mimo import (
    GaussCutsetResult,
    MimoCutChannel,
    cutset_bounds,
    gram_eigenvalues,
    iid_capacity,
    mimo_capacity,
    snr_to_levels,
    waterfill,
)
from .regions import RegionGapReport, region_gap_mac_bc
from .relays import (
    af_rate_diamond,
    df_gap_surface,
    df_rate_diamond_upper,
    df_rate_relay,
    diamond_cutset,
    skewed_diamond_gains,
    pdf_rate_diamond,
    relay_cutset,
    write_gap_csv,
)
