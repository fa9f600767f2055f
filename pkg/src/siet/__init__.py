"""Finite-blocklength bounds for simultaneous information and energy transmission.

Layered circular constellations, constant-composition codes, a nonlinear
harvester energy model, impossibility and achievability bounds, and a
seedable AWGN Monte Carlo simulator to check the closed forms against.
"""

from .achievability import (
    AchievabilityReport,
    achievability_report,
    dep_circular_decoder,
    dep_equal_radius,
    min_equal_radius,
)
from .channel import CIRCULAR, MIN_DISTANCE, NO_DECODE, ChannelParams, DepEstimate, estimate_dep
from .code import Codebook, CodeSpec, LayerProbabilities, TypeVector, build_codebook
from .constellation import Constellation, Layer, validate
from .energy import EnergyProfile, HarvesterModel, eop, energy_profile
from .impossibility import ImpossibilityReport, dep_lower_bound, energy_rate_cap, impossibility_report

__version__ = "0.1.0"
