"""Impossibility bounds for constant-composition codes over a fixed constellation.

Every function is a plain formula evaluation; nothing is optimized here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .code import LayerProbabilities, TypeVector
from .constellation import Constellation
from .energy import EnergyProfile, eop
from .errors import DegenerateConstellation, ZeroTypeEntry
from .numerics import entropy_nats, log_multinomial, log_q_function, nats_to_bits

LN_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _as_type(code_type, constellation_or_counts) -> TypeVector:
    if isinstance(code_type, TypeVector):
        return code_type
    counts = getattr(constellation_or_counts, "counts", constellation_or_counts)
    if not isinstance(code_type, LayerProbabilities):
        code_type = LayerProbabilities(tuple(code_type))
    return code_type.to_type(counts)


def farthest_symbol_distances(constellation: Constellation) -> np.ndarray:
    """For each symbol, the distance to the farthest other symbol."""
    x = constellation.points
    if x.size < 2:
        raise DegenerateConstellation("need at least two symbols")
    d = np.abs(x[:, None] - x[None, :])
    return d.max(axis=1)


def dep_lower_bound_raw(constellation, code_type, n: int, M, sigma2: float) -> float:
    """(M-1) * Q(sqrt(sum_l n P(x_l) |x_l - xbar_l|^2 / (2 sigma^2))), unclamped.

    ``xbar_l`` is the symbol farthest from ``x_l``. Evaluated in the log
    domain so that astronomically large M does not overflow before the
    tail probability is applied.
    """
    if sigma2 <= 0:
        raise ValueError("noise variance must be positive")
    if not M >= 2:
        raise ValueError("the bound needs M >= 2")
    t = _as_type(code_type, constellation)
    dist = farthest_symbol_distances(constellation)
    energy = float(np.sum(n * np.asarray(t.freqs) * dist**2))
    arg = math.sqrt(energy / (2.0 * sigma2))
    log_raw = math.log(M - 1) + log_q_function(arg) if math.isfinite(M) else math.inf
    return math.exp(log_raw) if log_raw < 709.0 else math.inf


def dep_lower_bound(constellation, code_type, n: int, M, sigma2: float) -> float:
    return min(1.0, dep_lower_bound_raw(constellation, code_type, n, M, sigma2))


def rate_upper_exact(n: int, code_type: TypeVector) -> float:
    """(1/n) log2(n! / prod_l (n P(x_l))!) in bits per channel use."""
    return nats_to_bits(log_multinomial(n, code_type.counts(n))) / n


def rate_alphabet_cap(num_symbols: int) -> float:
    """log2 L: no code over L symbols can exceed it."""
    return math.log2(num_symbols)


def rate_upper_stirling_nats(n: int, code_type: TypeVector) -> float:
    P = np.asarray(code_type.freqs, dtype=float)
    if np.any(P <= 0):
        raise ZeroTypeEntry("the relaxed rate bound needs every type entry > 0")
    code_type.counts(n)
    L = P.size
    H = entropy_nats(P)
    second = (1.0 / 12.0 - np.sum(1.0 / (12.0 * P + 1.0))) / n**2
    first = (LN_SQRT_2PI - np.sum(0.5 * np.log(2.0 * math.pi * P))) / n
    log_term = (math.log(n) / n) * (L - 1) / 2.0
    return float(H + second + first - log_term)


def rate_upper_stirling(n: int, code_type: TypeVector) -> float:
    """Stirling relaxation of :func:`rate_upper_exact`, in bits per channel use."""
    return nats_to_bits(rate_upper_stirling_nats(n, code_type))


def eop_lower_bound(profile: EnergyProfile, B: float) -> float:
    """Smallest EOP any code with this energy profile can have at target B."""
    return eop(profile, B)


def energy_rate_cap(profile: EnergyProfile, delta: float, boundary: str = "supremum") -> float:
    """Largest energy target B compatible with outage at most ``delta``.

    With ``boundary="supremum"`` (default) this is the largest B with
    eop(profile, B) <= delta, i.e. the level ebar_j for the smallest j whose
    cumulative count exceeds M*delta; for delta = 1 the top level is
    returned. ``boundary="inclusive"`` picks the smallest j with
    delta <= cumsum_j / M instead, which is one level lower whenever
    M*delta lands exactly on a cumulative count.
    """
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must lie in [0, 1]")
    cum = np.cumsum(profile.multiplicities)
    target = delta * profile.M
    tol = 1e-9
    if boundary == "supremum":
        idx = np.nonzero(cum > target + tol)[0]
    elif boundary == "inclusive":
        idx = np.nonzero(cum >= target - tol)[0]
    else:
        raise ValueError(f"unknown boundary rule {boundary!r}")
    j = int(idx[0]) if idx.size else len(cum) - 1
    return float(profile.levels[j])


def energy_rate_caps(profile: EnergyProfile, deltas: Sequence[float], boundary: str = "supremum"):
    return [(float(d), energy_rate_cap(profile, d, boundary)) for d in deltas]


@dataclass
class ImpossibilityReport:
    n: int
    M: float
    sigma2: float
    dep_lower_bound: float
    dep_lower_bound_raw: float
    rate_exact_bits: float
    rate_stirling_bits: float
    rate_alphabet_cap_bits: float
    eop_lower_bound: float
    energy_target: float
    energy_rate_caps: list[tuple[float, float]] = field(default_factory=list)

    CSV_FIELDS = (
        "n", "M", "sigma2", "eps_min", "R_exact_bits", "R_stirling_bits", "delta_min", "B_cap_at_delta",
    )

    def csv_row(self) -> dict:
        cap = self.energy_rate_caps[0][1] if self.energy_rate_caps else math.nan
        return {
            "n": self.n,
            "M": self.M,
            "sigma2": self.sigma2,
            "eps_min": self.dep_lower_bound,
            "R_exact_bits": self.rate_exact_bits,
            "R_stirling_bits": self.rate_stirling_bits,
            "delta_min": self.eop_lower_bound,
            "B_cap_at_delta": cap,
        }


def impossibility_report(
    constellation: Constellation,
    layer_probs: LayerProbabilities,
    n: int,
    M,
    sigma2: float,
    profile: EnergyProfile,
    B: float,
    deltas: Sequence[float],
) -> ImpossibilityReport:
    t = layer_probs.to_type(constellation.counts)
    raw = dep_lower_bound_raw(constellation, t, n, M, sigma2)
    try:
        stirling = rate_upper_stirling(n, t)
    except ZeroTypeEntry:
        stirling = math.nan
    return ImpossibilityReport(
        n=n,
        M=M,
        sigma2=sigma2,
        dep_lower_bound=min(1.0, raw),
        dep_lower_bound_raw=raw,
        rate_exact_bits=rate_upper_exact(n, t),
        rate_stirling_bits=stirling,
        rate_alphabet_cap_bits=rate_alphabet_cap(constellation.size),
        eop_lower_bound=eop_lower_bound(profile, B),
        energy_target=B,
        energy_rate_caps=energy_rate_caps(profile, deltas),
    )
