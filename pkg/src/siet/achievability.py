"""Achievability bounds for the layered constant-composition code family.

The decoder behind these bounds accepts codeword ``i`` only when every
received sample lands in the closed disk of radius ``r_c`` around the
corresponding transmitted symbol. Because the complex noise is circularly
symmetric, the per-sample success probability is ``1 - exp(-r_c^2 / sigma^2)``
and the DEP of that decoder has a closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .code import Codebook, LayerProbabilities, exact_log_codeword_count, rate_bits_per_use
from .constellation import Constellation, max_symbols_per_layer
from .energy import EnergyProfile, HarvesterModel, constant_composition_energy
from .errors import InvalidEpsilon
from .impossibility import energy_rate_cap, energy_rate_caps


def disk_success_probability(r: float, sigma2: float) -> float:
    """P(|N| <= r) for circularly symmetric complex Gaussian N of total variance sigma2."""
    if r < 0 or sigma2 <= 0:
        raise ValueError("need r >= 0 and sigma2 > 0")
    return float(-math.expm1(-(r * r) / sigma2))


def _log_disk_success(r: float, sigma2: float) -> float:
    return math.log1p(-math.exp(-(r * r) / sigma2))


def dep_circular_decoder(source, radii: Sequence[float], n: int, sigma2: float) -> float:
    """DEP of the circular-region decoder.

    ``source`` is either a :class:`Codebook` (general form, averaging over
    codewords) or layer probabilities (constant-composition form,
    ``1 - prod_c s_c^(n p_c)``). This is the exact error probability of
    that decoder, and therefore an achievable DEP for the code.
    """
    radii = [float(r) for r in radii]
    if any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    log_s = np.array([_log_disk_success(r, sigma2) for r in radii])
    if isinstance(source, Codebook):
        if source.n != n:
            raise ValueError("codebook block length differs from n")
        uses = source.layer_counts_per_codeword()
        log_ok = uses @ log_s
        return float(1.0 - np.mean(np.exp(log_ok)))
    p = np.asarray(tuple(source), dtype=float)
    if p.size != log_s.size:
        raise ValueError("one radius per layer is required")
    return float(-math.expm1(n * float(p @ log_s)))


def dep_equal_radius(r: float, n: int, sigma2: float) -> float:
    """1 - (1 - exp(-r^2/sigma^2))^n: DEP when every layer uses the same radius."""
    return float(-math.expm1(n * _log_disk_success(r, sigma2)))


def min_equal_radius(epsilon: float, n: int, sigma2: float) -> float:
    """Smallest common decoding radius whose circular-decoder DEP does not exceed epsilon."""
    if not 0.0 < epsilon < 1.0:
        raise InvalidEpsilon(f"epsilon must lie in (0, 1), got {epsilon}")
    if n < 1 or sigma2 <= 0:
        raise ValueError("need n >= 1 and sigma2 > 0")
    # 1 - (1-eps)^(1/n), computed without cancellation
    miss = -math.expm1(math.log1p(-epsilon) / n)
    return math.sqrt(-sigma2 * math.log(miss))


def per_layer_caps(constellation: Constellation) -> list[int]:
    return [max_symbols_per_layer(l.amplitude, l.decode_radius) for l in constellation.layers]


def rate_cap(constellation: Constellation) -> float:
    """log2 of the total number of symbols the disks leave room for."""
    return math.log2(sum(per_layer_caps(constellation)))


def achievable_rate_exact(n: int, layer_probs: LayerProbabilities, L: Sequence[int]) -> float:
    return rate_bits_per_use(n, exact_log_codeword_count(n, layer_probs, L))


def achievable_rate_exact_nats(n: int, layer_probs: LayerProbabilities, L: Sequence[int]) -> float:
    return exact_log_codeword_count(n, layer_probs, L) / n


def achievable_eop(source, constellation: Constellation, model: HarvesterModel, n: int, B: float) -> float:
    """EOP of a code in the family at energy target B.

    A codebook or energy profile gives the averaged indicator; layer
    probabilities give the constant-composition indicator 1{e_C < B}.
    """
    if B < 0:
        raise ValueError("energy target must be non-negative")
    if isinstance(source, EnergyProfile):
        return float(source.multiplicities[source.levels < B].sum() / source.M)
    if isinstance(source, Codebook):
        energies = source.layer_counts_per_codeword() @ model.symbol_energy(constellation.amplitudes)
        return float(np.mean(energies < B))
    return 1.0 if constant_composition_energy(source, constellation, model, n) < B else 0.0


def achievable_energy_rate_cap(profile: EnergyProfile, delta: float, boundary: str = "supremum") -> float:
    # the achievable cap follows the same stepping rule as the impossibility cap
    return energy_rate_cap(profile, delta, boundary)


def optimal_probs_for_rate(L: Sequence[int]) -> LayerProbabilities:
    total = sum(L)
    return LayerProbabilities(tuple(Lc / total for Lc in L))


def optimal_probs_for_energy(C: int) -> LayerProbabilities:
    if C < 1:
        raise ValueError("need at least one layer")
    return LayerProbabilities((1.0,) + (0.0,) * (C - 1))


@dataclass
class AchievabilityReport:
    n: int
    M: float
    sigma2: float
    radii: list[float]
    dep: float
    min_radius: float
    per_layer_symbol_caps: list[int]
    configured_layer_counts: list[int]
    rate_cap_bits: float
    rate_exact_bits: float
    eop: float
    eop_form: str
    energy_target: float
    energy_rate_caps: list[tuple[float, float]] = field(default_factory=list)

    def csv_row(self) -> dict:
        row = {"n": self.n, "M": self.M, "sigma2": self.sigma2}
        for c, r in enumerate(self.radii, start=1):
            row[f"r_{c}"] = r
        row.update(
            eps_ach=self.dep,
            R_cap_bits=self.rate_cap_bits,
            R_exact_bits=self.rate_exact_bits,
            delta_ach=self.eop,
            B_cap_at_delta=self.energy_rate_caps[0][1] if self.energy_rate_caps else math.nan,
        )
        return row


def achievability_report(
    constellation: Constellation,
    layer_probs: LayerProbabilities,
    n: int,
    M,
    sigma2: float,
    model: HarvesterModel,
    profile: EnergyProfile,
    B: float,
    deltas: Sequence[float],
    codebook: Codebook | None = None,
    epsilon: float | None = None,
) -> AchievabilityReport:
    """Evaluate every achievability quantity for one code of the family.

    The phase shifts of the constellation never enter: only amplitudes,
    layer sizes, radii, probabilities, n and sigma2 do. ``epsilon`` is the
    target DEP used for the equal-radius lower bound on the radius.
    """
    radii = [float(r) for r in constellation.radii]
    source = codebook if codebook is not None else layer_probs
    if codebook is None:
        eop_val = achievable_eop(layer_probs, constellation, model, n, B)
        form = "exact-constant-composition"
    else:
        eop_val = achievable_eop(codebook, constellation, model, n, B)
        form = "average-over-codewords"
    return AchievabilityReport(
        n=n,
        M=M,
        sigma2=sigma2,
        radii=radii,
        dep=dep_circular_decoder(source, radii, n, sigma2),
        min_radius=min_equal_radius(epsilon, n, sigma2) if epsilon is not None else math.nan,
        per_layer_symbol_caps=per_layer_caps(constellation),
        configured_layer_counts=list(constellation.counts),
        rate_cap_bits=rate_cap(constellation),
        rate_exact_bits=achievable_rate_exact(n, layer_probs, constellation.counts),
        eop=eop_val,
        eop_form=form,
        energy_target=B,
        energy_rate_caps=energy_rate_caps(profile, deltas),
    )
