"""Harvested-energy model, per-codeword energies and energy outage.

Energies are in arbitrary "energy units": the model scales squared and
fourth-power amplitudes by k1 and k2 and nothing else.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .code import Codebook, LayerProbabilities
from .constellation import Constellation

DEDUP_RTOL = 1e-9


@dataclass(frozen=True)
class HarvesterModel:
    k1: float = 0.0034
    k2: float = 0.3829

    def __post_init__(self):
        if self.k1 < 0 or self.k2 < 0:
            raise ValueError("harvester constants must be non-negative")

    def symbol_energy(self, amplitude):
        a2 = np.asarray(amplitude, dtype=float) ** 2
        return self.k1 * a2 + self.k2 * a2 * a2


@dataclass(frozen=True)
class EnergyProfile:
    per_codeword: np.ndarray
    levels: np.ndarray
    multiplicities: np.ndarray

    @property
    def M(self) -> int:
        return int(self.multiplicities.sum())

    @property
    def num_levels(self) -> int:
        return len(self.levels)


def codeword_energy(codeword: Sequence[int], constellation: Constellation, model: HarvesterModel) -> float:
    """k1 * sum |u_m|^2 + k2 * sum |u_m|^4, evaluated through the layer amplitudes."""
    layer = constellation.symbol_layer[np.asarray(codeword, dtype=np.int64)]
    uses = np.bincount(layer, minlength=constellation.num_layers)
    return float(uses @ model.symbol_energy(constellation.amplitudes))


def constant_composition_energy(
    layer_probs: LayerProbabilities | Sequence[float],
    constellation: Constellation,
    model: HarvesterModel,
    n: int,
) -> float:
    """n * sum_c p_c (k1 A_c^2 + k2 A_c^4): the energy every codeword of the code carries."""
    p = np.asarray(tuple(layer_probs), dtype=float)
    return float(n * (p @ model.symbol_energy(constellation.amplitudes)))


def profile_from_energies(energies: Sequence[float], rtol: float = DEDUP_RTOL) -> EnergyProfile:
    """Group energies into strictly increasing unique levels with multiplicities.

    Two energies fall in the same level when they differ by at most
    ``rtol * max(e)`` from the smallest member of the level.
    """
    e = np.asarray(energies, dtype=float)
    if e.size == 0:
        raise ValueError("empty energy list")
    tol = rtol * float(np.max(np.abs(e)))
    s = np.sort(e)
    levels, mult = [s[0]], [1]
    for x in s[1:]:
        if x - levels[-1] <= tol:
            mult[-1] += 1
        else:
            levels.append(x)
            mult.append(1)
    return EnergyProfile(e.copy(), np.array(levels), np.array(mult, dtype=np.int64))


def energy_profile(
    codebook: Codebook, constellation: Constellation, model: HarvesterModel, exact: bool = False
) -> EnergyProfile:
    """Energy levels of a codebook.

    With ``exact=True`` energies are summed in rational arithmetic from the
    binary values of the amplitudes and constants, and levels are grouped by
    exact equality instead of the relative tolerance.
    """
    if tuple(codebook.layer_counts) != constellation.counts:
        raise ValueError("codebook and constellation disagree on layer sizes")
    uses = codebook.layer_counts_per_codeword()
    if not exact:
        return profile_from_energies(uses @ model.symbol_energy(constellation.amplitudes))
    k1, k2 = Fraction(model.k1), Fraction(model.k2)
    sym = [k1 * Fraction(a) ** 2 + k2 * Fraction(a) ** 4 for a in constellation.amplitudes]
    exact_e = [sum(int(u) * s for u, s in zip(row, sym)) for row in uses]
    tally = sorted(Counter(exact_e).items())
    return EnergyProfile(
        np.array([float(e) for e in exact_e]),
        np.array([float(e) for e, _ in tally]),
        np.array([y for _, y in tally], dtype=np.int64),
    )


def constant_composition_profile(energy: float, M: int) -> EnergyProfile:
    """Profile of a constant-composition code: one level carried by all M codewords."""
    return EnergyProfile(np.full(M, float(energy)), np.array([float(energy)]), np.array([M], dtype=np.int64))


def eop(profile: EnergyProfile, B: float) -> float:
    """Fraction of codewords whose energy falls strictly below B."""
    if B < 0:
        raise ValueError("energy target must be non-negative")
    below = profile.multiplicities[profile.levels < B].sum()
    return float(below / profile.M)


def write_profile_csv(profile: EnergyProfile, codeword_path, level_path) -> None:
    with open(codeword_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["codeword_index", "energy"])
        for i, e in enumerate(profile.per_codeword):
            w.writerow([i, f"{e:.12g}"])
    with open(level_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["level_index", "level", "multiplicity"])
        for j, (e, y) in enumerate(zip(profile.levels, profile.multiplicities)):
            w.writerow([j, f"{e:.12g}", int(y)])
