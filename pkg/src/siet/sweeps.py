"""Parameter sweeps and Monte Carlo oracle checks driven by the CLI."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .achievability import (
    achievable_rate_exact,
    achievable_rate_exact_nats,
    dep_circular_decoder,
    dep_equal_radius,
    disk_success_probability,
    min_equal_radius,
)
from .channel import CIRCULAR, ChannelParams, estimate_dep, estimate_disk_probability
from .code import Codebook, feasible_layer_probs, snap_layer_probs
from .constellation import Constellation, validate
from .energy import HarvesterModel, constant_composition_energy
from .errors import InfeasibleGeometry, InvalidConstellation
from .impossibility import rate_upper_exact
from .numerics import log_multinomial

SWEEP_VARIABLES = ("layer_prob_p", "amplitude_A2", "epsilon", "B")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    grid: tuple[float, ...]

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"unknown sweep variable {self.variable!r}")
        g = tuple(float(x) for x in self.grid)
        if not g:
            raise ValueError(f"{self.variable} grid is empty")
        if any(b <= a for a, b in zip(g, g[1:])):
            raise ValueError(f"{self.variable} grid must be strictly increasing")
        object.__setattr__(self, "grid", g)


def _checked(constellation: Constellation) -> Constellation:
    violations = validate(constellation)
    if violations:
        raise InvalidConstellation(violations)
    return constellation


# -- two-layer energy/rate trade-off ---------------------------------------------

TRADEOFF_FIELDS = ("p", "A2", "energy_e", "R_exact_nats", "R_exact_bits")


def tradeoff_rows(
    outer_amplitude: float,
    a2: SweepSpec,
    p: SweepSpec,
    n: int,
    layer_counts: Sequence[int],
    model: HarvesterModel,
    radii: Sequence[float] = (1.0, 1.0),
    peak_amplitude: float | None = None,
) -> list[dict]:
    """Energy and exact rate of a two-layer constant-composition code over a (p, A2) grid.

    ``p`` is the probability of the outer layer. Each requested p is snapped
    to the nearest realizable value first; the snapped value is reported.
    """
    if len(layer_counts) != 2:
        raise ValueError("this sweep needs exactly two layers")
    peak = outer_amplitude if peak_amplitude is None else peak_amplitude
    rows = []
    for A2 in a2.grid:
        const = _checked(Constellation.from_arrays([outer_amplitude, A2], layer_counts, None, radii, peak))
        for p_req in p.grid:
            lp = snap_layer_probs([p_req, 1.0 - p_req], n, layer_counts)
            t = lp.to_type(layer_counts)
            rows.append(
                {
                    "p": lp[0],
                    "A2": A2,
                    "energy_e": constant_composition_energy(lp, const, model, n),
                    "R_exact_nats": log_multinomial(n, t.counts(n)) / n,
                    "R_exact_bits": rate_upper_exact(n, t),
                }
            )
    return rows


# -- three-layer achievable region -----------------------------------------------


def simplex_grid(step: float, C: int) -> list[tuple[float, ...]]:
    """All p on the C-simplex whose coordinates are multiples of ``step``."""
    k = int(round(1.0 / step))
    if abs(k * step - 1.0) > 1e-9:
        raise ValueError("simplex step must divide 1")
    out = []
    for head in itertools.product(range(k + 1), repeat=C - 1):
        if sum(head) <= k:
            out.append(tuple(h / k for h in head) + ((k - sum(head)) / k,))
    return out


def pareto_flags(rates: Sequence[float], energies: Sequence[float]) -> list[bool]:
    """True where no other point has both R and B at least as large, one strictly."""
    R = np.asarray(rates, dtype=float)
    B = np.asarray(energies, dtype=float)
    flags = []
    for i in range(R.size):
        ge = (R >= R[i]) & (B >= B[i])
        gt = (R > R[i]) | (B > B[i])
        flags.append(not bool(np.any(ge & gt)))
    return flags


def region_geometry(outer_amplitude: float, num_layers: int, epsilon: float, n: int, sigma2: float):
    """Common radius for target DEP epsilon and amplitudes spaced 2r apart from the outer one."""
    r = min_equal_radius(epsilon, n, sigma2)
    amps = [outer_amplitude - 2.0 * r * c for c in range(num_layers)]
    if amps[-1] <= 0:
        raise InfeasibleGeometry(f"epsilon={epsilon}: innermost amplitude {amps[-1]:.6g} <= 0 at r={r:.6g}")
    return r, amps


def regions_rows(
    outer_amplitude: float,
    n: int,
    layer_counts: Sequence[int],
    sigma2: float,
    epsilon: SweepSpec,
    model: HarvesterModel,
    p_step: float | None = None,
    peak_amplitude: float | None = None,
) -> list[dict]:
    """Achievable (R, B) points for each target DEP, with a per-epsilon Pareto flag.

    Without ``p_step`` every realizable p is visited; with it, the simplex
    grid of that step is snapped to realizable values and de-duplicated.
    """
    C = len(layer_counts)
    peak = outer_amplitude if peak_amplitude is None else peak_amplitude
    if p_step is None:
        probs = feasible_layer_probs(n, layer_counts)
    else:
        seen, probs = set(), []
        for q in simplex_grid(p_step, C):
            lp = snap_layer_probs(q, n, layer_counts)
            if lp.p not in seen:
                seen.add(lp.p)
                probs.append(lp)
    rows = []
    for eps in epsilon.grid:
        r, amps = region_geometry(outer_amplitude, C, eps, n, sigma2)
        const = _checked(Constellation.from_arrays(amps, layer_counts, None, [r] * C, peak))
        block = []
        for lp in probs:
            row = {"epsilon": eps, "r": r}
            row.update({f"p{c + 1}": lp[c] for c in range(C)})
            row["R_nats"] = achievable_rate_exact_nats(n, lp, layer_counts)
            row["R_bits"] = achievable_rate_exact(n, lp, layer_counts)
            row["B"] = constant_composition_energy(lp, const, model, n)
            block.append(row)
        for row, flag in zip(block, pareto_flags([b["R_bits"] for b in block], [b["B"] for b in block])):
            row["pareto"] = int(flag)
        rows.extend(block)
    return rows


# -- Monte Carlo oracle checks -----------------------------------------------------

VERIFY_FIELDS = ("check", "closed_form", "mc_estimate", "se", "pass")


def _verdict(name: str, closed: float, p_hat: float, se: float) -> dict:
    return {"check": name, "closed_form": closed, "mc_estimate": p_hat, "se": se, "pass": int(abs(closed - p_hat) <= 3 * se)}


def oracle_checks(
    codebook: Codebook,
    constellation: Constellation,
    sigma2: float,
    trials: int,
    seed: int,
    disk_radius: float = 1.0,
    equal_radius: float = 1.0,
) -> list[dict]:
    """Closed forms for disk membership, circular-decoder DEP and equal-radius DEP against MC."""
    if trials < 10_000:
        raise ValueError("oracle checks need at least 10^4 trials")
    rows = []
    p, se = estimate_disk_probability(disk_radius, sigma2, trials, seed)
    rows.append(_verdict("disk", disk_success_probability(disk_radius, sigma2), p, se))

    est = estimate_dep(codebook, constellation, ChannelParams(sigma2, (seed + 1) % 2**64, trials), CIRCULAR)
    closed = dep_circular_decoder(codebook, constellation.radii, codebook.n, sigma2)
    rows.append(_verdict("circular_dep", closed, est.point_estimate, est.standard_error))

    eq = constellation.with_radii([equal_radius] * constellation.num_layers)
    est = estimate_dep(codebook, eq, ChannelParams(sigma2, (seed + 2) % 2**64, trials), CIRCULAR)
    closed = dep_equal_radius(equal_radius, codebook.n, sigma2)
    rows.append(_verdict("equal_radius_dep", closed, est.point_estimate, est.standard_error))
    return rows


def format_value(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        return f"{x:.12g}"
    return str(x)
