"""Scenario files.

A scenario is a YAML document with the sections ``constellation``,
``code``, ``energy``, ``channel``, ``sweep``, ``verify`` and ``output``.
Only ``constellation`` is mandatory. Numbers may be written as YAML
numbers or as decimal strings (``"1e-3"``); both go through ``float``,
so parsing never depends on the locale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .code import CodeSpec, LayerProbabilities
from .constellation import Constellation, validate
from .energy import HarvesterModel
from .errors import InvalidConstellation


def _num(x) -> float:
    return float(str(x).strip()) if isinstance(x, str) else float(x)


def _nums(xs) -> list[float]:
    return [_num(x) for x in xs]


@dataclass
class Scenario:
    constellation: Constellation
    n: int | None = None
    layer_probs: LayerProbabilities | None = None
    message_count: int | str = "max"
    codebook_mode: str = "enumerate"
    codebook_seed: int | None = None
    model: HarvesterModel = field(default_factory=HarvesterModel)
    energy_target: float = 0.0
    deltas: list[float] = field(default_factory=lambda: [0.0])
    sigma2: float | None = None
    seed: int = 0
    trials: int = 10_000
    epsilon: float | None = None
    sweep: dict[str, Any] = field(default_factory=dict)
    verify: dict[str, Any] = field(default_factory=dict)
    output: str | None = None

    def checked_constellation(self) -> Constellation:
        violations = validate(self.constellation)
        if violations:
            raise InvalidConstellation(violations)
        return self.constellation

    def code_spec(self) -> CodeSpec:
        if self.n is None or self.layer_probs is None:
            raise ValueError("scenario has no code section (n and layer_probs)")
        return CodeSpec(
            self.n,
            self.constellation,
            self.layer_probs,
            self.message_count,
            self.codebook_mode,
            self.codebook_seed,
        )


def parse_constellation(d: dict) -> Constellation:
    amps = _nums(d["amplitudes"])
    counts = [int(x) for x in d["counts"]]
    if len(counts) != len(amps):
        raise ValueError("amplitudes and counts differ in length")
    radii = d.get("radii", 1.0)
    radii = _nums(radii) if isinstance(radii, (list, tuple)) else [_num(radii)] * len(amps)
    shifts = d.get("phase_shifts")
    shifts = _nums(shifts) if shifts is not None else None
    peak = _num(d["peak_amplitude"]) if "peak_amplitude" in d else None
    return Constellation.from_arrays(amps, counts, shifts, radii, peak)


def parse_scenario(doc: dict) -> Scenario:
    if not isinstance(doc, dict) or "constellation" not in doc:
        raise ValueError("scenario needs a 'constellation' section")
    sc = Scenario(constellation=parse_constellation(doc["constellation"]))
    code = doc.get("code") or {}
    if "n" in code:
        sc.n = int(code["n"])
    if "layer_probs" in code:
        sc.layer_probs = LayerProbabilities(tuple(_nums(code["layer_probs"])))
    if "M" in code:
        sc.message_count = "max" if str(code["M"]) == "max" else int(code["M"])
    sc.codebook_mode = str(code.get("mode", sc.codebook_mode))
    if "seed" in code:
        sc.codebook_seed = int(code["seed"])
    energy = doc.get("energy") or {}
    sc.model = HarvesterModel(_num(energy.get("k1", 0.0034)), _num(energy.get("k2", 0.3829)))
    sc.energy_target = _num(energy.get("B", 0.0))
    if "deltas" in energy:
        sc.deltas = _nums(energy["deltas"])
    channel = doc.get("channel") or {}
    if "sigma2" in channel:
        sc.sigma2 = _num(channel["sigma2"])
    sc.seed = int(channel.get("seed", sc.seed))
    sc.trials = int(_num(channel.get("trials", sc.trials)))
    if "epsilon" in channel:
        sc.epsilon = _num(channel["epsilon"])
    sc.sweep = dict(doc.get("sweep") or {})
    sc.verify = dict(doc.get("verify") or {})
    out = doc.get("output") or {}
    sc.output = out.get("path")
    return sc


def load_scenario(path) -> Scenario:
    with open(Path(path), encoding="utf-8") as fh:
        return parse_scenario(yaml.safe_load(fh))
