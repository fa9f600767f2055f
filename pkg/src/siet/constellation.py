"""Layered circular constellations.

A constellation is a union of layers. Layer ``c`` holds ``L_c`` symbols
equally spaced on the circle of radius ``A_c`` and rotated by ``alpha_c``:

    x_c^(l) = A_c * exp(i * (2*pi*l/L_c + alpha_c)),  l = 0..L_c-1

Each layer also carries the radius ``r_c`` of the closed decoding disk
placed around each of its symbols. Amplitude units are whatever the
caller uses (millivolts in the original scenarios); nothing here depends
on them.

Symbols are indexed globally in layer order: layer 0 symbols first, then
layer 1, and so on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import RadiusTooLarge

TWO_PI = 2.0 * math.pi


def _wrap(angle: float) -> float:
    a = math.fmod(angle, TWO_PI)
    if a < 0:
        a += TWO_PI
    # fmod can hand back exactly 2*pi after the shift for tiny negatives
    return 0.0 if a >= TWO_PI else a


@dataclass(frozen=True)
class Layer:
    amplitude: float
    count: int
    phase_shift: float = 0.0
    decode_radius: float = 1.0

    def __post_init__(self):
        if not self.amplitude > 0:
            raise ValueError(f"layer amplitude must be > 0, got {self.amplitude}")
        if int(self.count) != self.count or self.count < 1:
            raise ValueError(f"layer count must be a positive integer, got {self.count}")
        if not self.decode_radius > 0:
            raise ValueError(f"decode radius must be > 0, got {self.decode_radius}")
        object.__setattr__(self, "count", int(self.count))
        object.__setattr__(self, "phase_shift", _wrap(float(self.phase_shift)))

    def symbols(self) -> np.ndarray:
        ell = np.arange(self.count)
        return self.amplitude * np.exp(1j * (TWO_PI * ell / self.count + self.phase_shift))


@dataclass(frozen=True)
class Violation:
    constraint: str
    layers: tuple[int, ...]
    detail: str

    def __str__(self) -> str:
        return f"{self.constraint} (layers {', '.join(map(str, self.layers))}): {self.detail}"


@dataclass(frozen=True)
class Constellation:
    layers: tuple[Layer, ...]
    peak_amplitude: float
    _points: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise ValueError("constellation needs at least one layer")
        if not self.peak_amplitude > 0:
            raise ValueError("peak amplitude must be > 0")
        pts = np.concatenate([layer.symbols() for layer in self.layers])
        pts.setflags(write=False)
        object.__setattr__(self, "_points", pts)

    @classmethod
    def from_arrays(cls, amplitudes, counts, phase_shifts=None, radii=None, peak_amplitude=None):
        C = len(amplitudes)
        phase_shifts = [0.0] * C if phase_shifts is None else list(phase_shifts)
        radii = [1.0] * C if radii is None else list(radii)
        if peak_amplitude is None:
            peak_amplitude = max(amplitudes)
        layers = [Layer(a, l, s, r) for a, l, s, r in zip(amplitudes, counts, phase_shifts, radii)]
        return cls(tuple(layers), peak_amplitude)

    # -- vectors of the family parameters ------------------------------------
    @property
    def num_layers(self) -> int:
        return len(self.layers)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([layer.amplitude for layer in self.layers])

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(layer.count for layer in self.layers)

    @property
    def phase_shifts(self) -> np.ndarray:
        return np.array([layer.phase_shift for layer in self.layers])

    @property
    def radii(self) -> np.ndarray:
        return np.array([layer.decode_radius for layer in self.layers])

    @property
    def size(self) -> int:
        return sum(self.counts)

    @property
    def points(self) -> np.ndarray:
        """Complex symbol values in global index order."""
        return self._points

    @property
    def symbol_layer(self) -> np.ndarray:
        """Layer index of each global symbol index."""
        return np.repeat(np.arange(self.num_layers), self.counts)

    @property
    def symbol_amplitude(self) -> np.ndarray:
        return self.amplitudes[self.symbol_layer]

    @property
    def symbol_radius(self) -> np.ndarray:
        return self.radii[self.symbol_layer]

    def layer_offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.counts)[:-1]]).astype(int)

    def split_index(self, g: int) -> tuple[int, int]:
        """Global symbol index -> (layer, index within layer)."""
        c = int(self.symbol_layer[g])
        return c, int(g - self.layer_offsets()[c])

    def global_index(self, c: int, ell: int) -> int:
        if not 0 <= ell < self.counts[c]:
            raise IndexError(f"symbol {ell} out of range for layer {c}")
        return int(self.layer_offsets()[c] + ell)

    def with_radii(self, radii: Sequence[float]) -> "Constellation":
        layers = [Layer(l.amplitude, l.count, l.phase_shift, r) for l, r in zip(self.layers, radii)]
        return Constellation(tuple(layers), self.peak_amplitude)

    def with_phase_shifts(self, shifts: Sequence[float]) -> "Constellation":
        layers = [Layer(l.amplitude, l.count, s, l.decode_radius) for l, s in zip(self.layers, shifts)]
        return Constellation(tuple(layers), self.peak_amplitude)

    def same_symbols(self, other: "Constellation", tol: float = 1e-12) -> bool:
        """Compare the canonical symbol multisets."""
        if self.counts != other.counts:
            return False
        for a, b in zip(self.layers, other.layers):
            pa, pb = a.symbols(), b.symbols()
            d = np.abs(pa[:, None] - pb[None, :])
            if not np.all(d.min(axis=1) <= tol):
                return False
        return True

    # -- (de)serialization ----------------------------------------------------
    def to_dict(self) -> dict[str, Any]:
        return {
            "layers": [
                {
                    "amplitude": l.amplitude,
                    "count": l.count,
                    "phase_shift": l.phase_shift,
                    "decode_radius": l.decode_radius,
                }
                for l in self.layers
            ],
            "peak_amplitude": self.peak_amplitude,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Constellation":
        layers = [
            Layer(
                float(x["amplitude"]),
                int(x["count"]),
                float(x.get("phase_shift", 0.0)),
                float(x.get("decode_radius", 1.0)),
            )
            for x in d["layers"]
        ]
        return cls(tuple(layers), float(d["peak_amplitude"]))


def symbols(constellation: Constellation) -> list[tuple[int, int, complex]]:
    """All symbols as (layer_index, symbol_index, value)."""
    out = []
    for c, layer in enumerate(constellation.layers):
        for ell, x in enumerate(layer.symbols()):
            out.append((c, ell, complex(x)))
    return out


def max_symbols_per_layer(amplitude: float, radius: float) -> int:
    """Largest symbol count a layer of this amplitude can hold with disks of this radius.

    Each disk cuts an arc of angle 4*arcsin(r / 2A) out of the layer circle;
    the count is the number of such arcs that fit without overlapping.
    """
    if not radius > 0 or not amplitude > 0:
        raise ValueError("amplitude and radius must be positive")
    arg = radius / (2.0 * amplitude)
    if arg > 1.0:
        raise RadiusTooLarge(f"decode radius {radius} exceeds twice the amplitude {amplitude}")
    if arg == 1.0:
        return 1
    # slack absorbs rounding when the ratio is an exact integer (e.g. r = A*sqrt(2))
    return int(math.floor(math.pi / (2.0 * math.asin(arg)) + 1e-9))


def validate(constellation: Constellation) -> list[Violation]:
    """Check ordering, peak, layer separation and per-layer packing; empty list means valid."""
    out: list[Violation] = []
    layers = constellation.layers
    for c in range(len(layers) - 1):
        a, b = layers[c], layers[c + 1]
        if not a.amplitude > b.amplitude:
            out.append(Violation("amplitude order", (c, c + 1), f"A={a.amplitude} is not > {b.amplitude}"))
        gap = a.amplitude - b.amplitude
        need = a.decode_radius + b.decode_radius
        # relative slack so spacing built as A - 2r is not rejected by rounding
        if gap < need - 1e-12 * max(a.amplitude, need):
            out.append(Violation("inter-layer separation", (c, c + 1), f"gap {gap:g} < r sum {need:g}"))
    if layers[0].amplitude > constellation.peak_amplitude:
        out.append(
            Violation("peak amplitude", (0,), f"A={layers[0].amplitude} > P={constellation.peak_amplitude}")
        )
    for c, layer in enumerate(layers):
        try:
            cap = max_symbols_per_layer(layer.amplitude, layer.decode_radius)
        except RadiusTooLarge as exc:
            out.append(Violation("RadiusTooLarge", (c,), str(exc)))
            continue
        if layer.count > cap:
            out.append(Violation("symbols per layer", (c,), f"L={layer.count} > cap {cap}"))
    return out


def rotate(constellation: Constellation, omega: float) -> Constellation:
    """Rotate every layer by the same angle."""
    return constellation.with_phase_shifts([s + omega for s in constellation.phase_shifts])

