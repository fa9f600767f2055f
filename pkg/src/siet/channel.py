"""Seedable Monte Carlo simulation of the complex AWGN channel.

Randomness is counter based. Trial ``t`` owns a fixed slice of the Philox
stream keyed by the seed, so a trial's message draw and noise depend only
on ``(seed, t)``. Splitting the trials into shards therefore cannot change
any result, whatever the shard count or execution order.

Per trial the slice holds one uniform for the message index followed by
``2n`` uniforms turned into ``n`` complex Gaussians by the polar Box-Muller
transform ``sigma * sqrt(-ln(1 - u1)) * exp(2j*pi*u2)``, which has total
variance ``sigma^2`` split evenly between real and imaginary parts.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .code import Codebook
from .constellation import Constellation

MIN_DISTANCE = "min_distance"
CIRCULAR = "circular"
NO_DECODE = -1

_U53 = 2.0**-53
_CHUNK_ELEMS = 4_000_000


@dataclass(frozen=True)
class ChannelParams:
    noise_variance: float
    seed: int = 0
    trials: int = 10_000

    def __post_init__(self):
        if not self.noise_variance > 0:
            raise ValueError("noise variance must be > 0")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class DepEstimate:
    point_estimate: float
    standard_error: float
    trials: int
    errors: int
    decoder: str
    seed: int

    def csv_row(self) -> dict:
        return {
            "decoder": self.decoder,
            "trials": self.trials,
            "p_hat": self.point_estimate,
            "se": self.standard_error,
            "seed": self.seed,
        }


def _uniform_block(seed: int, start: int, count: int, per_trial: int) -> np.ndarray:
    """Uniforms in [0, 1) for trials start..start+count-1, shape (count, per_trial)."""
    blocks = -(-per_trial // 4)
    width = 4 * blocks
    bg = np.random.Philox(key=seed, counter=start * blocks)
    raw = bg.random_raw(count * width).reshape(count, width)[:, :per_trial]
    return (raw >> np.uint64(11)).astype(np.float64) * _U53


def complex_gaussian_from_uniforms(u1: np.ndarray, u2: np.ndarray, sigma2: float) -> np.ndarray:
    radius = np.sqrt(-sigma2 * np.log1p(-u1))
    return radius * np.exp(2j * np.pi * u2)


def trial_draws(seed: int, n: int, start: int, count: int, sigma2: float) -> tuple[np.ndarray, np.ndarray]:
    """(message uniforms of shape (count,), noise of shape (count, n)) for a trial range."""
    u = _uniform_block(seed, start, count, 1 + 2 * n)
    noise = complex_gaussian_from_uniforms(u[:, 1 : 1 + n], u[:, 1 + n :], sigma2)
    return u[:, 0], noise


def noise(params: ChannelParams, n: int, trial_index: int) -> np.ndarray:
    return trial_draws(params.seed, n, trial_index, 1, params.noise_variance)[1][0]


def transmit(codeword: Sequence[int], constellation: Constellation, params: ChannelParams, trial_index: int) -> np.ndarray:
    """Channel output y = u + N for one trial."""
    x = constellation.points[np.asarray(codeword, dtype=np.int64)]
    return x + noise(params, len(x), trial_index)


def gaussian_samples(seed: int, count: int, sigma2: float) -> np.ndarray:
    """``count`` complex Gaussian draws from the same transform the channel uses."""
    u = _uniform_block(seed, 0, -(-count // 2), 4).reshape(-1, 2)[:count]
    return complex_gaussian_from_uniforms(u[:, 0], u[:, 1], sigma2)


# -- decoders ------------------------------------------------------------------


def _codeword_points(codebook: Codebook, constellation: Constellation) -> np.ndarray:
    if tuple(codebook.layer_counts) != constellation.counts:
        raise ValueError("codebook and constellation disagree on layer sizes")
    return constellation.points[codebook.codewords]


def min_distance_decisions(Y: np.ndarray, U: np.ndarray) -> np.ndarray:
    """Index of the nearest codeword for each row of Y; ties go to the lowest index."""
    d = np.sum(np.abs(Y[:, None, :] - U[None, :, :]) ** 2, axis=2)
    return np.argmin(d, axis=1)


def circular_decisions(Y: np.ndarray, codebook: Codebook, constellation: Constellation) -> np.ndarray:
    """Circular-region decisions for each row of Y (NO_DECODE when nothing qualifies).

    Codeword i qualifies when every sample lies in the closed disk around its
    symbol. If overlapping disks let several qualify, the lowest index wins.
    """
    pts = constellation.points
    rad = constellation.symbol_radius
    inside = np.abs(Y[:, :, None] - pts[None, None, :]) <= rad[None, None, :]
    n = Y.shape[1]
    cw = codebook.codewords
    ok = np.ones((Y.shape[0], cw.shape[0]), dtype=bool)
    for m in range(n):
        ok &= inside[:, m, cw[:, m]]
    any_ok = ok.any(axis=1)
    return np.where(any_ok, np.argmax(ok, axis=1), NO_DECODE)


def decode_min_distance(y, codebook: Codebook, constellation: Constellation) -> int:
    y = np.asarray(y, dtype=complex)[None, :]
    return int(min_distance_decisions(y, _codeword_points(codebook, constellation))[0])


def decode_circular(y, codebook: Codebook, constellation: Constellation) -> int:
    y = np.asarray(y, dtype=complex)[None, :]
    return int(circular_decisions(y, codebook, constellation)[0])


# -- estimation ----------------------------------------------------------------


def _count_errors(codebook, constellation, params, decoder, start, stop) -> int:
    U = _codeword_points(codebook, constellation)
    M, n = U.shape
    per = M * n * (constellation.size if decoder == CIRCULAR else 1)
    chunk = max(1, _CHUNK_ELEMS // max(per, 1))
    errors = 0
    for s in range(start, stop, chunk):
        count = min(chunk, stop - s)
        u_msg, N = trial_draws(params.seed, n, s, count, params.noise_variance)
        sent = np.minimum((u_msg * M).astype(np.int64), M - 1)
        Y = U[sent] + N
        if decoder == MIN_DISTANCE:
            dec = min_distance_decisions(Y, U)
        elif decoder == CIRCULAR:
            dec = circular_decisions(Y, codebook, constellation)
        else:
            raise ValueError(f"unknown decoder {decoder!r}")
        errors += int(np.count_nonzero(dec != sent))
    return errors


def shard_bounds(trials: int, shards: int) -> list[tuple[int, int]]:
    edges = np.linspace(0, trials, shards + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def estimate_dep(
    codebook: Codebook,
    constellation: Constellation,
    params: ChannelParams,
    decoder: str = MIN_DISTANCE,
    shards: int = 1,
    workers: int | None = None,
) -> DepEstimate:
    """Monte Carlo DEP: uniform message, AWGN, decode, count errors.

    Trials are split into ``shards`` contiguous ranges, optionally run on
    ``workers`` threads; the merged count is identical for any split.
    """
    if params.trials < 100:
        raise ValueError("use at least 100 trials")
    bounds = shard_bounds(params.trials, max(1, shards))
    args = [(codebook, constellation, params, decoder, a, b) for a, b in bounds]
    if workers and workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda a: _count_errors(*a), args))
    else:
        counts = [_count_errors(*a) for a in args]
    errors = sum(counts)
    p = errors / params.trials
    return DepEstimate(
        point_estimate=p,
        standard_error=math.sqrt(p * (1.0 - p) / params.trials),
        trials=params.trials,
        errors=errors,
        decoder=decoder,
        seed=params.seed,
    )


def estimate_disk_probability(r: float, sigma2: float, draws: int, seed: int) -> tuple[float, float]:
    """Fraction of complex Gaussian draws inside the closed disk of radius r, with its SE."""
    z = gaussian_samples(seed, draws, sigma2)
    p = float(np.count_nonzero(np.abs(z) <= r)) / draws
    return p, math.sqrt(p * (1.0 - p) / draws)
