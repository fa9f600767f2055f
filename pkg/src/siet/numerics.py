"""Special functions and log-domain combinatorics.

Everything here works in natural logarithms. Conversion to bits happens
at the reporting boundary only.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.special import erfc, log_ndtr

from .errors import CountMismatch, NotAPmf

_EXACT_FACTORIAL_MAX = 20
_LOG_FACTORIAL_TABLE = tuple(math.log(math.factorial(k)) for k in range(_EXACT_FACTORIAL_MAX + 1))


def q_function(x: float) -> float:
    """Gaussian tail probability Q(x) = P(Z > x) for standard normal Z."""
    return float(0.5 * erfc(x / math.sqrt(2.0)))


def log_q_function(x: float) -> float:
    """ln Q(x), accurate far into the tail where Q(x) underflows."""
    return float(log_ndtr(-x))


def log_factorial(k: int) -> float:
    """ln(k!). Exact table for k <= 20, log-gamma beyond."""
    if k < 0:
        raise ValueError(f"factorial of negative integer {k}")
    if k <= _EXACT_FACTORIAL_MAX:
        return _LOG_FACTORIAL_TABLE[k]
    return math.lgamma(k + 1)


def log_multinomial(n: int, counts: Sequence[int]) -> float:
    """ln(n! / prod(c!)) for a composition ``counts`` of ``n``."""
    counts = [int(c) for c in counts]
    if any(c < 0 for c in counts):
        raise CountMismatch(f"negative count in {counts}")
    if sum(counts) != n:
        raise CountMismatch(f"counts sum to {sum(counts)}, expected {n}")
    return log_factorial(n) - sum(log_factorial(c) for c in counts)


def entropy_nats(p: Sequence[float]) -> float:
    """Shannon entropy in nats, with 0 ln 0 = 0."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0 or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise NotAPmf(f"not a pmf: {p.tolist()}")
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz)))


def nats_to_bits(x: float) -> float:
    return x / math.log(2.0)
