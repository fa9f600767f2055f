"""Types, constant-composition codebooks and rate bookkeeping.

Codewords are stored as sequences of global symbol indices (see
:mod:`siet.constellation`), never as complex values. A constant-composition
code built from layer probabilities ``p`` uses every symbol of layer ``c``
exactly ``n * p_c / L_c`` times in every codeword.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .constellation import Constellation
from .errors import (
    CountMismatch,
    Exhausted,
    Infeasible,
    NotAPmf,
    TooManyCodewords,
    UnrealizableType,
)
from .numerics import log_multinomial, nats_to_bits

ENUMERATION_CAP = 10**6
_INT_TOL = 1e-9


@dataclass(frozen=True)
class LayerProbabilities:
    """Fraction of channel uses spent on each layer."""

    p: tuple[float, ...]

    def __post_init__(self):
        p = tuple(float(x) for x in self.p)
        if not p or any(x < 0 or x > 1 for x in p) or abs(sum(p) - 1.0) > 1e-12:
            raise NotAPmf(f"layer probabilities must be a pmf, got {p}")
        object.__setattr__(self, "p", p)

    def __len__(self):
        return len(self.p)

    def __iter__(self):
        return iter(self.p)

    def __getitem__(self, c):
        return self.p[c]

    def to_type(self, layer_counts: Sequence[int]) -> "TypeVector":
        if len(layer_counts) != len(self.p):
            raise ValueError("layer count vector and probabilities differ in length")
        freqs = []
        for pc, Lc in zip(self.p, layer_counts):
            freqs.extend([pc / Lc] * Lc)
        return TypeVector(tuple(freqs), tuple(layer_counts))


@dataclass(frozen=True)
class TypeVector:
    """Empirical pmf over the symbols of a layered constellation (global index order)."""

    freqs: tuple[float, ...]
    layer_counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.freqs) != sum(self.layer_counts):
            raise ValueError("type length does not match the constellation size")
        if any(f < 0 for f in self.freqs) or abs(sum(self.freqs) - 1.0) > 1e-12:
            raise NotAPmf("type frequencies must be a pmf")

    @property
    def per_symbol(self) -> list[tuple[int, int, float]]:
        out = []
        g = 0
        for c, Lc in enumerate(self.layer_counts):
            for ell in range(Lc):
                out.append((c, ell, self.freqs[g]))
                g += 1
        return out

    def counts(self, n: int) -> list[int]:
        """Per-symbol occurrence counts at block length n; raises if not realizable."""
        raw = [n * f for f in self.freqs]
        out = [int(round(x)) for x in raw]
        if any(abs(x - k) > _INT_TOL * max(1.0, x) for x, k in zip(raw, out)):
            raise UnrealizableType(f"type is not realizable at n={n}")
        return out

    def is_realizable(self, n: int) -> bool:
        try:
            self.counts(n)
        except UnrealizableType:
            return False
        return True

    def layer_probabilities(self) -> LayerProbabilities:
        out, g = [], 0
        for Lc in self.layer_counts:
            out.append(sum(self.freqs[g : g + Lc]))
            g += Lc
        # renormalize away float drift from the partial sums
        s = sum(out)
        return LayerProbabilities(tuple(x / s for x in out))


def per_symbol_counts(n: int, layer_probs: LayerProbabilities, layer_counts: Sequence[int]) -> list[int]:
    """Occurrences of each symbol of layer c: n * p_c / L_c, repeated L_c times."""
    if len(layer_probs) != len(layer_counts):
        raise ValueError("layer count vector and probabilities differ in length")
    out = []
    for pc, Lc in zip(layer_probs, layer_counts):
        x = n * pc / Lc
        k = int(round(x))
        if abs(x - k) > _INT_TOL * max(1.0, x):
            raise UnrealizableType(f"n*p_c/L_c = {n}*{pc}/{Lc} is not an integer")
        out.extend([k] * Lc)
    return out


def _feasible_layer_counts(n: int, L: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All (k_1..k_C) >= 0 with sum_c L_c k_c = n."""

    def rec(c, remaining):
        if c == len(L) - 1:
            if remaining % L[c] == 0:
                yield (remaining // L[c],)
            return
        for k in range(remaining // L[c] + 1):
            for rest in rec(c + 1, remaining - k * L[c]):
                yield (k,) + rest

    yield from rec(0, n)


def feasible_layer_probs(n: int, L: Sequence[int]) -> list[LayerProbabilities]:
    """Every layer-probability vector realizable as a constant composition at block length n."""
    out = []
    for ks in _feasible_layer_counts(n, L):
        out.append(LayerProbabilities(tuple(k * Lc / n for k, Lc in zip(ks, L))))
    return out


def snap_layer_probs(p: Sequence[float], n: int, L: Sequence[int]) -> LayerProbabilities:
    """Nearest realizable layer probabilities in L1 distance.

    Ties go to the candidate that rounds up the layer with the largest
    fractional remainder of n*p_c/L_c, then to lower layer indices.
    """
    p = [float(x) for x in p]
    if len(p) != len(L):
        raise ValueError("p and L differ in length")
    if n < 1 or any(x < 0 for x in p) or abs(sum(p) - 1.0) > 1e-9:
        raise NotAPmf(f"cannot snap {p}")
    rem = [(n * pc / Lc) % 1.0 for pc, Lc in zip(p, L)]
    order = sorted(range(len(L)), key=lambda c: (-rem[c], c))
    best, best_key = None, None
    for ks in _feasible_layer_counts(n, L):
        q = [k * Lc / n for k, Lc in zip(ks, L)]
        dist = sum(abs(a - b) for a, b in zip(q, p))
        key = (round(dist, 12), tuple(-(q[c] - p[c]) for c in order))
        if best_key is None or key < best_key:
            best, best_key = q, key
    if best is None:
        raise Infeasible(f"n={n} is not a non-negative combination of layer sizes {list(L)}")
    return LayerProbabilities(tuple(best))


def exact_log_codeword_count(n: int, layer_probs: LayerProbabilities, L: Sequence[int]) -> float:
    """ln of the number of length-n sequences with the constant composition set by p."""
    return log_multinomial(n, per_symbol_counts(n, layer_probs, L))


def rate_bits_per_use(n: int, log_M: float) -> float:
    if n < 1:
        raise ValueError("block length must be >= 1")
    return nats_to_bits(log_M) / n


@dataclass(frozen=True)
class CodeSpec:
    block_length: int
    constellation: Constellation
    layer_probs: LayerProbabilities
    message_count: int | str = "max"
    mode: str = "enumerate"
    seed: int | None = None

    def __post_init__(self):
        if self.block_length < 1:
            raise ValueError("block length must be >= 1")
        if not isinstance(self.layer_probs, LayerProbabilities):
            object.__setattr__(self, "layer_probs", LayerProbabilities(tuple(self.layer_probs)))
        if self.mode not in ("enumerate", "sample"):
            raise ValueError(f"unknown codebook mode {self.mode!r}")
        if self.mode == "sample" and self.seed is None:
            raise ValueError("sample mode needs a seed")
        # realizability check; raises UnrealizableType
        per_symbol_counts(self.block_length, self.layer_probs, self.constellation.counts)
        if self.message_count != "max":
            M = int(self.message_count)
            if M < 1:
                raise ValueError("message count must be >= 1")
            if math.log(M) > self.log_max_messages + 1e-9:
                raise Exhausted(f"M={M} exceeds the number of constant-composition codewords")

    @property
    def composition(self) -> list[int]:
        return per_symbol_counts(self.block_length, self.layer_probs, self.constellation.counts)

    @property
    def log_max_messages(self) -> float:
        return exact_log_codeword_count(self.block_length, self.layer_probs, self.constellation.counts)

    @property
    def log_message_count(self) -> float:
        if self.message_count == "max":
            return self.log_max_messages
        return math.log(int(self.message_count))

    def resolved_message_count(self) -> int | float:
        """M as an int when it fits exactly in a float, else as a float (possibly inf)."""
        if self.message_count != "max":
            return int(self.message_count)
        logm = self.log_max_messages
        if logm < 36.0:
            return int(round(math.exp(logm)))
        return math.exp(logm) if logm < 709.0 else math.inf


@dataclass(frozen=True)
class Codebook:
    codewords: np.ndarray
    layer_counts: tuple[int, ...]
    spec: CodeSpec | None = field(default=None, compare=False)

    def __post_init__(self):
        cw = np.asarray(self.codewords, dtype=np.int64)
        if cw.ndim != 2 or cw.shape[0] == 0:
            raise ValueError("codebook must be a non-empty (M, n) array")
        if cw.min() < 0 or cw.max() >= sum(self.layer_counts):
            raise ValueError("symbol index out of range")
        if len({row.tobytes() for row in cw}) != cw.shape[0]:
            raise ValueError("codewords must be pairwise distinct")
        cw.setflags(write=False)
        object.__setattr__(self, "codewords", cw)
        object.__setattr__(self, "layer_counts", tuple(int(x) for x in self.layer_counts))

    @property
    def M(self) -> int:
        return self.codewords.shape[0]

    @property
    def n(self) -> int:
        return self.codewords.shape[1]

    def __len__(self):
        return self.M

    def symbol_counts(self) -> np.ndarray:
        """(M, L) matrix: occurrences of each symbol in each codeword."""
        L = sum(self.layer_counts)
        out = np.zeros((self.M, L), dtype=np.int64)
        rows = np.repeat(np.arange(self.M), self.n)
        np.add.at(out, (rows, self.codewords.ravel()), 1)
        return out

    def layer_counts_per_codeword(self) -> np.ndarray:
        """(M, C) matrix: channel uses spent on each layer by each codeword."""
        layer_of = np.repeat(np.arange(len(self.layer_counts)), self.layer_counts)
        sc = self.symbol_counts()
        out = np.zeros((self.M, len(self.layer_counts)), dtype=np.int64)
        for c in range(len(self.layer_counts)):
            out[:, c] = sc[:, layer_of == c].sum(axis=1)
        return out

    def is_constant_composition(self) -> bool:
        sc = self.symbol_counts()
        return bool(np.all(sc == sc[0]))


def _multiset_permutations(items: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Distinct permutations in lexicographic order (classic next-permutation)."""
    a = sorted(items)
    n = len(a)
    while True:
        yield tuple(a)
        i = n - 2
        while i >= 0 and a[i] >= a[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while a[j] <= a[i]:
            j -= 1
        a[i], a[j] = a[j], a[i]
        a[i + 1 :] = reversed(a[i + 1 :])


def _composition_multiset(spec: CodeSpec) -> list[int]:
    out = []
    for g, k in enumerate(spec.composition):
        out.extend([g] * k)
    return out


def enumerate_codebook(spec: CodeSpec, cap: int = ENUMERATION_CAP) -> Codebook:
    """Every codeword of the composition class, in lexicographic order."""
    logc = spec.log_max_messages
    if logc > math.log(cap) + 1e-9:
        raise TooManyCodewords(f"composition class has ~{math.exp(min(logc, 700)):.3g} words, cap is {cap}")
    words = list(_multiset_permutations(_composition_multiset(spec)))
    if spec.message_count != "max":
        words = words[: int(spec.message_count)]
    return Codebook(np.array(words, dtype=np.int64), spec.constellation.counts, spec)


def sample_codebook(spec: CodeSpec, cap: int = ENUMERATION_CAP) -> Codebook:
    """M distinct codewords drawn uniformly from the composition class.

    Each draw is a Fisher-Yates shuffle of the composition multiset with a
    generator seeded from ``spec.seed``; duplicates are rejected. When M is
    within 10% of the class size the class is enumerated and subsampled.
    """
    if spec.seed is None:
        raise ValueError("sampling needs a seed")
    logc = spec.log_max_messages
    M = spec.resolved_message_count()
    if not isinstance(M, int):
        raise Exhausted("cannot sample the full composition class at this size")
    if math.log(M) > logc + 1e-9:
        raise Exhausted(f"M={M} exceeds the composition class size")
    rng = np.random.default_rng(spec.seed)
    if logc <= math.log(cap) + 1e-9 and M >= 0.9 * math.exp(logc):
        full = np.array(list(_multiset_permutations(_composition_multiset(spec))), dtype=np.int64)
        pick = rng.choice(full.shape[0], size=M, replace=False)
        return Codebook(full[pick], spec.constellation.counts, spec)
    base = np.array(_composition_multiset(spec), dtype=np.int64)
    seen: set[bytes] = set()
    words = []
    while len(words) < M:
        w = rng.permutation(base)
        key = w.tobytes()
        if key in seen:
            continue
        seen.add(key)
        words.append(w)
    return Codebook(np.array(words), spec.constellation.counts, spec)


def build_codebook(spec: CodeSpec) -> Codebook:
    return enumerate_codebook(spec) if spec.mode == "enumerate" else sample_codebook(spec)


def code_type(codebook: Codebook) -> TypeVector:
    """Symbol frequencies averaged over all codewords."""
    totals = codebook.symbol_counts().sum(axis=0)
    freqs = totals / (codebook.M * codebook.n)
    return TypeVector(tuple(float(f) for f in freqs), codebook.layer_counts)


# -- file format ---------------------------------------------------------------
# header:  "# n=<n> M=<M> layers=<L_1>,<L_2>,..."
# body:    one codeword per line, comma-separated "c:l" tokens (0-based)


def format_codebook(codebook: Codebook) -> str:
    offsets = np.concatenate([[0], np.cumsum(codebook.layer_counts)[:-1]])
    layer_of = np.repeat(np.arange(len(codebook.layer_counts)), codebook.layer_counts)
    lines = [f"# n={codebook.n} M={codebook.M} layers={','.join(map(str, codebook.layer_counts))}"]
    for row in codebook.codewords:
        lines.append(",".join(f"{layer_of[g]}:{g - offsets[layer_of[g]]}" for g in row))
    return "\n".join(lines) + "\n"


def write_codebook(codebook: Codebook, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_codebook(codebook))


def read_codebook(path) -> Codebook:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("#"):
            raise ValueError("codebook file is missing its header line")
        fields = dict(part.split("=", 1) for part in header[1:].split())
        n, M = int(fields["n"]), int(fields["M"])
        layer_counts = tuple(int(x) for x in fields["layers"].split(","))
        offsets = np.concatenate([[0], np.cumsum(layer_counts)[:-1]])
        words = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            row = []
            for tok in line.split(","):
                c, ell = (int(x) for x in tok.split(":"))
                if not 0 <= ell < layer_counts[c]:
                    raise ValueError(f"symbol token {tok} out of range")
                row.append(int(offsets[c]) + ell)
            if len(row) != n:
                raise CountMismatch(f"codeword of length {len(row)}, header says n={n}")
            words.append(row)
    if len(words) != M:
        raise CountMismatch(f"file holds {len(words)} codewords, header says M={M}")
    return Codebook(np.array(words, dtype=np.int64), layer_counts)
