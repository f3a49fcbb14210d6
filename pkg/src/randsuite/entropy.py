"""Per-sample entropy measures and source-stability analytics.

Min-entropy is the conservative uniformity measure: -log2 of the most
probable outcome's empirical frequency.  It never exceeds the Shannon
entropy and is the better discriminator near uniformity, which is why the
per-sample time series uses it.

The deviation series tracks (#ones so far) - i/2 along a long sequence;
its slope exposes bias and its kinks expose drift that a whole-sequence
histogram cannot see.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bitseq import BitSequence, SampleSet
from .errors import DomainError, EmptySequence, EmptySet
from .special import erfc_inv

__all__ = [
    "min_entropy",
    "shannon_entropy",
    "EntropySeries",
    "entropy_series",
    "proportion_band_for_length",
    "DeviationSeries",
    "deviation_series",
    "write_entropy_csv",
    "write_deviation_csv",
]


def min_entropy(seq: BitSequence) -> float:
    """-log2(max(p1, p0)) of the empirical bit distribution, in [0, 1]."""
    if seq.n == 0:
        raise EmptySequence("min_entropy needs at least one bit")
    p1 = seq.count_ones() / seq.n
    return -math.log2(max(p1, 1.0 - p1))


def shannon_entropy(seq: BitSequence) -> float:
    """Empirical Shannon entropy in bits, with 0*log(0) := 0."""
    if seq.n == 0:
        raise EmptySequence("shannon_entropy needs at least one bit")
    p1 = seq.count_ones() / seq.n
    h = 0.0
    for p in (p1, 1.0 - p1):
        if p > 0.0:
            h -= p * math.log2(p)
    return h


@dataclass(frozen=True)
class EntropySeries:
    """Time-ordered per-sample entropies for one source."""

    source_id: str
    sample_indices: tuple[int, ...]
    timestamps: tuple
    min_entropies: tuple[float, ...]
    shannon_entropies: tuple[float, ...]

    def __len__(self):
        return len(self.sample_indices)


def entropy_series(sample_set: SampleSet) -> EntropySeries:
    """One (min-entropy, Shannon-entropy) point per sample, in order."""
    if len(sample_set) == 0:
        raise EmptySet("cannot compute an entropy series for an empty sample set")
    return EntropySeries(
        source_id=sample_set.source_id,
        sample_indices=tuple(s.sample_index for s in sample_set),
        timestamps=tuple(s.timestamp for s in sample_set),
        min_entropies=tuple(min_entropy(s) for s in sample_set),
        shannon_entropies=tuple(shannon_entropy(s) for s in sample_set),
    )


def proportion_band_for_length(n: int, alpha: float = 0.01) -> tuple[float, float]:
    """Acceptable proportion of ones for an n-bit sequence at significance alpha.

    Inverts the frequency test: a proportion p passes iff
    erfc(sqrt(n) * |2p - 1| / sqrt(2)) >= alpha, i.e.
    |p - 1/2| <= sqrt(2) * erfc_inv(alpha) / (2 * sqrt(n)).
    Membership in the open band is exactly "frequency-test p-value > alpha".
    """
    if n < 1:
        raise DomainError(f"sequence length must be >= 1, got {n}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    halfwidth = math.sqrt(2.0) * erfc_inv(alpha) / (2.0 * math.sqrt(n))
    return 0.5 - halfwidth, 0.5 + halfwidth


@dataclass(frozen=True)
class DeviationSeries:
    """(#ones in the first i bits) - i/2, sampled every ``stride`` bits."""

    source_id: str
    bit_indices: np.ndarray
    deviations: np.ndarray

    def __len__(self):
        return len(self.bit_indices)


def deviation_series(seq: BitSequence, stride: int = 8192) -> DeviationSeries:
    """Deviation of the running ones-count from the ideal i/2 line.

    Points are emitted at i = stride, 2*stride, ..., and always at i = n,
    so the terminal value equals n * (proportion_of_ones - 1/2) exactly.
    """
    if seq.n == 0:
        raise EmptySequence("deviation_series needs at least one bit")
    if stride < 1:
        raise DomainError(f"stride must be >= 1, got {stride}")
    idx = np.arange(stride, seq.n + 1, stride, dtype=np.int64)
    if idx.size == 0 or idx[-1] != seq.n:
        idx = np.concatenate([idx, [seq.n]])
    ones = np.cumsum(seq.asarray(), dtype=np.int64)
    dev = ones[idx - 1].astype(np.float64) - idx / 2.0
    return DeviationSeries(source_id=seq.source_id, bit_indices=idx, deviations=dev)


def write_entropy_csv(series: EntropySeries, path) -> None:
    """Columns: sample_index, timestamp (ISO 8601 or empty), min_entropy, shannon_entropy."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_index", "timestamp", "min_entropy", "shannon_entropy"])
        for i, ts, h_min, h_sh in zip(series.sample_indices, series.timestamps,
                                      series.min_entropies, series.shannon_entropies):
            writer.writerow([i, ts.isoformat() if ts else "", repr(h_min), repr(h_sh)])


def write_deviation_csv(series: DeviationSeries, path) -> None:
    """Columns: bit_index, deviation."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bit_index", "deviation"])
        for i, d in zip(series.bit_indices, series.deviations):
            writer.writerow([int(i), repr(float(d))])
