"""The eight bit-sequence statistical tests.

Each test is a pure function from a :class:`~randsuite.bitseq.BitSequence`
(plus parameters) to a :class:`TestOutcome` holding the observed statistic,
the p-value, and the pass/fail verdict at significance ``alpha``.

Conventions that remedy known defects in circulating descriptions of these
tests (both are recorded in every outcome's params so reports are
auditable):

* the spectral test's 95 % peak-height threshold is ``sqrt(n * ln(1/0.05))``
  (an n-independent threshold cannot bound moduli that grow like sqrt(n));
* the approximate-entropy statistic is ``2n * (ln 2 - (phi_m - phi_{m+1}))``
  (with ``ln n`` the statistic would not be chi-squared distributed, and the
  standard worked example is reproducible only with ``ln 2``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

import numpy as np
from scipy import special as _sp

from .bitseq import BitSequence
from .errors import (
    BlockTooLarge,
    EmptySequence,
    PatternTooLong,
    SampleTooShort,
)
from .special import as_probability, erfc, upper_igamc

__all__ = [
    "TestId",
    "CusumMode",
    "TestParams",
    "TestOutcome",
    "MIN_LENGTH",
    "ALL_TESTS",
    "frequency_test",
    "block_frequency_test",
    "runs_test",
    "longest_run_of_ones",
    "longest_run_test",
    "dft_test",
    "approx_entropy_test",
    "cusum_test",
    "run_test",
]


class TestId(str, Enum):
    __test__ = False  # keep pytest from collecting this as a test class

    FREQUENCY = "frequency"
    BLOCK_FREQUENCY = "block_frequency"
    RUNS = "runs"
    LONGEST_RUN = "longest_run"
    DFT = "dft"
    APPROX_ENTROPY = "approx_entropy"
    CUSUM_FORWARD = "cusum_forward"
    CUSUM_BACKWARD = "cusum_backward"

    def __str__(self):
        return self.value


class CusumMode(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


ALL_TESTS = tuple(TestId)

# Minimum length for meaningful results, enforced unless
# TestParams.enforce_min_length is off.
MIN_LENGTH = {
    TestId.FREQUENCY: 100,
    TestId.BLOCK_FREQUENCY: 100,
    TestId.RUNS: 100,
    TestId.LONGEST_RUN: 128,
    TestId.DFT: 1000,
    TestId.APPROX_ENTROPY: 65,
    TestId.CUSUM_FORWARD: 100,
    TestId.CUSUM_BACKWARD: 100,
}


@dataclass(frozen=True)
class TestParams:
    """Knobs shared by the tests.

    ``enforce_min_length`` exists so the tiny pedagogical sequences used in
    the worked examples can run; leave it on for real data.
    """

    __test__ = False

    alpha: float = 0.01
    block_size_m: int = 128
    pattern_len_m: int = 2
    enforce_min_length: bool = True

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.block_size_m < 2:
            raise ValueError(f"block_size_m must be >= 2, got {self.block_size_m}")
        if self.pattern_len_m < 1:
            raise ValueError(f"pattern_len_m must be >= 1, got {self.pattern_len_m}")


@dataclass(frozen=True)
class TestOutcome:
    """One test applied to one sample."""

    __test__ = False

    test_id: TestId
    statistic: float
    p_value: float
    passed: bool
    params: Mapping[str, object]


def _finish(test_id: TestId, statistic: float, p: float, alpha: float,
            record: dict) -> TestOutcome:
    p = as_probability(p, what=f"{test_id.value} p-value")
    record["alpha"] = alpha
    return TestOutcome(test_id=test_id, statistic=float(statistic), p_value=p,
                       passed=p >= alpha, params=record)


def _check_length(test_id: TestId, n: int, params: TestParams) -> None:
    min_n = MIN_LENGTH[test_id]
    if params.enforce_min_length and n < min_n:
        raise SampleTooShort(
            f"{test_id.value} needs at least {min_n} bits, got {n}",
            min_length=min_n, actual=n)
    if n == 0:
        raise EmptySequence(f"{test_id.value} needs a non-empty sequence")


def frequency_test(seq: BitSequence, params: TestParams = TestParams()) -> TestOutcome:
    """Overall balance of ones and zeros.

    The bits are mapped to +/-1 and summed; the normalized absolute sum is
    referred to the half-normal distribution.
    """
    n = seq.n
    _check_length(TestId.FREQUENCY, n, params)
    s_n = 2 * seq.count_ones() - n
    s_obs = abs(s_n) / math.sqrt(n)
    p = erfc(s_obs / math.sqrt(2))
    return _finish(TestId.FREQUENCY, s_obs, p, params.alpha,
                   {"n": n, "partial_sum": int(s_n)})


def block_frequency_test(seq: BitSequence, params: TestParams = TestParams()) -> TestOutcome:
    """Balance of ones within fixed-size non-overlapping blocks.

    Uses ``block_size_m`` bits per block; trailing bits that do not fill a
    block are discarded (and reported in the outcome's params).
    """
    n = seq.n
    _check_length(TestId.BLOCK_FREQUENCY, n, params)
    m = params.block_size_m
    if m > n:
        raise BlockTooLarge(f"block size {m} exceeds sequence length {n}")
    num_blocks = n // m
    bits = seq.asarray()[:num_blocks * m]
    ones = bits.reshape(num_blocks, m).sum(axis=1, dtype=np.int64)
    # 4M * sum((pi_i - 1/2)^2) computed on integer one-counts so that the
    # worked examples come out exact.
    chi2 = 4.0 * float(((ones - m / 2.0) ** 2).sum()) / m
    p = upper_igamc(num_blocks / 2.0, chi2 / 2.0)
    return _finish(TestId.BLOCK_FREQUENCY, chi2, p, params.alpha,
                   {"n": n, "block_size_m": m, "num_blocks": num_blocks,
                    "discarded_bits": n - num_blocks * m})


def runs_test(seq: BitSequence, params: TestParams = TestParams()) -> TestOutcome:
    """Number of maximal runs of identical bits.

    Applicable only when the overall proportion of ones is roughly fair
    (|pi - 1/2| < 2/sqrt(n)); otherwise the p-value is 0 by definition.
    """
    n = seq.n
    _check_length(TestId.RUNS, n, params)
    bits = seq.asarray()
    pi = float(bits.sum()) / n
    v_obs = int(np.count_nonzero(bits[1:] != bits[:-1])) + 1
    record = {"n": n, "proportion_of_ones": pi}
    if abs(pi - 0.5) >= 2.0 / math.sqrt(n) or pi in (0.0, 1.0):
        record["prerequisite_ok"] = False
        return _finish(TestId.RUNS, v_obs, 0.0, params.alpha, record)
    record["prerequisite_ok"] = True
    p = erfc(abs(v_obs - 2.0 * n * pi * (1 - pi))
             / (2.0 * math.sqrt(2.0 * n) * pi * (1 - pi)))
    return _finish(TestId.RUNS, v_obs, p, params.alpha, record)


def longest_run_of_ones(block: BitSequence) -> int:
    """Length of the longest maximal run of ones; 0 for all-zero or empty."""
    if block.n == 0:
        return 0
    return int(_longest_runs(block.asarray()[None, :])[0])


def _longest_runs(blocks: np.ndarray) -> np.ndarray:
    """Longest run of ones in each row of a 2-D 0/1 array."""
    num_blocks, m = blocks.shape
    padded = np.zeros((num_blocks, m + 1), dtype=np.int8)
    padded[:, :m] = blocks
    flat = padded.reshape(-1)
    edges = np.diff(flat, prepend=0)
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    out = np.zeros(num_blocks, dtype=np.int64)
    np.maximum.at(out, starts // (m + 1), ends - starts)
    return out


# Block size selection and reference class probabilities for the
# longest-run test, keyed by minimum sequence length.
_LONGEST_RUN_CONFIG = (
    # (min_n, M, K, N, run-length upper edge of lowest class, pi table)
    (750000, 10000, 6, 75, 10,
     (0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727)),
    (6272, 128, 5, 49, 4,
     (0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124)),
    (128, 8, 3, 16, 1,
     (0.2148, 0.3672, 0.2305, 0.1875)),
)


def longest_run_statistic(class_counts, block_size: int) -> float:
    """Chi-squared statistic from longest-run class counts.

    ``class_counts`` must hold K+1 counts summing to the reference block
    count N for ``block_size``; exposed separately so the classification and
    the statistic can be validated independently.
    """
    for _, m, k, n_blocks, _, pis in _LONGEST_RUN_CONFIG:
        if m == block_size:
            counts = np.asarray(class_counts, dtype=np.float64)
            if counts.size != k + 1:
                raise ValueError(f"expected {k + 1} class counts for M={m}, "
                                 f"got {counts.size}")
            expected = n_blocks * np.asarray(pis)
            return float((((counts - expected) ** 2) / expected).sum())
    raise ValueError(f"unsupported block size {block_size}; use 8, 128 or 10000")


def longest_run_test(seq: BitSequence, params: TestParams = TestParams()) -> TestOutcome:
    """Distribution of the longest run of ones within fixed blocks.

    The block size is selected from the sequence length (8 / 128 / 10000);
    exactly N reference blocks are used and the remaining bits discarded.
    A sequence shorter than 128 bits has no defined block size, so the
    minimum length is enforced regardless of ``enforce_min_length``.
    """
    n = seq.n
    if n < 128:
        raise SampleTooShort(
            f"longest_run needs at least 128 bits (no block size is defined "
            f"below that), got {n}", min_length=128, actual=n)
    for min_n, m, k, num_blocks, v0_edge, pis in _LONGEST_RUN_CONFIG:
        if n >= min_n:
            break
    runs = _longest_runs(seq.asarray()[:num_blocks * m].reshape(num_blocks, m))
    classes = np.clip(runs - v0_edge, 0, k)
    counts = np.bincount(classes, minlength=k + 1)
    chi2 = longest_run_statistic(counts, m)
    p = upper_igamc(k / 2.0, chi2 / 2.0)
    return _finish(TestId.LONGEST_RUN, chi2, p, params.alpha,
                   {"n": n, "block_size_m": m, "num_classes_k": k,
                    "num_blocks": num_blocks,
                    "class_counts": [int(c) for c in counts],
                    "discarded_bits": n - num_blocks * m})


_DFT_THRESHOLD_FORMULA = "sqrt(n*ln(1/0.05))"


def dft_test(seq: BitSequence, params: TestParams = TestParams()) -> TestOutcome:
    """Spectral test for periodic patterns.

    The +/-1 sequence is Fourier transformed; the number of modulus values
    (first floor(n/2) frequencies) under the 95 % peak-height threshold is
    compared with its expectation.
    """
    n = seq.n
    _check_length(TestId.DFT, n, params)
    x = seq.asarray().astype(np.float64) * 2.0 - 1.0
    moduli = np.abs(np.fft.rfft(x)[:n // 2])
    threshold = math.sqrt(n * math.log(1.0 / 0.05))
    n_ideal = 0.95 * n / 2.0
    n_obs = int(np.count_nonzero(moduli < threshold))
    d = (n_ideal - n_obs) / math.sqrt(n * 0.95 * 0.05 / 4.0)
    p = erfc(abs(d) / math.sqrt(2))
    return _finish(TestId.DFT, d, p, params.alpha,
                   {"n": n, "threshold": threshold,
                    "threshold_formula": _DFT_THRESHOLD_FORMULA,
                    "n_ideal": n_ideal, "n_obs": n_obs})


def _phi(bits: np.ndarray, block_len: int) -> float:
    """Sum of (count/n) * ln(count/n) over observed overlapping patterns."""
    n = bits.size
    ext = np.concatenate([bits, bits[:block_len - 1]])
    codes = np.zeros(n, dtype=np.int64)
    for j in range(block_len):
        codes = (codes << 1) | ext[j:j + n]
    counts = np.bincount(codes, minlength=2 ** block_len)
    freq = counts[counts > 0] / n
    return float((freq * np.log(freq)).sum())


_APEN_STATISTIC_FORMULA = "2*n*(ln(2) - (phi_m - phi_{m+1}))"


def approx_entropy_test(seq: BitSequence, params: TestParams = TestParams()) -> TestOutcome:
    """Relative frequency of overlapping m-bit vs (m+1)-bit patterns.

    Patterns wrap cyclically (the first block_len-1 bits are appended), so
    each block length yields exactly n overlapping windows.
    """
    n = seq.n
    _check_length(TestId.APPROX_ENTROPY, n, params)
    m = params.pattern_len_m
    if m + 1 > n or m > 24:
        raise PatternTooLong(f"pattern length {m} is not usable at n={n}")
    if params.enforce_min_length and m >= int(math.log2(n)) - 1:
        raise PatternTooLong(
            f"pattern length {m} is too long for meaningful results at n={n} "
            f"(need m < floor(log2(n)) - 1)")
    bits = seq.asarray().astype(np.int64)
    phi_m = _phi(bits, m)
    phi_m1 = _phi(bits, m + 1)
    obs = 2.0 * n * (math.log(2.0) - (phi_m - phi_m1))
    p = upper_igamc(2.0 ** (m - 1), obs / 2.0)
    return _finish(TestId.APPROX_ENTROPY, obs, p, params.alpha,
                   {"n": n, "pattern_len_m": m, "phi_m": phi_m, "phi_m1": phi_m1,
                    "statistic_formula": _APEN_STATISTIC_FORMULA})


def _cusum_pvalue(n: int, z: int) -> float:
    """Tail probability of the maximum absolute partial sum."""
    sqrt_n = math.sqrt(n)
    hi = math.floor((n / z - 1) / 4)
    lo1 = math.floor((-n / z + 1) / 4)
    lo2 = math.floor((-n / z - 3) / 4)
    k1 = np.arange(lo1, hi + 1, dtype=np.float64)
    k2 = np.arange(lo2, hi + 1, dtype=np.float64)
    term1 = (_sp.ndtr((4 * k1 + 1) * z / sqrt_n)
             - _sp.ndtr((4 * k1 - 1) * z / sqrt_n)).sum() if k1.size else 0.0
    term2 = (_sp.ndtr((4 * k2 + 3) * z / sqrt_n)
             - _sp.ndtr((4 * k2 + 1) * z / sqrt_n)).sum() if k2.size else 0.0
    return 1.0 - float(term1) + float(term2)


def cusum_test(seq: BitSequence, mode: CusumMode | str = CusumMode.FORWARD,
               params: TestParams = TestParams()) -> TestOutcome:
    """Random-walk excursion test on cumulative +/-1 sums.

    Forward mode walks the sequence as recorded; backward mode sums the
    last i elements instead (equivalently, walks the reversed sequence).
    The statistic z is the maximum absolute partial sum.
    """
    mode = CusumMode(mode)
    test_id = (TestId.CUSUM_FORWARD if mode is CusumMode.FORWARD
               else TestId.CUSUM_BACKWARD)
    n = seq.n
    _check_length(test_id, n, params)
    x = seq.asarray().astype(np.int64) * 2 - 1
    if mode is CusumMode.BACKWARD:
        x = x[::-1]
    z = int(np.abs(np.cumsum(x)).max())
    p = _cusum_pvalue(n, z)
    return _finish(test_id, z, p, params.alpha, {"n": n, "mode": mode.value})


def run_test(test_id: TestId, seq: BitSequence,
             params: TestParams = TestParams()) -> TestOutcome:
    """Dispatch a test by id."""
    test_id = TestId(test_id)
    if test_id is TestId.CUSUM_FORWARD:
        return cusum_test(seq, CusumMode.FORWARD, params)
    if test_id is TestId.CUSUM_BACKWARD:
        return cusum_test(seq, CusumMode.BACKWARD, params)
    fn = {
        TestId.FREQUENCY: frequency_test,
        TestId.BLOCK_FREQUENCY: block_frequency_test,
        TestId.RUNS: runs_test,
        TestId.LONGEST_RUN: longest_run_test,
        TestId.DFT: dft_test,
        TestId.APPROX_ENTROPY: approx_entropy_test,
    }[test_id]
    return fn(seq, params)
