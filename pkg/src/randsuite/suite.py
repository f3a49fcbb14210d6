"""The three-step batch testing protocol over a sample set.

Step 1 applies every selected test to every sample.  Step 2 compares each
test's pass proportion against an acceptance band around 1 - alpha.  Step 3
checks that each test's p-values are uniform on [0, 1) via a ten-bin
chi-squared test (needs at least 55 samples).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bitseq import SampleSet
from .errors import DomainError, EmptySet, SampleTooShort, TooFewSamples
from .randtests import (
    ALL_TESTS,
    MIN_LENGTH,
    TestId,
    TestOutcome,
    TestParams,
    run_test,
)
from .randtests import _APEN_STATISTIC_FORMULA, _DFT_THRESHOLD_FORMULA
from .special import as_probability, upper_igamc

__all__ = [
    "UNIFORMITY_MIN_SAMPLES",
    "ProportionBand",
    "proportion_band",
    "uniformity_check",
    "SuiteConfig",
    "TestAggregate",
    "SuiteReport",
    "run_suite",
    "report_to_dict",
    "write_report_json",
    "write_results_csv",
]

UNIFORMITY_MIN_SAMPLES = 55

# Fixed column order of the flat results CSV.
CSV_COLUMNS = ("test_id", "sample_index", "statistic", "p_value", "passed")


@dataclass(frozen=True)
class ProportionBand:
    """Acceptance band (1-alpha) +/- c*sqrt(alpha*(1-alpha)/m).

    The upper edge is clamped at 1.  Membership is strict at the bottom
    (a proportion exactly on the lower edge fails) and inclusive at the
    top, so a clamped band never rejects a perfect score.
    """

    center: float
    halfwidth: float
    coefficient: float
    sample_count: int

    @property
    def lower(self) -> float:
        return self.center - self.halfwidth

    @property
    def upper(self) -> float:
        return min(self.center + self.halfwidth, 1.0)

    def contains(self, proportion: float) -> bool:
        return self.lower < proportion <= self.upper


def proportion_band(alpha: float, m: int, coefficient: float = 3.0) -> ProportionBand:
    """Acceptance band for the proportion of passed samples.

    The default coefficient 3 is the customary choice; 2.6 is a published
    alternative, hence the knob.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    if m < 1:
        raise DomainError(f"sample count must be >= 1, got {m}")
    if coefficient <= 0.0:
        raise DomainError(f"band coefficient must be > 0, got {coefficient}")
    halfwidth = coefficient * math.sqrt(alpha * (1.0 - alpha) / m)
    return ProportionBand(center=1.0 - alpha, halfwidth=halfwidth,
                          coefficient=coefficient, sample_count=m)


def uniformity_check(p_values, *, significance: float = 0.0001):
    """Ten-bin chi-squared uniformity check over a test's p-values.

    Bins are [k/10, (k+1)/10) for k = 0..9 with 1.0 landing in the top bin.

    Returns
    -------
    (chi2, p, ok) : tuple of (float, float, bool)
        ``ok`` is ``p >= significance``.
    """
    p_values = np.asarray(list(p_values), dtype=np.float64)
    m = p_values.size
    if m < UNIFORMITY_MIN_SAMPLES:
        raise TooFewSamples(
            f"uniformity check needs at least {UNIFORMITY_MIN_SAMPLES} samples, got {m}",
            min_count=UNIFORMITY_MIN_SAMPLES, actual=m)
    for p in p_values:
        as_probability(p, what="uniformity input")
    bins = np.minimum((p_values * 10).astype(np.int64), 9)
    counts = np.bincount(bins, minlength=10)
    expected = m / 10.0
    chi2 = float(((counts - expected) ** 2).sum() / expected)
    p = upper_igamc(9.0 / 2.0, chi2 / 2.0)
    return chi2, p, p >= significance


@dataclass(frozen=True)
class SuiteConfig:
    """Test selection plus the knobs of each protocol step."""

    params: TestParams = field(default_factory=TestParams)
    tests: tuple[TestId, ...] = ALL_TESTS
    band_coefficient: float = 3.0
    uniformity_alpha: float = 0.0001

    def __post_init__(self):
        tests = tuple(TestId(t) for t in self.tests)
        if not tests:
            raise ValueError("at least one test must be selected")
        if len(set(tests)) != len(tests):
            raise ValueError("duplicate test ids in selection")
        object.__setattr__(self, "tests", tests)


@dataclass(frozen=True)
class TestAggregate:
    """Per-test aggregation over all samples, ordered by sample_index."""

    __test__ = False

    test_id: TestId
    sample_indices: tuple[int, ...]
    outcomes: tuple[TestOutcome, ...]
    pass_proportion: float
    band: ProportionBand
    proportion_ok: bool
    uniformity_chi2: float | None = None
    uniformity_p: float | None = None
    uniformity_ok: bool | None = None

    @property
    def p_values(self) -> tuple[float, ...]:
        return tuple(o.p_value for o in self.outcomes)


@dataclass(frozen=True)
class SuiteReport:
    per_test: dict[TestId, TestAggregate]
    overall_pass: bool
    sample_count: int
    config: SuiteConfig


def run_suite(sample_set: SampleSet, config: SuiteConfig = SuiteConfig()) -> SuiteReport:
    """Apply the full three-step protocol to one sample set.

    The result is independent of sample order: all aggregation is keyed by
    sample_index.  With fewer than 55 samples the uniformity step is
    skipped and the verdict rests on the proportion step alone.
    """
    if len(sample_set) == 0:
        raise EmptySet("cannot run the suite on an empty sample set")
    m = len(sample_set)
    samples = sorted(sample_set, key=lambda s: s.sample_index)

    per_test: dict[TestId, TestAggregate] = {}
    overall = True
    for test_id in config.tests:
        outcomes = []
        for s in samples:
            try:
                outcomes.append(run_test(test_id, s, config.params))
            except SampleTooShort as exc:
                raise SampleTooShort(
                    f"sample {s.sample_index}: {exc}",
                    min_length=exc.min_length, actual=exc.actual,
                    sample_index=s.sample_index) from exc
        passes = sum(1 for o in outcomes if o.passed)
        proportion = passes / m
        band = proportion_band(config.params.alpha, m, config.band_coefficient)
        proportion_ok = band.contains(proportion)
        chi2 = p_uni = uni_ok = None
        if m >= UNIFORMITY_MIN_SAMPLES:
            chi2, p_uni, uni_ok = uniformity_check(
                [o.p_value for o in outcomes], significance=config.uniformity_alpha)
        agg = TestAggregate(
            test_id=test_id,
            sample_indices=tuple(s.sample_index for s in samples),
            outcomes=tuple(outcomes),
            pass_proportion=proportion,
            band=band,
            proportion_ok=proportion_ok,
            uniformity_chi2=chi2,
            uniformity_p=p_uni,
            uniformity_ok=uni_ok,
        )
        per_test[test_id] = agg
        overall = overall and proportion_ok and (uni_ok is None or uni_ok)
    return SuiteReport(per_test=per_test, overall_pass=overall,
                       sample_count=m, config=config)


def _config_to_dict(config: SuiteConfig) -> dict:
    return {
        "alpha": config.params.alpha,
        "block_size_m": config.params.block_size_m,
        "pattern_len_m": config.params.pattern_len_m,
        "enforce_min_length": config.params.enforce_min_length,
        "tests": [t.value for t in config.tests],
        "band_coefficient": config.band_coefficient,
        "uniformity_alpha": config.uniformity_alpha,
        "min_lengths": {t.value: MIN_LENGTH[t] for t in config.tests},
    }


def report_to_dict(report: SuiteReport) -> dict:
    """JSON-ready view of a report, conventions included for auditability."""
    tests = {}
    for test_id, agg in report.per_test.items():
        entry = {
            "pass_proportion": agg.pass_proportion,
            "proportion_ok": agg.proportion_ok,
            "band": {
                "center": agg.band.center,
                "halfwidth": agg.band.halfwidth,
                "lower": agg.band.lower,
                "upper": agg.band.upper,
                "coefficient": agg.band.coefficient,
                "sample_count": agg.band.sample_count,
            },
            "sample_indices": list(agg.sample_indices),
            "p_values": list(agg.p_values),
        }
        if agg.uniformity_ok is not None:
            entry["uniformity"] = {
                "chi2": agg.uniformity_chi2,
                "p_value": agg.uniformity_p,
                "ok": agg.uniformity_ok,
            }
        tests[test_id.value] = entry
    return {
        "config": _config_to_dict(report.config),
        "conventions": {
            "dft_peak_threshold": _DFT_THRESHOLD_FORMULA,
            "approx_entropy_statistic": _APEN_STATISTIC_FORMULA,
            "proportion_band": "(1-alpha) +/- c*sqrt(alpha*(1-alpha)/m); "
                               "pass iff lower < proportion <= min(upper, 1)",
            "uniformity_bins": "[k/10, (k+1)/10) for k=0..9; 1.0 in top bin",
        },
        "sample_count": report.sample_count,
        "overall_pass": report.overall_pass,
        "tests": tests,
    }


def write_report_json(report: SuiteReport, path) -> None:
    Path(path).write_text(
        json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n")


def write_results_csv(report: SuiteReport, path) -> None:
    """Flat per-(test, sample) rows; column order is fixed."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for test_id in report.config.tests:
            agg = report.per_test[test_id]
            for idx, outcome in zip(agg.sample_indices, agg.outcomes):
                writer.writerow([test_id.value, idx, repr(outcome.statistic),
                                 repr(outcome.p_value), outcome.passed])
