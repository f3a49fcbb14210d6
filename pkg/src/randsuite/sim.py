"""Deterministic generator of noisy-qubit bit samples.

Each simulated qubit emits Bernoulli shots whose effective bias composes a
pre-readout excitation probability with an asymmetric readout error:

    p_eff = p1_state * (1 - eps10) + (1 - p1_state) * eps01

Parameters are piecewise-constant across calibration epochs, with an
optional anomaly window overriding the state bias mid-run.  Randomness
comes from a counter-based stream (Philox) keyed by
(master_seed, qubit_id, sample_index), so any sample can be regenerated
bit-for-bit in isolation and distinct samples are independent by key
separation, not by shared-stream discipline.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass, replace
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from .bitseq import (
    BitSequence,
    Manifest,
    ManifestEntry,
    SampleSet,
    save_manifest,
    serialize_bits,
)
from .errors import IndexOutOfRange, ManifestError

__all__ = [
    "Epoch",
    "Anomaly",
    "QubitNoiseModel",
    "ExperimentPlan",
    "effective_bias",
    "generate_sample",
    "generate_experiment",
    "unbiased_plan",
    "biased_demo_plan",
    "plan_to_dict",
    "plan_from_dict",
    "load_plan",
    "save_plan",
    "with_seed",
    "write_experiment",
]

# With the default interval, 579 samples span just under five days.
DEFAULT_SAMPLE_INTERVAL_S = 746.0
DEFAULT_START_TIME = datetime(2019, 1, 1, tzinfo=timezone.utc)

_MAX_SEED = 2 ** 64


def _check_prob(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class Epoch:
    """Noise parameters holding between two calibrations.

    ``p1_state`` is the probability the pre-readout state is 1 (an ideal
    Hadamard gives 0.5); ``eps01`` the probability of reading 1 given state
    0; ``eps10`` the probability of reading 0 given state 1.
    """

    start_sample: int
    p1_state: float
    eps01: float = 0.0
    eps10: float = 0.0

    def __post_init__(self):
        if self.start_sample < 0:
            raise ValueError(f"start_sample must be >= 0, got {self.start_sample}")
        _check_prob("p1_state", self.p1_state)
        _check_prob("eps01", self.eps01)
        _check_prob("eps10", self.eps10)

    @property
    def p_eff(self) -> float:
        return self.p1_state * (1.0 - self.eps10) + (1.0 - self.p1_state) * self.eps01


@dataclass(frozen=True)
class Anomaly:
    """Overrides p1_state on the half-open sample range [start, stop)."""

    start_sample: int
    stop_sample: int
    p1_override: float

    def __post_init__(self):
        if not 0 <= self.start_sample < self.stop_sample:
            raise ValueError(
                f"anomaly range [{self.start_sample}, {self.stop_sample}) is empty or negative")
        _check_prob("p1_override", self.p1_override)

    def covers(self, sample_index: int) -> bool:
        return self.start_sample <= sample_index < self.stop_sample


@dataclass(frozen=True)
class QubitNoiseModel:
    """One simulated qubit: calibration epochs plus an optional anomaly."""

    qubit_id: int
    epochs: tuple[Epoch, ...]
    anomaly: Anomaly | None = None

    def __post_init__(self):
        object.__setattr__(self, "epochs", tuple(self.epochs))
        if not 0 <= self.qubit_id <= 19:
            raise ValueError(f"qubit_id must be in 0..19, got {self.qubit_id}")
        if not self.epochs:
            raise ValueError("a noise model needs at least one epoch")
        if self.epochs[0].start_sample != 0:
            raise ValueError("epochs must cover sample indices from 0")
        starts = [e.start_sample for e in self.epochs]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError("epoch start_sample values must be strictly increasing")

    @property
    def source_id(self) -> str:
        return f"qubit-{self.qubit_id:02d}"


def effective_bias(model: QubitNoiseModel, sample_index: int) -> float:
    """Probability of reading 1 at ``sample_index`` under ``model``."""
    if sample_index < 0:
        raise IndexOutOfRange(f"sample_index must be >= 0, got {sample_index}")
    starts = [e.start_sample for e in model.epochs]
    epoch = model.epochs[bisect_right(starts, sample_index) - 1]
    p1 = epoch.p1_state
    if model.anomaly is not None and model.anomaly.covers(sample_index):
        p1 = model.anomaly.p1_override
    return p1 * (1.0 - epoch.eps10) + (1.0 - p1) * epoch.eps01


def _rng_for(master_seed: int, qubit_id: int, sample_index: int) -> np.random.Generator:
    # Key separation: the Philox key is derived from the identifying triple,
    # and the counter advances with the shots, so regeneration never depends
    # on what else has been generated.
    ss = np.random.SeedSequence(entropy=(master_seed, qubit_id, sample_index))
    return np.random.Generator(np.random.Philox(seed=ss))


def generate_sample(model: QubitNoiseModel, sample_index: int, shots: int,
                    master_seed: int, *, timestamp: datetime | None = None) -> BitSequence:
    """Generate one sample: ``shots`` Bernoulli(p_eff) draws in shot order.

    Identical (master_seed, qubit_id, sample_index, shots) reproduce the
    sequence bit-for-bit.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    if not 0 <= master_seed < _MAX_SEED:
        raise ValueError(f"master_seed must be a 64-bit value, got {master_seed}")
    p_eff = effective_bias(model, sample_index)
    rng = _rng_for(master_seed, model.qubit_id, sample_index)
    bits = rng.random(shots) < p_eff
    return BitSequence._from_packed(np.packbits(bits), shots,
                                    source_id=model.source_id,
                                    sample_index=sample_index,
                                    timestamp=timestamp)


@dataclass(frozen=True)
class ExperimentPlan:
    """Everything needed to regenerate a multi-qubit experiment."""

    qubit_models: tuple[QubitNoiseModel, ...]
    samples_per_qubit: int = 579
    shots_per_sample: int = 8192
    master_seed: int = 0
    start_time: datetime = DEFAULT_START_TIME
    sample_interval_s: float = DEFAULT_SAMPLE_INTERVAL_S

    def __post_init__(self):
        object.__setattr__(self, "qubit_models", tuple(self.qubit_models))
        if not self.qubit_models:
            raise ValueError("a plan needs at least one qubit model")
        if self.samples_per_qubit < 1:
            raise ValueError(f"samples_per_qubit must be >= 1, got {self.samples_per_qubit}")
        if self.shots_per_sample < 1:
            raise ValueError(f"shots_per_sample must be >= 1, got {self.shots_per_sample}")
        if not 0 <= self.master_seed < _MAX_SEED:
            raise ValueError(f"master_seed must be a 64-bit value, got {self.master_seed}")
        ids = [m.qubit_id for m in self.qubit_models]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate qubit_id in plan")


def generate_experiment(plan: ExperimentPlan) -> list[SampleSet]:
    """Generate one SampleSet per qubit, with synthetic advancing timestamps."""
    interval = timedelta(seconds=plan.sample_interval_s)
    sets = []
    for model in plan.qubit_models:
        samples = [
            generate_sample(model, i, plan.shots_per_sample, plan.master_seed,
                            timestamp=plan.start_time + i * interval)
            for i in range(plan.samples_per_qubit)
        ]
        sets.append(SampleSet(samples, source_id=model.source_id,
                              declared_length=plan.shots_per_sample))
    return sets


def unbiased_plan(num_qubits: int = 20, samples_per_qubit: int = 579,
                  shots_per_sample: int = 8192, master_seed: int = 42) -> ExperimentPlan:
    """Ideal reference plan: every qubit reads a fair coin, no readout error."""
    models = tuple(
        QubitNoiseModel(qubit_id=q, epochs=(Epoch(0, 0.5),))
        for q in range(num_qubits)
    )
    return ExperimentPlan(qubit_models=models, samples_per_qubit=samples_per_qubit,
                          shots_per_sample=shots_per_sample, master_seed=master_seed)


def biased_demo_plan(num_qubits: int = 20, samples_per_qubit: int = 579,
                     shots_per_sample: int = 8192, master_seed: int = 42,
                     anomaly_qubit: int | None = None,
                     num_epochs: int = 5) -> ExperimentPlan:
    """Plan with per-qubit effective biases spread over [0.47, 0.50].

    Readout asymmetries are synthetic but plausible (roughly 1-6 %), drift
    slightly across ``num_epochs`` calibration epochs, and one qubit can be
    given a mid-run state-bias anomaly.  Every epoch's p_eff stays inside
    [0.47, 0.50] by construction.
    """
    models = []
    for q in range(num_qubits):
        frac = q / (num_qubits - 1) if num_qubits > 1 else 0.0
        target = 0.47 + 0.03 * frac
        p1 = 0.5 - 0.4 * (0.5 - target)
        epochs = []
        for e in range(num_epochs):
            start = e * samples_per_qubit // num_epochs
            if epochs and start <= epochs[-1].start_sample:
                continue
            eps01 = 0.01 + 0.002 * ((q + e) % 3)
            target_e = min(0.5, max(0.47, target + 0.001 * ((q + 2 * e) % 3 - 1)))
            eps10 = (p1 + (1.0 - p1) * eps01 - target_e) / p1
            epochs.append(Epoch(start, p1, eps01, eps10))
        anomaly = None
        if anomaly_qubit is not None and q == anomaly_qubit:
            start = samples_per_qubit // 2
            width = max(2, samples_per_qubit // 30)
            anomaly = Anomaly(start, min(start + width, samples_per_qubit), 0.3)
        models.append(QubitNoiseModel(qubit_id=q, epochs=tuple(epochs), anomaly=anomaly))
    return ExperimentPlan(qubit_models=tuple(models),
                          samples_per_qubit=samples_per_qubit,
                          shots_per_sample=shots_per_sample, master_seed=master_seed)


def plan_to_dict(plan: ExperimentPlan) -> dict:
    return {
        "master_seed": plan.master_seed,
        "samples_per_qubit": plan.samples_per_qubit,
        "shots_per_sample": plan.shots_per_sample,
        "start_time": plan.start_time.isoformat(),
        "sample_interval_s": plan.sample_interval_s,
        "qubits": [
            {
                "qubit_id": m.qubit_id,
                "epochs": [
                    {"start_sample": e.start_sample, "p1_state": e.p1_state,
                     "eps01": e.eps01, "eps10": e.eps10}
                    for e in m.epochs
                ],
                **({"anomaly": {"start_sample": m.anomaly.start_sample,
                                "stop_sample": m.anomaly.stop_sample,
                                "p1_override": m.anomaly.p1_override}}
                   if m.anomaly else {}),
            }
            for m in plan.qubit_models
        ],
    }


def plan_from_dict(doc: dict) -> ExperimentPlan:
    try:
        models = tuple(
            QubitNoiseModel(
                qubit_id=int(q["qubit_id"]),
                epochs=tuple(Epoch(int(e["start_sample"]), float(e["p1_state"]),
                                   float(e.get("eps01", 0.0)), float(e.get("eps10", 0.0)))
                             for e in q["epochs"]),
                anomaly=(Anomaly(int(q["anomaly"]["start_sample"]),
                                 int(q["anomaly"]["stop_sample"]),
                                 float(q["anomaly"]["p1_override"]))
                         if "anomaly" in q else None),
            )
            for q in doc["qubits"]
        )
        start = doc.get("start_time")
        return ExperimentPlan(
            qubit_models=models,
            samples_per_qubit=int(doc["samples_per_qubit"]),
            shots_per_sample=int(doc["shots_per_sample"]),
            master_seed=int(doc["master_seed"]),
            start_time=(datetime.fromisoformat(start.replace("Z", "+00:00"))
                        if start else DEFAULT_START_TIME),
            sample_interval_s=float(doc.get("sample_interval_s", DEFAULT_SAMPLE_INTERVAL_S)),
        )
    except (KeyError, TypeError) as exc:
        raise ManifestError(f"plan document is malformed: {exc}") from exc


def load_plan(path) -> ExperimentPlan:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ManifestError(f"plan {path} is not valid JSON: {exc}") from exc
    return plan_from_dict(doc)


def save_plan(plan: ExperimentPlan, path) -> None:
    Path(path).write_text(json.dumps(plan_to_dict(plan), indent=2, sort_keys=True) + "\n")


def with_seed(plan: ExperimentPlan, master_seed: int) -> ExperimentPlan:
    """Same plan, different master seed."""
    return replace(plan, master_seed=master_seed)


_EXTENSIONS = {"ascii01": "txt", "packed-msb": "bin", "hex": "hex"}


def write_experiment(plan: ExperimentPlan, out_dir,
                     encoding: str = "packed-msb") -> list[Path]:
    """Generate the experiment and write one directory per qubit.

    Each qubit directory holds one file per sample plus a ``manifest.json``
    declaring them.  Returns the manifest paths.
    """
    if encoding not in _EXTENSIONS:
        raise ManifestError(f"unknown encoding {encoding!r}")
    out_dir = Path(out_dir)
    ext = _EXTENSIONS[encoding]
    manifest_paths = []
    for sample_set in generate_experiment(plan):
        qubit_dir = out_dir / sample_set.source_id
        qubit_dir.mkdir(parents=True, exist_ok=True)
        entries = []
        for seq in sample_set:
            name = f"sample_{seq.sample_index:05d}.{ext}"
            (qubit_dir / name).write_bytes(serialize_bits(seq, encoding))
            entries.append(ManifestEntry(path=name, encoding=encoding,
                                         sample_index=seq.sample_index,
                                         timestamp=seq.timestamp))
        manifest = Manifest(declared_length=plan.shots_per_sample,
                            source_id=sample_set.source_id,
                            entries=tuple(entries), base_dir=qubit_dir)
        manifest_path = qubit_dir / "manifest.json"
        save_manifest(manifest, manifest_path)
        manifest_paths.append(manifest_path)
    return manifest_paths
