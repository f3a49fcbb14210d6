"""Noise model semantics and determinism of the sample generator."""

import math
from datetime import timedelta

import numpy as np
import pytest

import randsuite as rs
from randsuite import (
    Anomaly,
    Epoch,
    ExperimentPlan,
    QubitNoiseModel,
    effective_bias,
    generate_experiment,
    generate_sample,
    min_entropy,
)
from randsuite.errors import IndexOutOfRange


def fair_model(qubit_id=0):
    return QubitNoiseModel(qubit_id=qubit_id, epochs=(Epoch(0, 0.5),))


class TestEffectiveBias:
    def test_noiseless_hadamard(self):
        assert effective_bias(fair_model(), 0) == 0.5

    def test_readout_asymmetry_arithmetic(self):
        model = QubitNoiseModel(qubit_id=1, epochs=(Epoch(0, 0.5, eps01=0.02, eps10=0.06),))
        assert effective_bias(model, 5) == pytest.approx(0.48, abs=1e-15)

    def test_epoch_switching(self):
        model = QubitNoiseModel(qubit_id=0, epochs=(
            Epoch(0, 0.5), Epoch(10, 0.4), Epoch(20, 0.6)))
        assert effective_bias(model, 9) == 0.5
        assert effective_bias(model, 10) == 0.4
        assert effective_bias(model, 19) == 0.4
        assert effective_bias(model, 20) == 0.6
        assert effective_bias(model, 10 ** 6) == 0.6

    def test_anomaly_override_window(self):
        model = QubitNoiseModel(
            qubit_id=0, epochs=(Epoch(0, 0.5),),
            anomaly=Anomaly(300, 320, p1_override=0.3))
        assert effective_bias(model, 299) == 0.5
        assert effective_bias(model, 300) == 0.3
        assert effective_bias(model, 319) == 0.3
        assert effective_bias(model, 320) == 0.5

    def test_anomaly_respects_epoch_readout_error(self):
        model = QubitNoiseModel(
            qubit_id=0, epochs=(Epoch(0, 0.5, eps01=0.02, eps10=0.06),),
            anomaly=Anomaly(0, 10, p1_override=0.3))
        # 0.3*0.94 + 0.7*0.02
        assert effective_bias(model, 0) == pytest.approx(0.296, abs=1e-15)

    def test_negative_index_rejected(self):
        with pytest.raises(IndexOutOfRange):
            effective_bias(fair_model(), -1)

    def test_model_validation(self):
        with pytest.raises(ValueError):
            QubitNoiseModel(qubit_id=0, epochs=())
        with pytest.raises(ValueError):
            QubitNoiseModel(qubit_id=0, epochs=(Epoch(1, 0.5),))
        with pytest.raises(ValueError):
            QubitNoiseModel(qubit_id=0, epochs=(Epoch(0, 0.5), Epoch(0, 0.4)))
        with pytest.raises(ValueError):
            QubitNoiseModel(qubit_id=99, epochs=(Epoch(0, 0.5),))
        with pytest.raises(ValueError):
            Epoch(0, 1.5)
        with pytest.raises(ValueError):
            Anomaly(10, 10, 0.5)


class TestGenerateSample:
    def test_deterministic_regeneration(self):
        a = generate_sample(fair_model(), 3, 8192, master_seed=99)
        b = generate_sample(fair_model(), 3, 8192, master_seed=99)
        assert a == b

    def test_key_separation(self):
        base = generate_sample(fair_model(), 3, 2048, master_seed=99)
        assert generate_sample(fair_model(), 4, 2048, master_seed=99) != base
        assert generate_sample(fair_model(qubit_id=1), 3, 2048, master_seed=99) != base
        assert generate_sample(fair_model(), 3, 2048, master_seed=100) != base

    def test_degenerate_biases(self):
        zeros = generate_sample(
            QubitNoiseModel(qubit_id=0, epochs=(Epoch(0, 0.0),)), 0, 8192, 1)
        assert zeros.count_ones() == 0
        ones = generate_sample(
            QubitNoiseModel(qubit_id=0, epochs=(Epoch(0, 1.0),)), 0, 8192, 1)
        assert ones.count_ones() == 8192

    def test_biased_proportion_within_binomial_bounds(self):
        model = QubitNoiseModel(qubit_id=2, epochs=(Epoch(0, 0.45),))
        seq = generate_sample(model, 0, 10 ** 6, master_seed=5)
        p_hat = seq.count_ones() / seq.n
        sigma = math.sqrt(0.45 * 0.55 / 10 ** 6)
        assert abs(p_hat - 0.45) < 3 * sigma

    def test_metadata(self):
        seq = generate_sample(fair_model(qubit_id=7), 11, 64, master_seed=1)
        assert seq.source_id == "qubit-07"
        assert seq.sample_index == 11
        assert seq.n == 64


class TestGenerateExperiment:
    def test_shape_and_timestamps(self):
        plan = rs.unbiased_plan(num_qubits=3, samples_per_qubit=4,
                                shots_per_sample=32, master_seed=8)
        sets = generate_experiment(plan)
        assert [s.source_id for s in sets] == ["qubit-00", "qubit-01", "qubit-02"]
        for s in sets:
            assert len(s) == 4
            assert s.declared_length == 32
            deltas = {b.timestamp - a.timestamp for a, b in zip(s, list(s)[1:])}
            assert deltas == {timedelta(seconds=plan.sample_interval_s)}

    def test_full_regeneration_is_bit_identical(self):
        plan = rs.unbiased_plan(num_qubits=2, samples_per_qubit=6,
                                shots_per_sample=512, master_seed=21)
        first = generate_experiment(plan)
        second = generate_experiment(plan)
        for a, b in zip(first, second):
            assert all(x == y for x, y in zip(a, b))

    def test_minimal_plan(self):
        plan = ExperimentPlan(qubit_models=(fair_model(),), samples_per_qubit=1,
                              shots_per_sample=10, master_seed=0)
        sets = generate_experiment(plan)
        assert len(sets) == 1 and len(sets[0]) == 1 and sets[0][0].n == 10

    def test_different_master_seeds_differ_heavily(self):
        plan_a = rs.unbiased_plan(num_qubits=1, samples_per_qubit=20,
                                  shots_per_sample=8192, master_seed=1)
        plan_b = rs.with_seed(plan_a, 2)
        bits_a = rs.concat_chronological(generate_experiment(plan_a)[0]).asarray()
        bits_b = rs.concat_chronological(generate_experiment(plan_b)[0]).asarray()
        hamming = float(np.mean(bits_a != bits_b))
        assert hamming >= 0.45

    def test_cross_correlation_between_streams(self):
        # lag-0 correlation between distinct (qubit, sample) sequences
        plan = rs.unbiased_plan(num_qubits=2, samples_per_qubit=5,
                                shots_per_sample=8192, master_seed=4)
        sets = generate_experiment(plan)
        seqs = [s.asarray().astype(np.float64) * 2 - 1 for ss in sets for s in ss]
        bound = 4.0 / math.sqrt(8192)
        for i in range(len(seqs)):
            for j in range(i + 1, len(seqs)):
                corr = float(np.mean(seqs[i] * seqs[j]))
                assert abs(corr) <= bound, (i, j, corr)

    def test_epoch_fidelity(self):
        plan = rs.biased_demo_plan(num_qubits=1, samples_per_qubit=100,
                                   shots_per_sample=8192, master_seed=10)
        model = plan.qubit_models[0]
        sample_set = generate_experiment(plan)[0]
        starts = [e.start_sample for e in model.epochs] + [plan.samples_per_qubit]
        for epoch, lo, hi in zip(model.epochs, starts, starts[1:]):
            ones = sum(s.count_ones() for s in list(sample_set)[lo:hi])
            total = (hi - lo) * plan.shots_per_sample
            p_hat = ones / total
            sigma = math.sqrt(epoch.p_eff * (1 - epoch.p_eff) / total)
            assert abs(p_hat - epoch.p_eff) < 3 * sigma, (lo, hi)

    def test_anomaly_depresses_min_entropy(self):
        plan = rs.biased_demo_plan(num_qubits=1, samples_per_qubit=100,
                                   shots_per_sample=8192, master_seed=11,
                                   anomaly_qubit=0)
        model = plan.qubit_models[0]
        assert abs(model.anomaly.p1_override - 0.5) > 0.05
        sample_set = generate_experiment(plan)[0]
        values = np.array([min_entropy(s) for s in sample_set])
        window = slice(model.anomaly.start_sample, model.anomaly.stop_sample)
        inside = values[window]
        outside = np.concatenate([values[:window.start], values[window.stop:]])
        assert float(np.median(inside)) < float(np.median(outside))
        assert inside.max() < np.percentile(outside, 1)


class TestPlans:
    def test_biased_demo_plan_bias_range(self):
        plan = rs.biased_demo_plan(num_qubits=20, samples_per_qubit=579)
        effs = []
        for model in plan.qubit_models:
            for epoch in model.epochs:
                assert 0.0 <= epoch.eps01 <= 0.06
                assert 0.0 <= epoch.eps10 <= 0.06
                assert 0.47 <= epoch.p_eff <= 0.50
            effs.append(effective_bias(model, 0))
        assert min(effs) == pytest.approx(0.47, abs=0.002)
        assert max(effs) == pytest.approx(0.50, abs=0.002)

    def test_plan_json_round_trip(self, tmp_path):
        plan = rs.biased_demo_plan(num_qubits=4, samples_per_qubit=50,
                                   shots_per_sample=256, master_seed=77,
                                   anomaly_qubit=2)
        path = tmp_path / "plan.json"
        rs.save_plan(plan, path)
        assert rs.load_plan(path) == plan

    def test_plan_validation(self):
        with pytest.raises(ValueError):
            ExperimentPlan(qubit_models=())
        with pytest.raises(ValueError):
            ExperimentPlan(qubit_models=(fair_model(), fair_model()))
        with pytest.raises(ValueError):
            ExperimentPlan(qubit_models=(fair_model(),), samples_per_qubit=0)
        with pytest.raises(ValueError):
            ExperimentPlan(qubit_models=(fair_model(),), master_seed=-1)

    def test_write_experiment_layout(self, tmp_path):
        plan = rs.unbiased_plan(num_qubits=2, samples_per_qubit=3,
                                shots_per_sample=64, master_seed=6)
        manifests = rs.write_experiment(plan, tmp_path)
        assert [m.parent.name for m in manifests] == ["qubit-00", "qubit-01"]
        loaded = rs.load_sample_set(rs.load_manifest(manifests[0]))
        regenerated = generate_experiment(plan)[0]
        assert all(a == b for a, b in zip(loaded, regenerated))
        assert loaded[0].timestamp == regenerated[0].timestamp
