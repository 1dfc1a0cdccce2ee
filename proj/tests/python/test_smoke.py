"""Smoke tests for the _tsqc extension: the main operations round-trip from
python with the same numbers the C++ suites pin down."""

import math

import pytest

import tsqc


def test_version_present():
    assert tsqc.__version__


def test_polarization_reduces_modulo_pi():
    state = tsqc.PolarizationState(0.9 * math.pi)
    rotated = tsqc.rotate(
        tsqc.PhotonPulse.uniform_signal(1, state), tsqc.RotationOp(0.3 * math.pi)
    )
    assert rotated.photons()[0].state.angle == pytest.approx(0.2 * math.pi, abs=1e-12)


def test_split_and_measure():
    rng = tsqc.RandomStream(7)
    pulse = tsqc.PhotonPulse.uniform_signal(100, tsqc.PolarizationState(0.0))
    diverted, remainder = tsqc.split_fraction(
        pulse, 0.2, tsqc.SplitMode.Deterministic, rng
    )
    assert diverted.intensity == 20
    assert remainder.intensity == 80

    photon = tsqc.Photon(tsqc.PolarizationState(0.0))
    assert tsqc.measure_photon(photon, tsqc.PolarizationState(0.0), rng) == 1
    orthogonal = tsqc.Photon(tsqc.PolarizationState(math.pi / 2))
    assert tsqc.measure_photon(orthogonal, tsqc.PolarizationState(0.0), rng) == 0


def test_analytics_closed_forms():
    assert tsqc.snr_uniform(0.1) == pytest.approx(2.6900, abs=1e-4)
    assert tsqc.snr_general(0.2, 0.25, 0.34) == pytest.approx(0.6556, abs=5e-4)
    assert math.isinf(tsqc.snr_uniform(0.0))
    critical = tsqc.critical_siphon_fraction()
    assert critical == pytest.approx(1 - 2 ** (-1 / 3), abs=1e-6)
    assert tsqc.overall_intensity_fraction(0.01, 0.01) == pytest.approx(0.951, abs=1e-3)
    assert tsqc.table1_feasible(0.05, 0.03, 0.2)
    assert not tsqc.table1_feasible(0.05, 0.04, 0.2)
    assert tsqc.min_siphon_photons(1024) == 30
    budget = tsqc.detector_array_budget(16)
    assert (budget.eve_needs, budget.source_can_use) == (48, 96)
    with pytest.raises(ValueError):
        tsqc.snr_uniform(-0.1)


def test_classifier():
    bb84 = tsqc.classify_protocol(tsqc.ProtocolKind.BB84)
    assert (bb84.p, bb84.k, bb84.n) == (1, 1, 1)
    assert not bb84.has_threshold_property()
    tsqc_class = tsqc.classify_protocol(tsqc.ProtocolKind.TSQC, 5, 30)
    assert (tsqc_class.p, tsqc_class.k, tsqc_class.n) == (5, 20, 30)
    with pytest.raises(ValueError):
        tsqc.classify_protocol(tsqc.ProtocolKind.TSQC, 5, 10)


def test_clean_session_decodes_exactly():
    config = tsqc.SessionConfig()
    config.angle_set = tsqc.AngleSet(16)
    config.pulse_size = 1000
    config.alpha = 0.1
    config.g_policy = tsqc.GPolicy.constant(0.2)
    config.bit_to_send = 1
    config.seed = 99
    outcome = tsqc.run_three_stage(config)
    assert outcome.decoded_bit == 1
    assert not outcome.breach_detected
    assert outcome.final_pulse_composition.good == 729
    assert outcome.final_pulse_composition.bad == 0
    assert [r.stage for r in outcome.intensity_records] == [2, 3, 4]


def test_attack_with_record():
    config = tsqc.SessionConfig()
    config.pulse_size = 1000
    config.alpha = 0.05
    config.g_policy = tsqc.GPolicy.constant(0.05)
    config.seed = 3

    plan = tsqc.AttackPlan()
    plan.siphon_fractions = [0.1, 0.1, 0.1]
    plan.replace = False
    plan.seed = 4

    outcome, record = tsqc.run_three_stage_recorded(config, plan)
    assert outcome.breach_detected
    assert outcome.breach_stage == 2
    assert len(record.passes) == 3

    plan.replace = True
    outcome, _ = tsqc.run_three_stage_recorded(config, plan)
    assert not outcome.breach_detected
    assert outcome.final_pulse_composition.bad > 0


def test_experiment_reproducible():
    spec = tsqc.ExperimentSpec()
    spec.base_config.pulse_size = 200
    spec.base_config.alpha = 0.05
    spec.trials = 25
    spec.seed = 11

    plan = tsqc.AttackPlan()
    plan.siphon_fractions = [0.1, 0.1, 0.1]
    plan.replace = True
    spec.attack = plan

    first = tsqc.run_experiment(spec)
    second = tsqc.run_experiment(spec)
    assert first.cells[0].mean_final_snr == second.cells[0].mean_final_snr
    assert first.cells[0].decode_accuracy == second.cells[0].decode_accuracy


def test_worked_example_trace():
    trace = tsqc.reproduce_worked_example(5)
    assert trace.initial_photons == 100
    streams = [(p.stream_good, p.stream_bad) for p in trace.passes]
    assert streams[:2] == [(80, 20), (60, 40)]
    assert trace.passes[1].stash_snr == pytest.approx(4.0)
    assert trace.passes[2].stash_snr == pytest.approx(20 / 14, abs=1e-9)


def test_snr_curve():
    curve = tsqc.snr_curve(0.1, 0.2, 2)
    assert [alpha for alpha, _ in curve] == [0.1, 0.2]
    values = [snr for _, snr in tsqc.snr_curve(0.01, 0.5, 50)]
    assert values == sorted(values, reverse=True)
