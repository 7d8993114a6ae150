import pytest

from cabinlight import sim
from cabinlight.fuzzy import InputState
from cabinlight.learning import LearnerConfig
from cabinlight.sim import (
    ACCEPT_BAND,
    EXPERIMENT_PRESETS,
    FULL,
    NOISY,
    PARTIAL,
    ExperimentSpec,
    SimulatedUser,
    TrialTrace,
    export_trace,
    learning_rate_sweep,
    preset_spec,
    run_experiment,
    user_respond,
)


def test_full_correction_always_sets_preference():
    user = SimulatedUser(true_preference=62.0)
    assert user_respond(user, 75.0) == 62.0
    assert user_respond(user, 10.0) == 62.0


def test_partial_correction_blends():
    user = SimulatedUser(true_preference=60.0, policy=PARTIAL, fraction=0.5)
    assert user_respond(user, 80.0) == 70.0
    assert user_respond(user, 60.0) == 60.0


def test_accept_band_tolerates_near_misses():
    user = SimulatedUser(true_preference=60.0, policy=ACCEPT_BAND, width=2.0)
    assert user_respond(user, 61.5) == 61.5   # accepted as-is
    assert user_respond(user, 65.0) == 60.0   # corrected


def test_noisy_policy_is_seeded_and_bounded():
    user = SimulatedUser(true_preference=98.0, policy=NOISY, stddev=5.0, seed=7)
    a = [user_respond(user, 50.0, rng=user.rng()) for _ in range(20)]
    b = [user_respond(user, 50.0, rng=user.rng()) for _ in range(20)]
    assert a == b
    assert all(0.0 <= v <= 100.0 for v in a)
    rng = user.rng()
    series = [user_respond(user, 50.0, rng=rng) for _ in range(20)]
    assert len(set(series)) > 1


def test_user_validation():
    with pytest.raises(ValueError):
        SimulatedUser(true_preference=120.0)
    with pytest.raises(ValueError):
        SimulatedUser(true_preference=50.0, fraction=0.0)
    with pytest.raises(ValueError):
        SimulatedUser(true_preference=50.0, stddev=-1.0)
    with pytest.raises(ValueError):
        user_respond(SimulatedUser(true_preference=50.0, policy="telepathy"), 50.0)


def test_presets_cover_three_reference_scenarios():
    assert set(EXPERIMENT_PRESETS) == {1, 2, 3}
    spec = preset_spec(1)
    assert spec.input_state == InputState(22, 22, 5, 25)
    assert spec.user.true_preference == 62.0
    assert preset_spec(2).user.true_preference == 100.0
    assert preset_spec(3).user.true_preference == 35.0
    with pytest.raises(ValueError):
        preset_spec(4)


def test_experiment_spec_validation():
    with pytest.raises(ValueError):
        preset_spec(1, max_trials=0)
    with pytest.raises(ValueError):
        preset_spec(1, convergence_tol=0.0)


def test_run_experiment_converges_to_preference():
    spec = preset_spec(1, cfg=LearnerConfig(eta_k=0.5, eta_q=0.5))
    trace = run_experiment(spec)
    assert trace.converged_at is not None
    assert trace.records[0].suggested == 75.0
    # the last three suggestions sit inside the tolerance band
    for rec in trace.records[-3:]:
        assert abs(rec.suggested - 62.0) <= spec.convergence_tol
    assert trace.converged_at == trace.records[-3].trial


def test_run_experiment_respects_max_trials():
    spec = preset_spec(1, max_trials=5)
    trace = run_experiment(spec)
    assert trace.converged_at is None
    assert len(trace.records) == 5


def test_sweep_runs_fresh_engine_per_rate():
    spec = preset_spec(1)
    traces = learning_rate_sweep(spec, [0.3, 0.5])
    assert set(traces) == {0.3, 0.5}
    assert traces[0.3].records[0].suggested == 75.0
    assert traces[0.5].records[0].suggested == 75.0
    assert traces[0.5].converged_at < traces[0.3].converged_at


def test_sweep_rejects_bad_rates():
    spec = preset_spec(1)
    with pytest.raises(ValueError):
        learning_rate_sweep(spec, [0.1, 0.1])
    with pytest.raises(ValueError):
        learning_rate_sweep(spec, [-0.1])


def test_export_trace_format(tmp_path):
    spec = preset_spec(1, max_trials=4)
    trace = run_experiment(spec)
    path = tmp_path / "trace.tsv"
    export_trace(trace, path)
    lines = path.read_text().strip().split("\n")
    header = lines[0].split("\t")
    assert header[:5] == ["trial", "suggested", "target", "reward", "td_error"]
    assert len(header) == 5 + 9
    assert len(lines) == 1 + 4
    first = lines[1].split("\t")
    assert int(first[0]) == 1
    assert float(first[1]) == 75.0
    assert float(first[2]) == 62.0


def test_export_empty_trace(tmp_path):
    path = tmp_path / "empty.tsv"
    export_trace(TrialTrace(), path)
    assert path.read_text().startswith("trial\t")
