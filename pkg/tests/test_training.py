import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cavaliers import season_games
from passnet.hmm import ZeroProbabilityError
from passnet.model import HmmParams, validate_params
from passnet.synth import brute_force_likelihood, generate_dataset, random_params, rng_stream
from passnet.training import (
    TrainConfig,
    TrainingError,
    init_params,
    q_function,
    reestimate,
    train,
)


def test_init_single_state():
    p = init_params(1, 2, seed=5)
    np.testing.assert_array_equal(p.pi, [1.0])
    np.testing.assert_array_equal(p.A, [[1.0]])
    assert p.B.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.abs(p.B - 0.5) <= 0.5 * 0.1)


def test_init_deterministic_and_valid():
    assert init_params(4, 3, seed=8) == init_params(4, 3, seed=8)
    assert init_params(4, 3, seed=8) != init_params(4, 3, seed=9)
    p = init_params(13, 4, seed=42)
    assert validate_params(p, 13, 4).ok
    # jitter stays within 5% of uniform, up to renormalisation
    assert np.all(np.abs(p.A * 13 - 1) < 0.11)


def test_single_state_reestimation_counts():
    p = HmmParams([[1]], [[0.5, 0.5]], [1])
    out = reestimate(p, [[0, 0, 1, 0]])
    np.testing.assert_array_equal(out.A, [[1.0]])
    np.testing.assert_array_equal(out.pi, [1.0])
    np.testing.assert_array_equal(out.B, [[0.75, 0.25]])


def test_cycle_is_a_fixed_point(cycle_params):
    out = reestimate(cycle_params, [[0, 1, 0]])
    np.testing.assert_allclose(out.A, cycle_params.A, atol=1e-12)
    np.testing.assert_allclose(out.B, cycle_params.B, atol=1e-12)
    np.testing.assert_allclose(out.pi, cycle_params.pi, atol=1e-12)


def test_step_increases_enumerated_likelihood():
    p = random_params(3, 2, seed=17)
    rng = rng_stream(17, 5)
    seqs = [[int(o) for o in rng.integers(0, 2, 4)] for _ in range(2)]

    def total(params):
        return sum(math.log(brute_force_likelihood(params, s)) for s in seqs)

    assert total(reestimate(p, seqs)) >= total(p) - 1e-12


def test_reestimate_names_impossible_sequence(cycle_params):
    with pytest.raises(ZeroProbabilityError) as exc:
        reestimate(cycle_params, [[0, 1], [1, 1]])
    assert exc.value.game_id == "seq1"


def test_reestimate_with_smoothing_keeps_unseen_symbol():
    p = init_params(2, 4, seed=1)
    out = reestimate(p, [[0, 2, 2, 0]], epsilon=0.5)
    assert (out.B[:, 1] > 0).all()
    assert validate_params(out, 2, 4).ok


def test_train_single_state_hits_empirical_frequencies():
    seqs = [[0, 0, 1, 3], [2, 0, 0, 0, 1]]
    report = train(seqs, 1, 4, TrainConfig())
    assert report.converged
    assert report.iterations_used <= 2
    np.testing.assert_array_equal(report.final_params.B, [[5 / 9, 2 / 9, 1 / 9, 1 / 9]])


def test_train_is_deterministic():
    data = generate_dataset(random_params(3, 4, seed=2), 8, (20, 30), seed=2)
    cfg = TrainConfig(restarts=3, seed=11, max_iterations=50)
    a, b = train(data, 3, 4, cfg), train(data, 3, 4, cfg)
    assert a.final_params == b.final_params
    assert a.loglik_trace == b.loglik_trace
    assert a.restart_index == b.restart_index


def test_train_keeps_best_restart():
    data = generate_dataset(random_params(3, 4, seed=6), 10, (30, 30), seed=6)
    report = train(data, 3, 4, TrainConfig(restarts=4, seed=1, max_iterations=40))
    finals = report.restart_logliks
    assert report.final_loglik == max(finals)
    assert report.restart_index == finals.index(max(finals))


def test_one_iteration_cap():
    data = generate_dataset(random_params(3, 4, seed=1), 5, (30, 30), seed=1)
    report = train(data, 3, 4, TrainConfig(max_iterations=1))
    assert len(report.loglik_trace) == 1
    assert not report.converged
    assert report.loglik_trace[0] >= report.initial_loglik - 1e-9


def test_train_rejects_symbols_outside_alphabet():
    with pytest.raises(ValueError):
        train([[0, 2]], 2, 2, TrainConfig())
    with pytest.raises(ValueError):
        train([], 2, 2, TrainConfig())


def test_training_error_aggregates(monkeypatch):
    import passnet.training as tr

    def boom(*args, **kwargs):
        raise ZeroProbabilityError(1, "g")

    monkeypatch.setattr(tr, "_run_once", boom)
    with pytest.raises(TrainingError) as exc:
        tr.train([[0, 1]], 2, 2, TrainConfig(restarts=3))
    assert len(exc.value.failures) == 3


def test_config_validation():
    for bad in (dict(max_iterations=0), dict(loglik_tolerance=0), dict(restarts=0),
                dict(smoothing_epsilon=-1), dict(zero_row_policy="nope")):
        with pytest.raises(ValueError):
            TrainConfig(**bad)


def test_season_dataset_trains_monotonically():
    report = train(season_games(), 13, 4, TrainConfig(max_iterations=60, seed=3))
    assert report.iterations_used >= 1
    assert np.all(np.diff((report.initial_loglik,) + report.loglik_trace) >= -1e-9)
    assert validate_params(report.final_params, 13, 4).ok


def test_q_function_single_state_is_emission_log_sum():
    p = HmmParams([[1]], [[0.3, 0.7]], [1])
    obs = [0, 1, 1, 0, 1]
    want = sum(math.log(p.B[0, o]) for o in obs)
    assert q_function(p, p, [obs]) == pytest.approx(want, abs=1e-12)


def test_q_function_at_fixed_point(cycle_params):
    nxt = reestimate(cycle_params, [[0, 1, 0]])
    assert q_function(cycle_params, nxt, [[0, 1, 0]]) == pytest.approx(
        q_function(cycle_params, cycle_params, [[0, 1, 0]]), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_q_ascent(m, n, seed):
    p = random_params(m, n, seed)
    seqs = generate_dataset(random_params(m, n, seed + 1), 3, (1, 12), seed)
    nxt = reestimate(p, seqs)
    assert q_function(p, nxt, seqs) >= q_function(p, p, seqs) - 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_trace_monotone_and_closed(m, seed):
    data = generate_dataset(random_params(m, 4, seed), 4, (5, 25), seed)
    seen = []
    report = train(data, m, 4, TrainConfig(max_iterations=40, seed=seed),
                   on_iteration=lambda it, p, ll: seen.append(validate_params(p, m, 4).ok))
    assert all(seen)
    trace = (report.initial_loglik,) + report.loglik_trace
    assert np.all(np.diff(trace) >= -1e-9)
    fp = report.final_params
    assert abs(fp.pi.sum() - 1) <= 1e-9
    np.testing.assert_allclose(fp.A.sum(axis=1), 1, atol=1e-9)
    np.testing.assert_allclose(fp.B.sum(axis=1), 1, atol=1e-9)
