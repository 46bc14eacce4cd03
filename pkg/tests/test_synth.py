import numpy as np
import pytest

from passnet.evaluation import tv_distance
from passnet.hmm import forward
from passnet.model import HmmParams
from passnet.synth import (
    brute_force_likelihood,
    brute_force_posteriors,
    generate_dataset,
    random_params,
    sample_sequence,
    transition_counts,
)


def test_cycle_path_alternates(cycle_params):
    seq, path = sample_sequence(cycle_params, 6, seed=1)
    assert path == (0, 1, 0, 1, 0, 1)
    assert seq.outcomes == path


def test_single_state_draws_from_emission_row():
    p = HmmParams([[1]], [[0.25, 0.75]], [1])
    seq, path = sample_sequence(p, 20_000, seed=4)
    assert set(path) == {0}
    assert np.mean(seq.outcomes) == pytest.approx(0.75, abs=0.01)


def test_long_run_transition_frequencies():
    p = random_params(3, 2, seed=21)
    _, path = sample_sequence(p, 100_000, seed=21)
    counts = transition_counts([path], 3)
    empirical = counts / counts.sum(axis=1, keepdims=True)
    assert tv_distance(empirical, p.A).max() < 0.01


def test_sampling_is_reproducible():
    p = random_params(3, 4, seed=1)
    assert sample_sequence(p, 50, seed=9) == sample_sequence(p, 50, seed=9)
    assert sample_sequence(p, 50, seed=9) != sample_sequence(p, 50, seed=10)


def test_dataset_shape_and_determinism():
    p = random_params(2, 4, seed=3)
    assert generate_dataset(p, 0, (5, 10), seed=1) == []
    a = generate_dataset(p, 25, (80, 120), seed=7)
    assert a == generate_dataset(p, 25, (80, 120), seed=7)
    assert all(80 <= len(g) <= 120 for g in a)
    assert len({g.game_id for g in a}) == 25


def test_dataset_rejects_empty_range():
    p = random_params(2, 2, seed=3)
    with pytest.raises(ValueError):
        generate_dataset(p, 3, (10, 9), seed=1)


def test_sampled_games_have_positive_probability():
    p = HmmParams([[0.9, 0.1, 0], [0, 0.5, 0.5], [1, 0, 0]],
                  [[1, 0, 0], [0, 0.5, 0.5], [0, 0, 1]], [1, 0, 0])
    for g in generate_dataset(p, 30, (1, 40), seed=2):
        assert np.isfinite(forward(p, g).log_likelihood)


def test_oracles_on_trivial_models(cycle_params):
    assert brute_force_likelihood(cycle_params, [0, 1, 0]) == 1.0
    np.testing.assert_array_equal(brute_force_posteriors(cycle_params, [0, 1, 0]).gamma,
                                  [[1, 0], [0, 1], [1, 0]])
    one = HmmParams([[1]], [[0.2, 0.8]], [1])
    assert brute_force_likelihood(one, [1, 1, 0]) == pytest.approx(0.8 * 0.8 * 0.2)
    np.testing.assert_array_equal(brute_force_posteriors(one, [1, 0]).gamma, [[1], [1]])


def test_enumeration_guard():
    p = random_params(10, 2, seed=0)
    with pytest.raises(ValueError):
        brute_force_likelihood(p, [0] * 8)


def test_oracle_rejects_impossible_sequence():
    p = HmmParams([[1]], [[1, 0]], [1])
    with pytest.raises(ValueError):
        brute_force_posteriors(p, [1])
