"""Amplitude amplification tests: repetition calculus and the amplifier."""

import math

import numpy as np
import pytest

from qsearchlab import sim
from qsearchlab.amplify import (
    AmplifyParams,
    amplification_round,
    amplification_schedule_scale,
    amplitude_amplify,
    classical_repetitions,
    predicted_repetitions,
    preparation_from_target,
    uniform_preparation,
)
from qsearchlab.sim import ParameterError, SeededRng


# mpmath: ceil(pi / (4*asin(sqrt(eps))) - 1/2) at 50 digits
def test_predicted_repetitions_pinned_values():
    assert predicted_repetitions(1.0) == 0
    assert predicted_repetitions(0.5) == 1
    assert predicted_repetitions(0.25) == 1
    assert predicted_repetitions(0.04) == 4
    assert predicted_repetitions(0.01) == 8
    assert predicted_repetitions(1e-4) == 79


def test_schedule_scale_matches_rounding_rule():
    # mpmath: pi / (4*asin(0.1)) = 7.840854384487761465706
    assert amplification_schedule_scale(0.01) == pytest.approx(
        7.840854384487761465706, abs=1e-14
    )
    for eps in (1e-4, 0.003, 0.04, 0.2, 0.7, 1.0):
        scale = amplification_schedule_scale(eps)
        assert predicted_repetitions(eps) == math.ceil(scale - 0.5)


def test_classical_repetitions_is_inverse_rate():
    assert classical_repetitions(0.01) == 100
    assert classical_repetitions(1.0) == 1
    assert classical_repetitions(0.3) == 4


def test_quantum_never_behind_classical():
    # the square-root schedule must not lose to plain retries at low rates
    for eps in np.linspace(1e-4, 0.5, 400):
        assert predicted_repetitions(float(eps)) <= classical_repetitions(float(eps))
    for eps in np.linspace(1e-4, 0.1, 200):
        assert predicted_repetitions(float(eps)) < classical_repetitions(float(eps))


def test_repetition_calculus_validation():
    for fn in (predicted_repetitions, amplification_schedule_scale, classical_repetitions):
        with pytest.raises(ParameterError):
            fn(0.0)
        with pytest.raises(ParameterError):
            fn(1.5)


# ------------------------------------------------------------- preparations

def test_uniform_preparation_builds_uniform_state():
    prep = uniform_preparation(9, cost=2)
    state = prep.forward(sim.basis_state(9))
    assert np.allclose(state.amps, 1.0 / 3.0, atol=1e-12)
    assert prep.cost == 2


def test_preparation_hits_arbitrary_target():
    rng = SeededRng(40)
    raw = rng.generator.normal(size=12)
    target = raw / np.linalg.norm(raw)
    prep = preparation_from_target(target)
    made = prep.forward(sim.basis_state(12)).amps
    assert np.allclose(made, target, atol=1e-10)


def test_preparation_rejects_complex_targets():
    with pytest.raises(ParameterError):
        preparation_from_target(np.array([1j, 0.0, 0.0]))


def test_preparation_is_unitary_involution_carrier():
    prep = uniform_preparation(6)
    state = prep.forward(sim.basis_state(6))
    back = prep.inverse(state)
    assert abs(back.amps[0]) == pytest.approx(1.0, abs=1e-10)


def test_preparation_from_target_rejects_zero_vector():
    with pytest.raises(ParameterError):
        preparation_from_target(np.zeros(4))


# ---------------------------------------------------------------- amplifier

def test_amplify_exact_floor_boosts_success():
    dimension, good = 64, (3, 40, 41, 42)
    prep = uniform_preparation(dimension)
    params = AmplifyParams(good=good, success_floor=len(good) / dimension)
    wins = 0
    for seed in range(200):
        result = amplitude_amplify(prep, params, SeededRng(555, seed))
        assert result.good == (result.index in good)
        wins += result.good
    # three rounds lift 1/16 to sin(7*asin(0.25))^2 which is about 0.96
    assert wins >= 175


def test_amplify_query_accounting_exact_mode():
    dimension, good = 36, (0,)
    prep = uniform_preparation(dimension, cost=3)
    params = AmplifyParams(good=good, success_floor=1.0 / dimension)
    result = amplitude_amplify(prep, params, SeededRng(1, 2))
    rounds = predicted_repetitions(1.0 / dimension)
    assert result.rounds == rounds
    assert result.queries == (2 * rounds + 1) * 3 + rounds


def test_amplify_lower_bound_mode_is_one_sided():
    dimension = 32
    good = tuple(range(8))  # true rate far above the declared floor
    prep = uniform_preparation(dimension)
    params = AmplifyParams(good=good, success_floor=1.0 / dimension,
                           floor_is_lower_bound=True)
    wins = 0
    for seed in range(120):
        result = amplitude_amplify(prep, params, SeededRng(808, seed))
        if result.good:
            assert result.index in good
            wins += 1
    assert wins >= 100


def test_amplification_round_matches_manual_reflections():
    rng = SeededRng(91)
    dimension = 10
    prep = uniform_preparation(dimension)
    counter = sim.PredicateOracle(dimension, marked=[2, 7])
    state = prep.forward(sim.basis_state(dimension))
    stepped = amplification_round(state, prep, np.array([2, 7]), counter)
    # manual route: flip good, then reflect about the prepared state
    manual = sim.apply_phase_flip(state, [2, 7], sim.PredicateOracle(dimension, marked=[2, 7]))
    u = prep.forward(sim.basis_state(dimension)).amps
    reflect = 2.0 * np.outer(u, u.conj()) - np.eye(dimension)
    assert np.allclose(stepped.amps, reflect @ manual.amps, atol=1e-12)
    assert counter.query_count == 1


def test_amplify_with_empty_good_set_never_claims_success():
    prep = uniform_preparation(8)
    params = AmplifyParams(good=(), success_floor=0.125)
    for seed in range(10):
        result = amplitude_amplify(prep, params, SeededRng(66, seed))
        assert result.good is False


def test_amplify_params_validation():
    with pytest.raises(ParameterError):
        AmplifyParams(good=(1,), success_floor=0.0)
    with pytest.raises(ParameterError):
        AmplifyParams(good=(1,), success_floor=1.5)
    prep = uniform_preparation(6)
    short_mask = AmplifyParams(good=np.array([True, False]), success_floor=0.5)
    with pytest.raises(ParameterError):
        amplitude_amplify(prep, short_mask, SeededRng(0))
