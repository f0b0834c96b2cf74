"""Amplitude amplification around an arbitrary state preparation.

The preparation is any unitary taking the all-zero basis state to the
start state; one amplification round conjugates a reflection about zero by
that unitary and composes it with a phase flip on the good set.  With the
uniform preparation this reproduces the plain search rounds exactly,
amplitude for amplitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Union

import numpy as np

from . import sim
from .grover import SCHEDULE_GROWTH, UNKNOWN_BUDGET_FACTOR, _rounds_from_angle
from .sim import ParameterError, PredicateOracle, SeededRng, StateVector

__all__ = [
    "StatePreparation",
    "AmplifyParams",
    "AmplifyResult",
    "uniform_preparation",
    "preparation_from_target",
    "predicted_repetitions",
    "amplification_schedule_scale",
    "classical_repetitions",
    "amplification_round",
    "amplitude_amplify",
]


@dataclass(frozen=True)
class StatePreparation:
    """Unitary start-state factory with a per-application query cost."""

    dimension: int
    forward: Callable[[StateVector], StateVector]
    inverse: Callable[[StateVector], StateVector]
    cost: int = 1

    def __post_init__(self):
        if self.dimension < 1:
            raise ParameterError("preparation dimension must be >= 1")
        if self.cost < 0:
            raise ParameterError("preparation cost must be >= 0")


def _householder_preparation(target: np.ndarray, cost: int) -> StatePreparation:
    # Reflection through (target - e0) maps e0 to target and is an involution,
    # so forward and inverse coincide and apply in O(dimension).
    v = target.astype(np.float64).copy()
    v[0] -= 1.0
    vv = float(v @ v)
    dimension = target.size

    if vv < 1e-28:
        def apply(state: StateVector) -> StateVector:
            return state.copy()
    else:
        def apply(state: StateVector) -> StateVector:
            amps = state.amps - (2.0 / vv) * (v @ state.amps) * v
            return StateVector(amps, copy=False, _trusted=True)

    return StatePreparation(dimension=dimension, forward=apply, inverse=apply, cost=cost)


def uniform_preparation(dimension: int, cost: int = 1) -> StatePreparation:
    """Preparation of the equal superposition over `dimension` outcomes."""
    if dimension < 1:
        raise ParameterError("dimension must be >= 1")
    target = np.full(dimension, 1.0 / math.sqrt(dimension))
    return _householder_preparation(target, cost)


def preparation_from_target(target_amps, cost: int = 1) -> StatePreparation:
    """Preparation whose start state has the given real amplitudes."""
    if np.iscomplexobj(target_amps):
        raise ParameterError("target amplitudes must be real-valued")
    arr = np.array(target_amps, dtype=np.float64, copy=True)
    if arr.ndim != 1 or arr.size < 1:
        raise ParameterError("target must be a non-empty 1-D amplitude vector")
    n2 = float(arr @ arr)
    if abs(n2 - 1.0) > 1e-9:
        raise ParameterError(f"target has squared norm {n2:.6g}, expected 1")
    return _householder_preparation(arr, cost)


@dataclass(frozen=True)
class AmplifyParams:
    """Success-probability floor plus the good-outcome predicate.

    `floor_is_lower_bound` switches to a randomized round schedule that
    stays robust when the true success probability exceeds the floor (a
    fixed round count can overshoot past the peak).
    """

    success_floor: float
    good: Union[Callable[[int], bool], np.ndarray, Iterable[int]]
    floor_is_lower_bound: bool = False

    def __post_init__(self):
        if not 0.0 < self.success_floor <= 1.0:
            raise ParameterError(
                f"success_floor must be in (0, 1], got {self.success_floor}"
            )


@dataclass(frozen=True)
class AmplifyResult:
    index: int
    good: bool
    queries: int
    rounds: int


def predicted_repetitions(success_floor: float) -> int:
    """Rounds after which a start state with this good projection peaks."""
    if not 0.0 < success_floor <= 1.0:
        raise ParameterError(f"success_floor must be in (0, 1], got {success_floor}")
    return _rounds_from_angle(math.asin(math.sqrt(success_floor)))


def amplification_schedule_scale(success_floor: float) -> float:
    """Continuous repetition scale; predicted_repetitions is ceil(scale - 1/2).

    Useful for scaling fits, where integer rounding at small counts would
    swamp the trend.
    """
    if not 0.0 < success_floor <= 1.0:
        raise ParameterError(f"success_floor must be in (0, 1], got {success_floor}")
    return math.pi / (4.0 * math.asin(math.sqrt(success_floor)))


def classical_repetitions(success_floor: float) -> int:
    """Expected-repetition count for classical retry at the same floor."""
    if not 0.0 < success_floor <= 1.0:
        raise ParameterError(f"success_floor must be in (0, 1], got {success_floor}")
    return math.ceil(1.0 / success_floor)


def _reflect_about_zero(state: StateVector) -> StateVector:
    # 2|0><0| - I: keep the zero amplitude, negate the rest
    out = -state.amps
    out[0] = -out[0]
    return StateVector(out, copy=False, _trusted=True)


def _good_mask(good, dimension: int) -> np.ndarray:
    if callable(good):
        mask = np.fromiter((bool(good(i)) for i in range(dimension)), dtype=bool, count=dimension)
        return mask
    arr = np.asarray(good)
    if arr.dtype == bool:
        if arr.size != dimension:
            raise ParameterError("good mask length must match preparation dimension")
        return arr.copy()
    mask = np.zeros(dimension, dtype=bool)
    idx = arr.astype(np.int64).ravel()
    if idx.size and (idx.min() < 0 or idx.max() >= dimension):
        raise IndexError("good index out of range")
    mask[idx] = True
    return mask


def amplification_round(
    state: StateVector,
    prep: StatePreparation,
    good_indices: np.ndarray,
    counter: PredicateOracle,
) -> StateVector:
    """One round: good-set phase flip, then reflection about the start state."""
    state = sim.apply_phase_flip(state, good_indices, counter)
    state = prep.inverse(state)
    state = _reflect_about_zero(state)
    return prep.forward(state)


def amplitude_amplify(
    prep: StatePreparation, params: AmplifyParams, rng: SeededRng
) -> AmplifyResult:
    """Amplify the good component of prep's start state, then measure.

    Query cost is (2*rounds + 1) preparation applications plus one
    good-predicate query per round; the returned good flag is a classical
    re-check of the measured index and is not charged.
    """
    dimension = prep.dimension
    mask = _good_mask(params.good, dimension)
    good_idx = np.flatnonzero(mask)
    counter = PredicateOracle(dimension, marked=mask)

    if not params.floor_is_lower_bound:
        rounds = predicted_repetitions(params.success_floor)
        state = prep.forward(sim.basis_state(dimension))
        for _ in range(rounds):
            state = amplification_round(state, prep, good_idx, counter)
        index = sim.measure(state, rng)
        queries = (2 * rounds + 1) * prep.cost + counter.query_count
        return AmplifyResult(
            index=index, good=bool(mask[index]), queries=queries, rounds=rounds
        )

    # Lower-bound mode: true success may exceed the floor, so a fixed round
    # count can overshoot.  Reuse the unknown-count schedule over rounds,
    # verifying each measurement (one charged predicate query per attempt).
    cap = float(predicted_repetitions(params.success_floor) + 1)
    budget = math.ceil(UNKNOWN_BUDGET_FACTOR * cap) + 12
    ceiling = 1.0
    spent = 0
    rounds_used = 0
    prep_applications = 0
    index = 0
    while spent < budget:
        rounds = int(rng.generator.integers(0, math.ceil(ceiling)))
        state = prep.forward(sim.basis_state(dimension))
        prep_applications += 1
        for _ in range(rounds):
            state = amplification_round(state, prep, good_idx, counter)
        prep_applications += 2 * rounds
        rounds_used += rounds
        spent += rounds + 1
        index = sim.measure(state, rng)
        if counter.query(index):
            break
        ceiling = min(SCHEDULE_GROWTH * ceiling, cap)
    queries = prep_applications * prep.cost + counter.query_count
    return AmplifyResult(
        index=index, good=bool(mask[index]), queries=queries, rounds=rounds_used
    )
