"""Dense statevector simulation with deterministic randomness and query-counted oracles.

States are complex amplitude vectors over an N-dimensional search space;
there is deliberately no qubit tensor structure.  Black boxes are immutable
bit/value tables with a monotone query counter.  The simulator may read a
black box wholesale while *building* an operator, but cost is charged per
operator application, never per basis state inspected.
"""

from __future__ import annotations

from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

__all__ = [
    "ParameterError",
    "NormalizationError",
    "SizeCapError",
    "UnsupportedModeError",
    "SeededRng",
    "StateVector",
    "BitOracle",
    "ValueOracle",
    "PredicateOracle",
    "uniform_state",
    "basis_state",
    "apply_phase_flip",
    "apply_phase_rotation",
    "apply_diffusion",
    "apply_diffusion_rotation",
    "measure",
]

# Operators here are unitary, so norm drift is float rounding noise; past
# this bound the state is renormalized (assert-then-renormalize policy).
NORM_DRIFT_LIMIT = 1e-9
# measure() refuses states further than this from unit norm.
MEASURE_NORM_TOL = 1e-6


class ParameterError(ValueError):
    """An algorithm precondition on parameters was violated."""


class NormalizationError(ValueError):
    """State norm too far from 1 for the requested operation."""


class SizeCapError(ValueError):
    """Requested instance exceeds a desk-scale cap."""


class UnsupportedModeError(ParameterError):
    """Operation invoked in a mode it does not support."""


class SeededRng:
    """Splittable deterministic random stream.

    Identical (master_seed, stream_id) pairs reproduce the same draw
    sequence; distinct stream ids are statistically independent, so
    concurrent trials never share generator state.
    """

    def __init__(self, master_seed: int, stream_id: int = 0, _subkey: tuple = ()):
        if master_seed < 0 or stream_id < 0:
            raise ParameterError("seeds and stream ids must be non-negative")
        self.master_seed = int(master_seed)
        self.stream_id = int(stream_id)
        self._subkey = tuple(int(k) for k in _subkey)
        seq = np.random.SeedSequence(
            self.master_seed, spawn_key=(self.stream_id, *self._subkey)
        )
        self.generator = np.random.default_rng(seq)

    def split(self, index: int) -> "SeededRng":
        """Independent child stream, deterministic in (self, index)."""
        return SeededRng(self.master_seed, self.stream_id, self._subkey + (int(index),))

    # Thin passthroughs for the draws used throughout the package.
    def integers(self, low, high=None, size=None):
        return self.generator.integers(low, high, size=size)

    def random(self, size=None):
        return self.generator.random(size)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        key = f", subkey={self._subkey}" if self._subkey else ""
        return f"SeededRng(master_seed={self.master_seed}, stream_id={self.stream_id}{key})"


def _settle_norm(amps: np.ndarray) -> np.ndarray:
    # |sum|a|^2 - 1| ~ 2*|norm - 1| near 1, so compare against twice the limit
    n2 = np.vdot(amps, amps).real
    if abs(n2 - 1.0) > 2.0 * NORM_DRIFT_LIMIT:
        amps = amps / np.sqrt(n2)
    return amps


class StateVector:
    """Normalized complex amplitudes over a finite basis (0-based indices)."""

    __slots__ = ("amps",)

    def __init__(self, amps, copy: bool = True, _trusted: bool = False):
        arr = np.array(amps, dtype=np.complex128, copy=copy)
        if arr.ndim != 1 or arr.size < 1:
            raise ParameterError("state needs a non-empty 1-D amplitude vector")
        if not _trusted:
            n2 = np.vdot(arr, arr).real
            if abs(n2 - 1.0) > MEASURE_NORM_TOL:
                raise NormalizationError(f"amplitudes have squared norm {n2:.6g}, expected 1")
            if abs(n2 - 1.0) > 2.0 * NORM_DRIFT_LIMIT:
                arr = arr / np.sqrt(n2)
        self.amps = arr

    @property
    def dimension(self) -> int:
        return int(self.amps.size)

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amps, self.amps).real))

    def probabilities(self) -> np.ndarray:
        p = np.abs(self.amps) ** 2
        return p / p.sum()

    def copy(self) -> "StateVector":
        return StateVector(self.amps, copy=True, _trusted=True)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"StateVector(dimension={self.dimension})"


def uniform_state(dimension: int) -> StateVector:
    """Equal superposition over `dimension` basis states."""
    if dimension < 1:
        raise ParameterError(f"dimension must be >= 1, got {dimension}")
    amps = np.full(dimension, 1.0 / np.sqrt(dimension), dtype=np.complex128)
    return StateVector(amps, copy=False, _trusted=True)


def basis_state(dimension: int, index: int = 0) -> StateVector:
    """Deterministic state concentrated on one basis index."""
    if dimension < 1:
        raise ParameterError(f"dimension must be >= 1, got {dimension}")
    if not 0 <= index < dimension:
        raise IndexError(f"basis index {index} out of range for dimension {dimension}")
    amps = np.zeros(dimension, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps, copy=False, _trusted=True)


class _CountingOracle:
    """Shared query-counter plumbing; charges can fan out to wrapped bases."""

    def __init__(self, charge_to: Sequence["_CountingOracle"] = ()):
        self._queries = 0
        self._bases = tuple(charge_to)

    @property
    def query_count(self) -> int:
        return self._queries

    def charge(self, amount: int = 1) -> None:
        if amount < 0:
            raise ParameterError("query charges cannot be negative")
        self._queries += int(amount)
        for base in self._bases:
            base.charge(amount)


class BitOracle(_CountingOracle):
    """Immutable black-box bit string; every probe or phase application costs 1."""

    def __init__(self, bits):
        super().__init__()
        arr = np.array(bits, dtype=np.uint8, copy=True)
        if arr.ndim != 1 or arr.size < 1:
            raise ParameterError("bit oracle needs a non-empty 1-D bit table")
        if not np.all((arr == 0) | (arr == 1)):
            raise ParameterError("bit oracle entries must be 0 or 1")
        arr.setflags(write=False)
        self._bits = arr

    @property
    def size(self) -> int:
        return int(self._bits.size)

    def query(self, index: int) -> int:
        """Classical probe of one bit; charges one query."""
        if not 0 <= index < self._bits.size:
            raise IndexError(f"oracle index {index} out of range for size {self._bits.size}")
        self.charge(1)
        return int(self._bits[index])

    def marked_indices(self) -> np.ndarray:
        """Simulation-side view used to build operators; free of charge."""
        return np.flatnonzero(self._bits)


class ValueOracle(_CountingOracle):
    """Immutable black-box integer table with per-probe charging."""

    def __init__(self, values, charge_to: Sequence[_CountingOracle] = ()):
        super().__init__(charge_to)
        arr = np.array(values, dtype=np.int64, copy=True)
        if arr.ndim != 1 or arr.size < 1:
            raise ParameterError("value oracle needs a non-empty 1-D value table")
        arr.setflags(write=False)
        self._values = arr

    @property
    def size(self) -> int:
        return int(self._values.size)

    def value(self, index: int) -> int:
        """Classical probe of one table entry; charges one query."""
        if not 0 <= index < self._values.size:
            raise IndexError(f"oracle index {index} out of range for size {self._values.size}")
        self.charge(1)
        return int(self._values[index])

    def peek(self, index: int) -> int:
        """Simulation-side read for operator construction; free of charge."""
        return int(self._values[index])

    def peek_all(self) -> np.ndarray:
        """Simulation-side read-only view of the whole table; free of charge."""
        return self._values


class PredicateOracle(_CountingOracle):
    """Marked-set oracle defined by a predicate or an explicit mask.

    Wrapping another oracle via `charge_to` keeps accounting honest: one
    application of the wrapped predicate still costs one query against the
    underlying black box.
    """

    def __init__(
        self,
        size: int,
        predicate: Optional[Callable[[int], bool]] = None,
        marked: Union[np.ndarray, Iterable[int], None] = None,
        charge_to: Sequence[_CountingOracle] = (),
    ):
        super().__init__(charge_to)
        if size < 1:
            raise ParameterError("predicate oracle needs size >= 1")
        if (predicate is None) == (marked is None):
            raise ParameterError("provide exactly one of predicate or marked")
        self._size = int(size)
        if marked is not None:
            mask = np.zeros(self._size, dtype=bool)
            marked_arr = np.asarray(marked)
            if marked_arr.dtype == bool:
                if marked_arr.size != self._size:
                    raise ParameterError("marked mask length must equal oracle size")
                mask[:] = marked_arr
            else:
                idx = marked_arr.astype(np.int64).ravel()
                if idx.size and (idx.min() < 0 or idx.max() >= self._size):
                    raise IndexError("marked index out of range")
                mask[idx] = True
            mask.setflags(write=False)
            self._mask = mask
            self._predicate = None
        else:
            self._mask = None
            self._predicate = predicate

    @property
    def size(self) -> int:
        return self._size

    def query(self, index: int) -> bool:
        """Evaluate the predicate classically on one index; charges one query."""
        if not 0 <= index < self._size:
            raise IndexError(f"oracle index {index} out of range for size {self._size}")
        self.charge(1)
        if self._mask is not None:
            return bool(self._mask[index])
        return bool(self._predicate(index))

    def marked_indices(self) -> np.ndarray:
        """Simulation-side marked set for operator construction; free of charge."""
        if self._mask is not None:
            return np.flatnonzero(self._mask)
        hits = [i for i in range(self._size) if self._predicate(i)]
        return np.asarray(hits, dtype=np.int64)


def _as_index_array(marked, dimension: int) -> np.ndarray:
    if isinstance(marked, (set, frozenset)):
        marked = sorted(marked)
    idx = np.asarray(marked, dtype=np.int64).ravel()
    if idx.size:
        idx = np.unique(idx)  # duplicate entries must not double-flip
        if idx[0] < 0 or idx[-1] >= dimension:
            raise IndexError(f"marked index out of range for dimension {dimension}")
    return idx


def apply_phase_flip(state: StateVector, marked, oracle: _CountingOracle) -> StateVector:
    """Negate amplitudes on the marked set; charges one oracle query."""
    idx = _as_index_array(marked, state.dimension)
    out = state.amps.copy()
    out[idx] = -out[idx]
    oracle.charge(1)
    return StateVector(out, copy=False, _trusted=True)


def apply_phase_rotation(
    state: StateVector, marked, angle: float, oracle: _CountingOracle
) -> StateVector:
    """Multiply marked amplitudes by exp(i*angle); charges one oracle query."""
    idx = _as_index_array(marked, state.dimension)
    out = state.amps.copy()
    out[idx] = out[idx] * np.exp(1j * angle)
    oracle.charge(1)
    return StateVector(_settle_norm(out), copy=False, _trusted=True)


def apply_diffusion(state: StateVector) -> StateVector:
    """Reflect about the uniform superposition: a_i -> 2*mean(a) - a_i."""
    mean = state.amps.mean()
    out = 2.0 * mean - state.amps
    return StateVector(_settle_norm(out), copy=False, _trusted=True)


def apply_diffusion_rotation(state: StateVector, angle: float) -> StateVector:
    """Apply I + (exp(i*angle) - 1) |u><u| with u the uniform superposition.

    At angle = pi this is the negated standard diffusion; intermediate angles
    give the partial reflections used by the exact-certainty search.
    """
    mean = state.amps.mean()
    out = state.amps + (np.exp(1j * angle) - 1.0) * mean
    return StateVector(_settle_norm(out), copy=False, _trusted=True)


def measure(state: StateVector, rng: SeededRng) -> int:
    """Sample a basis index from |amps|^2; raises if the norm has drifted."""
    p = np.abs(state.amps) ** 2
    total = p.sum()
    if abs(total - 1.0) > MEASURE_NORM_TOL:
        raise NormalizationError(
            f"cannot measure state with squared norm {total:.6g}"
        )
    edges = np.cumsum(p / total)
    draw = rng.generator.random()
    index = int(np.searchsorted(edges, draw, side="right"))
    return min(index, state.dimension - 1)
