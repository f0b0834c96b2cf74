"""Quantum walk search: coined torus walks and Szegedy-quantized chains.

The coined walk lives on (cell, direction) amplitudes over a periodic grid
with a direction-reversing shift and a uniform-reflection coin that is
negated on marked cells; one step bundles a query and a move.  The chain
quantization acts on amplitudes over ordered vertex pairs through two row
and column reflections, never materializing the squared-space operator.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence, Tuple

import numpy as np

from .sim import (
    BitOracle,
    NormalizationError,
    ParameterError,
    SeededRng,
    SizeCapError,
    ValueOracle,
)

__all__ = [
    "TorusGrid",
    "CoinedState",
    "GridWalkResult",
    "ScanResult",
    "uniform_coined_state",
    "localized_coined_state",
    "grid_walk_step",
    "grid_walk_probability_profile",
    "grid_walk_search",
    "grid_classical_search",
    "MarkovChain",
    "WalkCosts",
    "WalkSearchResult",
    "cycle_chain",
    "torus_chain",
    "complete_graph_chain",
    "load_chain",
    "stationary_edge_state",
    "szegedy_step",
    "marked_pair_probability",
    "measure_edge",
    "recommended_step_budget",
    "default_shot_cap",
    "expected_steps_to_success",
    "szegedy_find_marked",
    "classical_hitting",
    "exact_hitting_mean",
    "JohnsonChain",
    "johnson_chain",
    "collision_vertex_probability",
    "EdWalkResult",
    "ed_walk",
]

# Chain matrices must be symmetric and row-stochastic to this precision.
CHAIN_CONSTRUCTION_TOL = 1e-12
# File ingestion accepts looser input and cleans it up to construction grade.
CHAIN_FILE_TOL = 1e-9
# Joint state count cap for subset chains; keeps pair-space arrays desk-scale.
JOHNSON_STATE_CAP = 5000
# Walk-step budget multiplier for the quantized search; calibrated so the
# test families find a marked state in well over a third of runs.
SZEGEDY_BUDGET_FACTOR = 6.0


class TorusGrid:
    """Periodic grid in 2 or 3 dimensions with 2*d signed axis directions."""

    def __init__(self, side: int, dimensions: int):
        if dimensions not in (2, 3):
            raise ParameterError(f"dimensions must be 2 or 3, got {dimensions}")
        if side < 2:
            raise ParameterError(f"side must be >= 2, got {side}")
        self.side = int(side)
        self.dimensions = int(dimensions)
        self.cells = self.side**self.dimensions
        self.direction_count = 2 * self.dimensions
        self._shift_map: Optional[np.ndarray] = None
        self._scan_order: Optional[np.ndarray] = None

    def coordinates(self, cell: int) -> Tuple[int, ...]:
        if not 0 <= cell < self.cells:
            raise IndexError(f"cell {cell} out of range")
        coords = []
        for _ in range(self.dimensions):
            coords.append(cell % self.side)
            cell //= self.side
        return tuple(coords)

    def cell_index(self, coords: Sequence[int]) -> int:
        if len(coords) != self.dimensions:
            raise ParameterError("coordinate arity must match dimensions")
        index = 0
        for axis in reversed(range(self.dimensions)):
            c = coords[axis] % self.side
            index = index * self.side + c
        return index

    def neighbor(self, cell: int, direction: int) -> int:
        """Adjacent cell along a signed axis; direction 2*a+s, s=0 forward."""
        if not 0 <= direction < self.direction_count:
            raise IndexError(f"direction {direction} out of range")
        coords = list(self.coordinates(cell))
        axis, sign = divmod(direction, 2)
        coords[axis] = (coords[axis] + (1 if sign == 0 else -1)) % self.side
        return self.cell_index(coords)

    @staticmethod
    def reverse(direction: int) -> int:
        return direction ^ 1

    def distance(self, a: int, b: int) -> int:
        ca, cb = self.coordinates(a), self.coordinates(b)
        total = 0
        for x, y in zip(ca, cb):
            d = abs(x - y)
            total += min(d, self.side - d)
        return total

    def shift_map(self) -> np.ndarray:
        """Flat permutation sending (cell, dir) to (neighbor, reversed dir)."""
        if self._shift_map is None:
            k = self.direction_count
            target = np.empty(self.cells * k, dtype=np.int64)
            for cell in range(self.cells):
                for direction in range(k):
                    target[cell * k + direction] = (
                        self.neighbor(cell, direction) * k + self.reverse(direction)
                    )
            self._shift_map = target
        return self._shift_map

    def scan_order(self) -> np.ndarray:
        """Boustrophedon visiting order; consecutive cells are adjacent."""
        if self._scan_order is None:
            order = [(c,) for c in range(self.side)]
            for _ in range(self.dimensions - 1):
                extended = []
                for layer in range(self.side):
                    block = order if layer % 2 == 0 else order[::-1]
                    extended.extend(coords + (layer,) for coords in block)
                order = extended
            self._scan_order = np.asarray([self.cell_index(c) for c in order])
        return self._scan_order


class CoinedState:
    """Amplitudes over (cell, direction) pairs of a torus grid."""

    __slots__ = ("amps",)

    def __init__(self, amps: np.ndarray, copy: bool = True):
        arr = np.array(amps, dtype=np.complex128, copy=copy)
        if arr.ndim != 2:
            raise ParameterError("coined state must be a (cells, directions) array")
        self.amps = arr

    def cell_probabilities(self) -> np.ndarray:
        p = (np.abs(self.amps) ** 2).sum(axis=1)
        return p / p.sum()

    def norm(self) -> float:
        return float(np.sqrt((np.abs(self.amps) ** 2).sum()))


def uniform_coined_state(grid: TorusGrid) -> CoinedState:
    amps = np.full(
        (grid.cells, grid.direction_count),
        1.0 / math.sqrt(grid.cells * grid.direction_count),
        dtype=np.complex128,
    )
    return CoinedState(amps, copy=False)


def localized_coined_state(grid: TorusGrid, cell: int) -> CoinedState:
    if not 0 <= cell < grid.cells:
        raise IndexError(f"cell {cell} out of range")
    amps = np.zeros((grid.cells, grid.direction_count), dtype=np.complex128)
    amps[cell, :] = 1.0 / math.sqrt(grid.direction_count)
    return CoinedState(amps, copy=False)


def grid_walk_step(grid: TorusGrid, state: CoinedState, marked) -> CoinedState:
    """One bundled walk step: direction-reversing shift, then the coin.

    Unmarked cells get the uniform-reflection coin (2*mean - amp across the
    cell's directions); marked cells get the negated identity coin.
    """
    flat = state.amps.reshape(-1)
    shifted = np.empty_like(flat)
    shifted[grid.shift_map()] = flat
    shifted = shifted.reshape(grid.cells, grid.direction_count)
    means = shifted.mean(axis=1, keepdims=True)
    out = 2.0 * means - shifted
    marked_idx = np.asarray(list(marked) if isinstance(marked, (set, frozenset)) else marked,
                            dtype=np.int64).ravel()
    if marked_idx.size:
        if marked_idx.min() < 0 or marked_idx.max() >= grid.cells:
            raise IndexError("marked cell out of range")
        out[marked_idx] = -shifted[marked_idx]
    return CoinedState(out, copy=False)


def grid_walk_probability_profile(grid: TorusGrid, marked, max_steps: int) -> np.ndarray:
    """Marked-cell probability after 0..max_steps steps from uniform.

    Pure analysis helper: no oracle is charged.
    """
    if max_steps < 0:
        raise ParameterError("max_steps must be >= 0")
    marked_idx = np.asarray(sorted(marked) if isinstance(marked, (set, frozenset)) else marked,
                            dtype=np.int64).ravel()
    state = uniform_coined_state(grid)
    profile = np.empty(max_steps + 1)
    for step in range(max_steps + 1):
        if step:
            state = grid_walk_step(grid, state, marked_idx)
        p = (np.abs(state.amps[marked_idx]) ** 2).sum() if marked_idx.size else 0.0
        profile[step] = p
    return profile


@dataclass(frozen=True)
class GridWalkResult:
    cell: Optional[int]
    steps: int


def grid_walk_search(
    grid: TorusGrid, oracle: BitOracle, rng: SeededRng, step_budget: int
) -> GridWalkResult:
    """Run the coined walk a random number of steps, then measure one cell.

    Each step bundles one oracle query with one move and charges 1; the
    final membership check of the measured cell charges one more.
    """
    if oracle.size != grid.cells:
        raise ParameterError("oracle size must match grid cells")
    if step_budget < 1:
        raise ParameterError("step_budget must be >= 1")
    marked_idx = oracle.marked_indices()
    steps = int(rng.generator.integers(1, step_budget + 1))
    state = uniform_coined_state(grid)
    for _ in range(steps):
        state = grid_walk_step(grid, state, marked_idx)
    oracle.charge(steps)
    probabilities = state.cell_probabilities()
    edges = np.cumsum(probabilities)
    cell = min(int(np.searchsorted(edges, rng.generator.random(), side="right")),
               grid.cells - 1)
    if oracle.query(cell):
        return GridWalkResult(cell=cell, steps=steps)
    return GridWalkResult(cell=None, steps=steps)


@dataclass(frozen=True)
class ScanResult:
    cell: Optional[int]
    steps: int


def grid_classical_search(grid: TorusGrid, oracle: BitOracle, rng: Optional[SeededRng] = None) -> ScanResult:
    """Boustrophedon scan; one bundled query-and-move step per visited cell.

    The scan order is fixed for reproducibility (rng accepted for interface
    symmetry with the walk search).  An empty marked set costs exactly one
    query per cell.
    """
    if oracle.size != grid.cells:
        raise ParameterError("oracle size must match grid cells")
    for position, cell in enumerate(grid.scan_order()):
        if oracle.query(int(cell)):
            return ScanResult(cell=int(cell), steps=position + 1)
    return ScanResult(cell=None, steps=grid.cells)


class MarkovChain:
    """Symmetric row-stochastic chain with a marked subset.

    The uniform distribution is stationary for any symmetric stochastic
    matrix, which keeps start-state preparation and hitting-time baselines
    simple.
    """

    def __init__(self, matrix, marked=(), _gap: Optional[float] = None):
        arr = np.array(matrix, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 2:
            raise ParameterError("chain needs a square matrix of size >= 2")
        if arr.min() < 0:
            raise ParameterError("transition probabilities must be non-negative")
        row_err = np.abs(arr.sum(axis=1) - 1.0).max()
        if row_err > CHAIN_CONSTRUCTION_TOL:
            raise ParameterError(f"rows must sum to 1 (max error {row_err:.3g})")
        sym_err = np.abs(arr - arr.T).max()
        if sym_err > CHAIN_CONSTRUCTION_TOL:
            raise ParameterError(f"matrix must be symmetric (max error {sym_err:.3g})")
        arr.setflags(write=False)
        self.matrix = arr
        self.size = arr.shape[0]
        self.marked = frozenset(int(i) for i in marked)
        for i in self.marked:
            if not 0 <= i < self.size:
                raise IndexError(f"marked state {i} out of range")
        self._gap = _gap
        self._sqrt: Optional[np.ndarray] = None
        self._row_edges: Optional[np.ndarray] = None
        # keyed by marked frozenset so with_marked clones share solves
        self._hitting_cache: dict = {}

    @property
    def marked_fraction(self) -> float:
        return len(self.marked) / self.size

    @property
    def spectral_gap(self) -> float:
        """Gap between the top two eigenvalues (top is 1 by stochasticity)."""
        if self._gap is None:
            eigenvalues = np.linalg.eigvalsh(self.matrix)
            self._gap = float(eigenvalues[-1] - eigenvalues[-2])
        return self._gap

    def with_marked(self, marked) -> "MarkovChain":
        """Same transition structure, different marked set; caches carry over."""
        clone = object.__new__(type(self))
        clone.__dict__.update(self.__dict__)
        clone.marked = frozenset(int(i) for i in marked)
        for i in clone.marked:
            if not 0 <= i < self.size:
                raise IndexError(f"marked state {i} out of range")
        return clone

    def sqrt_matrix(self) -> np.ndarray:
        if self._sqrt is None:
            root = np.sqrt(self.matrix)
            root.setflags(write=False)
            self._sqrt = root
        return self._sqrt

    def row_edges(self) -> np.ndarray:
        if self._row_edges is None:
            edges = np.cumsum(self.matrix, axis=1)
            edges.setflags(write=False)
            self._row_edges = edges
        return self._row_edges


def cycle_chain(size: int, marked=()) -> MarkovChain:
    """Nearest-neighbor walk on a cycle."""
    if size < 3:
        raise ParameterError("cycle chain needs size >= 3")
    matrix = np.zeros((size, size))
    for i in range(size):
        matrix[i, (i + 1) % size] += 0.5
        matrix[i, (i - 1) % size] += 0.5
    return MarkovChain(matrix, marked)


def torus_chain(side: int, dimensions: int = 2, marked=()) -> MarkovChain:
    """Nearest-neighbor walk on a periodic grid."""
    grid = TorusGrid(side, dimensions)
    matrix = np.zeros((grid.cells, grid.cells))
    step = 1.0 / grid.direction_count
    for cell in range(grid.cells):
        for direction in range(grid.direction_count):
            matrix[cell, grid.neighbor(cell, direction)] += step
    return MarkovChain(matrix, marked)


def complete_graph_chain(size: int, marked=()) -> MarkovChain:
    """Uniform walk on the complete graph (no self-loops)."""
    if size < 2:
        raise ParameterError("complete-graph chain needs size >= 2")
    matrix = np.full((size, size), 1.0 / (size - 1))
    np.fill_diagonal(matrix, 0.0)
    return MarkovChain(matrix, marked)


def load_chain(text: str) -> MarkovChain:
    """Parse a chain from plain text: size line, matrix rows, marked line.

    Input within 1e-9 of symmetric row-stochastic is accepted and settled
    to construction precision; anything worse is rejected.
    """
    lines = [line.strip() for line in text.strip().splitlines() if line.strip() != ""]
    if not lines:
        raise ParameterError("empty chain description")
    try:
        size = int(lines[0])
    except ValueError as exc:
        raise ParameterError(f"first line must be the state count: {lines[0]!r}") from exc
    if size < 2:
        raise ParameterError("chain needs at least 2 states")
    if len(lines) < 1 + size:
        raise ParameterError(f"expected {size} matrix rows, found {len(lines) - 1}")
    rows = []
    for line in lines[1 : 1 + size]:
        row = [float(tok) for tok in line.split()]
        if len(row) != size:
            raise ParameterError(f"matrix row has {len(row)} entries, expected {size}")
        rows.append(row)
    matrix = np.asarray(rows)
    if len(lines) > 1 + size:
        marked = [int(tok) for tok in lines[1 + size].split()]
    else:
        marked = []

    sym_err = np.abs(matrix - matrix.T).max()
    if sym_err > CHAIN_FILE_TOL:
        raise ParameterError(f"matrix asymmetry {sym_err:.3g} exceeds {CHAIN_FILE_TOL}")
    row_err = np.abs(matrix.sum(axis=1) - 1.0).max()
    if row_err > CHAIN_FILE_TOL:
        raise ParameterError(f"row-sum error {row_err:.3g} exceeds {CHAIN_FILE_TOL}")
    low = matrix.min()
    if low < -CHAIN_FILE_TOL:
        raise ParameterError(f"negative transition probability {low:.3g}")
    np.clip(matrix, 0.0, None, out=matrix)
    # Alternate row normalization with symmetrization; each pass shrinks the
    # residual by about half, so tolerance-level noise settles well inside
    # construction precision.
    matrix = 0.5 * (matrix + matrix.T)
    for _ in range(80):
        if np.abs(matrix.sum(axis=1) - 1.0).max() <= 1e-14:
            break
        matrix = matrix / matrix.sum(axis=1, keepdims=True)
        matrix = 0.5 * (matrix + matrix.T)
    return MarkovChain(matrix, marked)


def stationary_edge_state(chain: MarkovChain) -> np.ndarray:
    """Pair-space start state: sqrt(P[x, y] / size) over ordered pairs."""
    return (chain.sqrt_matrix() / math.sqrt(chain.size)).astype(np.complex128)


def _settle_pair_norm(state: np.ndarray) -> np.ndarray:
    n2 = float((state.real**2 + state.imag**2).sum())
    if abs(n2 - 1.0) > 2e-9:
        state = state / math.sqrt(n2)
    return state


def szegedy_step(chain: MarkovChain, edge_state: np.ndarray) -> np.ndarray:
    """One quantized step on pair amplitudes psi[x, y].

    Marked rows are phase-flipped, then the state is reflected about the
    span of row states |x>|p_x> and about its swapped counterpart.  Both
    reflections act through the sqrt-transition matrix, so the cost is one
    pass over the pair array rather than a squared-space matrix product.
    """
    root = chain.sqrt_matrix()
    psi = np.array(edge_state, dtype=np.complex128, copy=True)
    if psi.shape != (chain.size, chain.size):
        raise ParameterError("edge state shape must be (size, size)")
    if chain.marked:
        rows = np.fromiter(chain.marked, dtype=np.int64)
        psi[rows] = -psi[rows]
    row_overlap = (root * psi).sum(axis=1)
    psi = 2.0 * row_overlap[:, None] * root - psi
    column_overlap = (root * psi).sum(axis=0)
    psi = 2.0 * root * column_overlap[None, :] - psi
    return _settle_pair_norm(psi)


def marked_pair_probability(chain: MarkovChain, edge_state: np.ndarray) -> float:
    """Probability that measuring the pair yields a marked state in either slot."""
    if not chain.marked:
        return 0.0
    p = np.abs(edge_state) ** 2
    rows = np.fromiter(chain.marked, dtype=np.int64)
    keep = np.zeros((chain.size, chain.size), dtype=bool)
    keep[rows, :] = True
    keep[:, rows] = True
    return float(p[keep].sum() / p.sum())


def measure_edge(chain: MarkovChain, edge_state: np.ndarray, rng: SeededRng) -> Tuple[int, int]:
    p = (np.abs(edge_state) ** 2).ravel()
    total = p.sum()
    if abs(total - 1.0) > 1e-6:
        raise NormalizationError(f"cannot measure edge state with norm {total:.6g}")
    edges = np.cumsum(p / total)
    flat = min(int(np.searchsorted(edges, rng.generator.random(), side="right")), p.size - 1)
    return divmod(flat, chain.size)


@dataclass(frozen=True)
class WalkCosts:
    """Abstract cost weights: setup, per-step transition, per-step check."""

    setup: float = 0.0
    transition: float = 1.0
    check: float = 0.0

    def __post_init__(self):
        if self.setup < 0 or self.transition < 0 or self.check < 0:
            raise ParameterError("walk costs must be non-negative")


@dataclass(frozen=True)
class WalkSearchResult:
    state: Optional[int]
    walk_steps: int
    preparations: int
    cost: float


def recommended_step_budget(chain: MarkovChain, factor: float = SZEGEDY_BUDGET_FACTOR) -> int:
    """Walk-step budget scaling as 1/sqrt(marked fraction times spectral gap)."""
    if not chain.marked:
        raise ParameterError("budget heuristic needs a non-empty marked set")
    product = chain.marked_fraction * max(chain.spectral_gap, 1e-12)
    return max(1, math.ceil(factor / math.sqrt(product)))


def szegedy_find_marked(
    chain: MarkovChain,
    costs: WalkCosts,
    rng: SeededRng,
    step_budget: Optional[int] = None,
    shot_cap: Optional[int] = None,
) -> WalkSearchResult:
    """Repeat short quantized walks until a measured pair touches the marked set.

    Each attempt restarts from the stationary pair state, runs a uniformly
    random number of steps up to the per-shot cap, and measures both slots.
    The cap defaults to default_shot_cap, the square root of the chain's
    classical mean hitting time. The reported cost is
    preparations*setup + steps*(transition + check).
    """
    if step_budget is None:
        if not chain.marked:
            raise ParameterError("step_budget is required when nothing is marked")
        step_budget = recommended_step_budget(chain)
    if step_budget < 1:
        raise ParameterError("step_budget must be >= 1")
    if not chain.marked:
        # The stationary state is a fixed point when nothing is marked, so
        # no measurement can succeed; report the exhausted budget directly.
        return WalkSearchResult(
            state=None,
            walk_steps=step_budget,
            preparations=1,
            cost=costs.setup + step_budget * (costs.transition + costs.check),
        )
    if shot_cap is None:
        shot_cap = default_shot_cap(chain)
    elif shot_cap < 1:
        raise ParameterError("shot_cap must be >= 1")
    steps_used = 0
    preparations = 0
    marked = chain.marked
    while steps_used < step_budget:
        shot = int(rng.generator.integers(1, shot_cap + 1))
        shot = min(shot, step_budget - steps_used)
        state = stationary_edge_state(chain)
        preparations += 1
        for _ in range(shot):
            state = szegedy_step(chain, state)
        steps_used += shot
        x, y = measure_edge(chain, state, rng)
        hit = x if x in marked else (y if y in marked else None)
        if hit is not None:
            return WalkSearchResult(
                state=int(hit),
                walk_steps=steps_used,
                preparations=preparations,
                cost=preparations * costs.setup + steps_used * (costs.transition + costs.check),
            )
    return WalkSearchResult(
        state=None,
        walk_steps=steps_used,
        preparations=preparations,
        cost=preparations * costs.setup + steps_used * (costs.transition + costs.check),
    )


def classical_hitting(chain: MarkovChain, rng: SeededRng, trials: int) -> float:
    """Monte Carlo mean steps from a stationary start to the marked set."""
    if not chain.marked:
        raise ParameterError("hitting time needs a non-empty marked set")
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    edges = chain.row_edges()
    marked_mask = np.zeros(chain.size, dtype=bool)
    marked_mask[list(chain.marked)] = True
    gen = rng.generator
    states = gen.integers(0, chain.size, size=trials)
    steps = np.zeros(trials, dtype=np.int64)
    active = ~marked_mask[states]
    total = 0
    guard = 50_000_000  # runaway protection; far beyond any desk-scale mean
    # trials advance in lockstep so transition sampling stays vectorized
    while active.any():
        live = np.flatnonzero(active)
        draws = gen.random(live.size)
        states[live] = np.minimum(
            (edges[states[live]] <= draws[:, None]).sum(axis=1), chain.size - 1)
        steps[live] += 1
        total += live.size
        if total > guard:
            raise RuntimeError("hitting-time simulation exceeded the step guard")
        active[live] = ~marked_mask[states[live]]
    return float(steps.mean())


def exact_hitting_mean(chain: MarkovChain) -> float:
    """Mean hitting time from stationarity via the fundamental linear system."""
    if not chain.marked:
        raise ParameterError("hitting time needs a non-empty marked set")
    cached = chain._hitting_cache.get(chain.marked)
    if cached is not None:
        return cached
    unmarked = np.asarray(sorted(set(range(chain.size)) - chain.marked), dtype=np.int64)
    if unmarked.size == 0:
        mean = 0.0
    else:
        Q = chain.matrix[np.ix_(unmarked, unmarked)]
        h = np.linalg.solve(np.eye(unmarked.size) - Q, np.ones(unmarked.size))
        mean = float(h.sum() / chain.size)
    chain._hitting_cache[chain.marked] = mean
    return mean


def expected_steps_to_success(chain: MarkovChain, shot_cap: Optional[int] = None) -> float:
    """Exact expected walk steps until a measured pair touches the marked set.

    Closed-form companion to szegedy_find_marked with an unlimited budget.
    Shot lengths are uniform on [1, cap] and the per-length success
    probability comes from the deterministic marked-pair profile, so the
    value carries no sampling noise.
    """
    if not chain.marked:
        raise ParameterError("expected steps need a non-empty marked set")
    if shot_cap is None:
        shot_cap = default_shot_cap(chain)
    elif shot_cap < 1:
        raise ParameterError("shot_cap must be >= 1")
    state = stationary_edge_state(chain)
    profile = np.empty(shot_cap + 1)
    profile[0] = marked_pair_probability(chain, state)
    for t in range(1, shot_cap + 1):
        state = szegedy_step(chain, state)
        profile[t] = marked_pair_probability(chain, state)
    lengths = np.arange(1, shot_cap + 1, dtype=np.float64)
    hit = profile[1:]
    mean_hit = hit.mean()
    if mean_hit <= 0.0:
        return math.inf
    miss_mass = (1.0 - hit).sum()
    mean_failed_shot = 0.0 if miss_mass <= 0.0 else float(
        (lengths * (1.0 - hit)).sum() / miss_mass)
    mean_success_shot = float((lengths * hit).sum() / (mean_hit * shot_cap))
    failed_shots = (1.0 - mean_hit) / mean_hit
    return failed_shots * mean_failed_shot + mean_success_shot


def default_shot_cap(chain: MarkovChain) -> int:
    """Per-shot step cap: square root of the classical mean hitting time.

    Quantized walks concentrate on marked states within roughly the square
    root of the classical hitting time, so shots longer than that waste
    steps on chains (cycles, notably) whose hitting time sits far below
    the generic 1/(marked_fraction*gap) bound.
    """
    if not chain.marked:
        raise ParameterError("shot cap needs a non-empty marked set")
    return max(1, math.ceil(math.sqrt(max(1.0, exact_hitting_mean(chain)))))


@functools.lru_cache(maxsize=8)
def _johnson_structure(element_count: int, subset_size: int):
    lower = list(combinations(range(element_count), subset_size))
    upper = list(combinations(range(element_count), subset_size + 1))
    states = lower + upper
    count = len(states)
    if count > JOHNSON_STATE_CAP:
        raise SizeCapError(
            f"{count} subset states exceed the cap of {JOHNSON_STATE_CAP}"
        )
    index = {s: i for i, s in enumerate(states)}
    degree = max(element_count - subset_size, subset_size + 1)
    matrix = np.zeros((count, count))
    for i, subset in enumerate(lower):
        members = set(subset)
        for extra in range(element_count):
            if extra in members:
                continue
            j = index[tuple(sorted(subset + (extra,)))]
            matrix[i, j] = matrix[j, i] = 1.0 / degree
    for i in range(count):
        matrix[i, i] = 1.0 - matrix[i].sum()
    member = np.zeros((count, element_count), dtype=bool)
    for i, subset in enumerate(states):
        member[i, list(subset)] = True
    matrix.setflags(write=False)
    member.setflags(write=False)
    return tuple(states), matrix, member


class JohnsonChain(MarkovChain):
    """Bipartite add/remove-one-element chain on M and M+1 subsets.

    Edge weights are flattened to 1/max-degree with lazy self-loops picking
    up the remainder, which keeps the matrix symmetric and stochastic even
    though the two layers have different degrees.
    """

    def __init__(self, element_count: int, subset_size: int, marked=()):
        if not 1 <= subset_size < element_count:
            raise ParameterError(
                f"subset size {subset_size} must be in [1, {element_count - 1}]"
            )
        states, matrix, member = _johnson_structure(element_count, subset_size)
        super().__init__(matrix, marked)
        self.element_count = element_count
        self.subset_size = subset_size
        self.states = states
        self.member = member

    def subset_of(self, state: int) -> Tuple[int, ...]:
        return self.states[state]


def johnson_chain(element_count: int, subset_size: int, oracle: ValueOracle) -> JohnsonChain:
    """Subset chain with states marked when they contain a value collision."""
    if oracle.size != element_count:
        raise ParameterError("oracle size must match element count")
    chain = JohnsonChain(element_count, subset_size)
    values = oracle.peek_all()
    marked = [
        i
        for i, subset in enumerate(chain.states)
        if len(set(values[list(subset)].tolist())) < len(subset)
    ]
    return chain.with_marked(marked)


def collision_vertex_probability(element_count: int, subset_size: int) -> Fraction:
    """Chance a uniform subset of the given size contains a fixed pair."""
    if element_count < 1:
        raise ParameterError("element count must be >= 1")
    if not 0 <= subset_size <= element_count:
        raise ParameterError(
            f"subset size {subset_size} outside [0, {element_count}]"
        )
    if subset_size < 2:
        return Fraction(0)
    return Fraction(subset_size, element_count) * Fraction(subset_size - 1, element_count - 1)


@dataclass(frozen=True)
class EdWalkResult:
    pair: Optional[Tuple[int, int]]
    queries: int
    walk_steps: int


def ed_walk(
    oracle: ValueOracle,
    element_count: int,
    subset_size: int,
    rng: SeededRng,
    step_budget: Optional[int] = None,
    shot_cap: Optional[int] = None,
) -> EdWalkResult:
    """Collision search by quantized walk on the subset chain.

    Charges `subset_size` queries to populate the start vertex and one query
    per walk step; a measured collision-containing subset yields the pair
    from values already paid for. Explicit step_budget and shot_cap skip
    the per-chain schedule solve, which repeated studies want to reuse.
    """
    chain = johnson_chain(element_count, subset_size, oracle)
    start_count = oracle.query_count
    oracle.charge(subset_size)
    costs = WalkCosts(setup=float(subset_size), transition=1.0, check=0.0)
    if not chain.marked:
        budget = step_budget if step_budget is not None else max(
            1, math.ceil(SZEGEDY_BUDGET_FACTOR * math.sqrt(chain.size))
        )
        result = szegedy_find_marked(chain, costs, rng, step_budget=budget)
    else:
        result = szegedy_find_marked(chain, costs, rng, step_budget=step_budget,
                                     shot_cap=shot_cap)
    oracle.charge(result.walk_steps)
    if result.state is None:
        return EdWalkResult(pair=None, queries=oracle.query_count - start_count,
                            walk_steps=result.walk_steps)
    subset = chain.subset_of(result.state)
    values = oracle.peek_all()
    seen: dict[int, int] = {}
    for element in subset:
        v = int(values[element])
        if v in seen:
            pair = (seen[v], element)
            return EdWalkResult(pair=pair, queries=oracle.query_count - start_count,
                                walk_steps=result.walk_steps)
        seen[v] = element
    raise RuntimeError("marked subset lost its collision; chain marking is broken")
