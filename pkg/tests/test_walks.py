"""Walk tests: torus geometry, coined search, quantized chains, subset walks.

Every unitary here is cross-checked against a dense matrix assembled
independently from the definitions (shift plus per-cell coin; two
edge-space reflections through the square-root transition matrix), and
hitting times are checked against closed forms and Monte Carlo.
"""

import math
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsearchlab import walks
from qsearchlab.sim import BitOracle, ParameterError, SeededRng, ValueOracle
from qsearchlab.walks import (
    CoinedState,
    JohnsonChain,
    MarkovChain,
    TorusGrid,
    WalkCosts,
    classical_hitting,
    collision_vertex_probability,
    complete_graph_chain,
    cycle_chain,
    default_shot_cap,
    ed_walk,
    exact_hitting_mean,
    expected_steps_to_success,
    grid_classical_search,
    grid_walk_probability_profile,
    grid_walk_search,
    grid_walk_step,
    johnson_chain,
    load_chain,
    localized_coined_state,
    marked_pair_probability,
    measure_edge,
    recommended_step_budget,
    stationary_edge_state,
    szegedy_find_marked,
    szegedy_step,
    torus_chain,
    uniform_coined_state,
)


# ------------------------------------------------------------ torus geometry

def test_grid_coordinate_roundtrip():
    for side, dims in ((4, 2), (3, 3), (2, 2)):
        grid = TorusGrid(side, dims)
        for cell in range(grid.cells):
            assert grid.cell_index(grid.coordinates(cell)) == cell


def test_grid_neighbors_and_reverse():
    grid = TorusGrid(4, 2)
    # hand-checked: cell 5 is (1, 1); +x lands on (2, 1) = 6, -y on (1, 0) = 1
    assert grid.coordinates(5) == (1, 1)
    assert grid.neighbor(5, 0) == 6
    assert grid.neighbor(5, 3) == 1
    for dims in (2, 3):
        g = TorusGrid(3, dims)
        for cell in range(g.cells):
            for direction in range(g.direction_count):
                back = g.neighbor(g.neighbor(cell, direction), g.reverse(direction))
                assert back == cell


def test_grid_distance_is_a_wraparound_metric():
    grid = TorusGrid(6, 2)
    assert grid.distance(0, grid.cell_index((5, 0))) == 1
    assert grid.distance(0, grid.cell_index((3, 3))) == 6
    for a in (0, 7, 20):
        assert grid.distance(a, a) == 0
        for b in (1, 9, 35):
            assert grid.distance(a, b) == grid.distance(b, a)


def test_shift_map_is_an_involutive_permutation():
    for side, dims in ((4, 2), (3, 3)):
        grid = TorusGrid(side, dims)
        shift = grid.shift_map()
        assert sorted(shift) == list(range(grid.cells * grid.direction_count))
        assert np.array_equal(shift[shift], np.arange(shift.size))


def test_scan_order_visits_adjacent_cells():
    for side, dims in ((4, 2), (3, 3)):
        grid = TorusGrid(side, dims)
        order = grid.scan_order()
        assert sorted(order) == list(range(grid.cells))
        for a, b in zip(order, order[1:]):
            assert grid.distance(int(a), int(b)) == 1


def test_grid_validation():
    with pytest.raises(ParameterError):
        TorusGrid(4, 1)
    with pytest.raises(ParameterError):
        TorusGrid(1, 2)
    grid = TorusGrid(3, 2)
    with pytest.raises(IndexError):
        grid.coordinates(9)
    with pytest.raises(IndexError):
        grid.neighbor(0, 4)


# ------------------------------------------------------------- coined walk

def _dense_coined_step(grid: TorusGrid, marked) -> np.ndarray:
    """Independent dense operator: flip-flop shift, then per-cell coin."""
    k = grid.direction_count
    n = grid.cells * k
    shift = np.zeros((n, n))
    for cell in range(grid.cells):
        for direction in range(k):
            src = cell * k + direction
            dst = grid.neighbor(cell, direction) * k + grid.reverse(direction)
            shift[dst, src] = 1.0
    coin = np.zeros((n, n))
    grover_coin = 2.0 / k * np.ones((k, k)) - np.eye(k)
    for cell in range(grid.cells):
        block = -np.eye(k) if cell in marked else grover_coin
        coin[cell * k:(cell + 1) * k, cell * k:(cell + 1) * k] = block
    return coin @ shift


def test_grid_walk_step_matches_dense_operator():
    rng = SeededRng(21)
    for side, dims, marked in ((4, 2, {0, 5}), (3, 3, {13}), (2, 2, set())):
        grid = TorusGrid(side, dims)
        dense = _dense_coined_step(grid, marked)
        assert np.abs(dense @ dense.T - np.eye(dense.shape[0])).max() < 1e-12
        for _ in range(5):
            raw = rng.generator.normal(size=(grid.cells, grid.direction_count))
            raw = raw / np.linalg.norm(raw)
            state = CoinedState(raw.astype(complex))
            stepped = grid_walk_step(grid, state, marked)
            expected = dense @ raw.reshape(-1)
            assert np.abs(stepped.amps.reshape(-1) - expected).max() < 1e-12


def test_walk_locality_is_exact():
    # amplitude cannot outrun the shift: after t steps nothing lives
    # beyond distance t from the start cell
    grid = TorusGrid(8, 2)
    state = localized_coined_state(grid, 0)
    for t in range(1, 5):
        state = grid_walk_step(grid, state, {0})
        probs = state.cell_probabilities()
        outside = [c for c in range(grid.cells) if grid.distance(0, c) > t]
        assert float(probs[outside].sum()) == 0.0


def test_uniform_profile_starts_at_marked_fraction():
    grid = TorusGrid(4, 2)
    profile = grid_walk_probability_profile(grid, {3, 7}, 12)
    assert profile[0] == pytest.approx(2 / 16, abs=1e-12)
    assert profile.shape == (13,)
    assert profile.max() > 2.5 * profile[0]  # the walk concentrates on marks


def test_grid_walk_search_accounting():
    grid = TorusGrid(4, 2)
    bits = np.zeros(16, dtype=int)
    bits[9] = 1
    budget = 12
    hits = 0
    for seed in range(100):
        oracle = BitOracle(bits)
        result = grid_walk_search(grid, oracle, SeededRng(303, seed), step_budget=budget)
        assert 1 <= result.steps <= budget
        assert oracle.query_count == result.steps + 1
        if result.cell is not None:
            assert result.cell == 9
            hits += 1
    # success rate is the profile mean over uniform step draws, about 0.17
    expected = float(grid_walk_probability_profile(grid, {9}, budget)[1:].mean())
    sigma = math.sqrt(100 * expected * (1 - expected))
    assert abs(hits - 100 * expected) < 4 * sigma


def test_grid_walk_search_validation():
    grid = TorusGrid(4, 2)
    with pytest.raises(ParameterError):
        grid_walk_search(grid, BitOracle(np.zeros(9, dtype=int)), SeededRng(0), 5)
    with pytest.raises(ParameterError):
        grid_walk_search(grid, BitOracle(np.zeros(16, dtype=int)), SeededRng(0), 0)


def test_classical_scan_costs_one_query_per_cell():
    grid = TorusGrid(4, 2)
    bits = np.zeros(16, dtype=int)
    bits[grid.scan_order()[4]] = 1
    oracle = BitOracle(bits)
    result = grid_classical_search(grid, oracle)
    assert result.steps == 5
    assert oracle.query_count == 5
    empty = BitOracle(np.zeros(16, dtype=int))
    miss = grid_classical_search(grid, empty)
    assert miss.cell is None
    assert empty.query_count == 16


# ------------------------------------------------------------ Markov chains

def test_chain_validation():
    with pytest.raises(ParameterError):
        MarkovChain(np.array([[0.5, 0.5], [0.9, 0.2]]))  # bad row sum
    with pytest.raises(ParameterError):
        MarkovChain(np.array([[0.0, 1.0], [0.4, 0.6]]))  # asymmetric
    with pytest.raises(ParameterError):
        MarkovChain(np.array([[1.0]]))
    with pytest.raises(ParameterError):
        MarkovChain(np.array([[1.2, -0.2], [-0.2, 1.2]]))
    with pytest.raises(IndexError):
        cycle_chain(4, marked={4})


def test_spectral_gap_closed_forms():
    # cycle: 1 - cos(2*pi/S); complete graph: S/(S-1); 2-d torus halves the cycle gap
    assert cycle_chain(8).spectral_gap == pytest.approx(1 - math.cos(math.pi / 4), abs=1e-12)
    assert cycle_chain(16).spectral_gap == pytest.approx(0.07612046748871324, abs=1e-12)
    for size in (2, 5, 9):
        assert complete_graph_chain(size).spectral_gap == pytest.approx(
            size / (size - 1), abs=1e-12)
    assert torus_chain(6, 2).spectral_gap == pytest.approx(
        (1 - math.cos(math.pi / 3)) / 2, abs=1e-12)


def test_with_marked_shares_structure_and_cache():
    chain = cycle_chain(12, marked={0})
    exact_hitting_mean(chain)
    clone = chain.with_marked({3})
    assert clone.matrix is chain.matrix
    assert frozenset({0}) in clone._hitting_cache
    # relabeling a vertex-transitive chain cannot change the hitting time
    assert exact_hitting_mean(clone) == pytest.approx(exact_hitting_mean(chain), abs=1e-12)


def test_load_chain_round_trip_and_tolerance():
    rng = SeededRng(55)
    base = cycle_chain(5).matrix
    noisy = base + rng.generator.uniform(-4e-10, 4e-10, size=base.shape)
    noisy = 0.5 * (noisy + noisy.T)  # keep the perturbation symmetric
    lines = ["5"] + [" ".join(f"{v:.12e}" for v in row) for row in noisy] + ["0 2"]
    chain = load_chain("\n".join(lines))
    assert chain.marked == {0, 2}
    assert np.abs(chain.matrix.sum(axis=1) - 1.0).max() < 1e-12
    assert np.abs(chain.matrix - base).max() < 1e-8


def test_load_chain_rejects_bad_input():
    with pytest.raises(ParameterError):
        load_chain("")
    with pytest.raises(ParameterError):
        load_chain("2\n0.5 0.5")
    with pytest.raises(ParameterError):
        load_chain("2\n0.5 0.5 0.5\n0.5 0.5")
    with pytest.raises(ParameterError):
        load_chain("1\n1.0")
    bad = cycle_chain(4).matrix.copy()
    bad[0, 1] += 1e-6  # beyond ingestion tolerance
    text = "4\n" + "\n".join(" ".join(map(str, row)) for row in bad)
    with pytest.raises(ParameterError):
        load_chain(text)


# ------------------------------------------------------------ quantization

def _dense_szegedy_step(chain: MarkovChain) -> np.ndarray:
    """Independent dense operator: marked flip, row and column reflections."""
    size = chain.size
    root = np.sqrt(chain.matrix)
    dim = size * size
    proj_rows = np.zeros((dim, dim))
    for x in range(size):
        vec = np.zeros(dim)
        vec[x * size:(x + 1) * size] = root[x]
        proj_rows += np.outer(vec, vec)
    proj_cols = np.zeros((dim, dim))
    for y in range(size):
        vec = np.zeros(dim)
        vec[y::size] = root[:, y]
        proj_cols += np.outer(vec, vec)
    flip = np.eye(dim)
    for x in chain.marked:
        flip[x * size:(x + 1) * size, x * size:(x + 1) * size] *= -1.0
    return (2.0 * proj_cols - np.eye(dim)) @ (2.0 * proj_rows - np.eye(dim)) @ flip


def test_szegedy_step_matches_dense_reflections():
    rng = SeededRng(31)
    cases = (
        cycle_chain(5, marked={1}),
        complete_graph_chain(4, marked={0, 2}),
        torus_chain(2, 2, marked={3}),
        cycle_chain(4),
    )
    for chain in cases:
        dense = _dense_szegedy_step(chain)
        assert np.abs(dense @ dense.T - np.eye(dense.shape[0])).max() < 1e-12
        for _ in range(4):
            raw = rng.generator.normal(size=(chain.size, chain.size)) \
                + 1j * rng.generator.normal(size=(chain.size, chain.size))
            raw = raw / np.linalg.norm(raw)
            stepped = szegedy_step(chain, raw)
            expected = (dense @ raw.reshape(-1)).reshape(chain.size, chain.size)
            assert np.abs(stepped - expected).max() < 1e-12


def test_stationary_state_is_fixed_without_marks():
    for chain in (cycle_chain(6), complete_graph_chain(5), torus_chain(3, 2)):
        psi = stationary_edge_state(chain)
        assert abs(np.linalg.norm(psi) - 1.0) < 1e-12
        assert np.abs(szegedy_step(chain, psi) - psi).max() < 1e-12


def test_marked_pair_probability_brute_force():
    rng = SeededRng(32)
    chain = cycle_chain(6, marked={0, 4})
    raw = rng.generator.normal(size=(6, 6))
    raw = raw / np.linalg.norm(raw)
    p = np.abs(raw) ** 2
    # independent route: complement of the fully unmarked pairs
    unmarked = [1, 2, 3, 5]
    want = p.sum() - p[np.ix_(unmarked, unmarked)].sum()
    assert marked_pair_probability(chain, raw) == pytest.approx(want, abs=1e-12)
    assert marked_pair_probability(cycle_chain(6), raw) == 0.0


def test_cycle_profile_is_exactly_flat():
    # degree-2 rows make the row reflection a swap, so the quantized cycle
    # never concentrates: the marked-pair mass stays at 2/S forever
    chain = cycle_chain(8, marked={0})
    psi = stationary_edge_state(chain)
    for _ in range(16):
        assert marked_pair_probability(chain, psi) == pytest.approx(0.25, abs=1e-12)
        psi = szegedy_step(chain, psi)


def test_torus_profile_amplifies():
    chain = torus_chain(4, 2, marked={0})
    psi = stationary_edge_state(chain)
    peak = 0.0
    for _ in range(30):
        psi = szegedy_step(chain, psi)
        peak = max(peak, marked_pair_probability(chain, psi))
    assert peak > 2.5 * (2 / 16)


def test_measure_edge_distribution():
    chain = cycle_chain(4, marked={0})
    psi = np.zeros((4, 4), dtype=complex)
    psi[0, 1] = math.sqrt(0.25)
    psi[2, 3] = math.sqrt(0.75)
    rng = SeededRng(909)
    counts = {(0, 1): 0, (2, 3): 0}
    for _ in range(2000):
        counts[measure_edge(chain, psi, rng)] += 1
    assert abs(counts[(2, 3)] / 2000 - 0.75) < 0.04


# ------------------------------------------------------------- hitting times

def test_cycle_hitting_closed_form():
    # mean over a uniform start (marked start counts 0) is (S^2 - 1) / 6
    for size in (3, 8, 16, 64):
        assert exact_hitting_mean(cycle_chain(size, marked={0})) == pytest.approx(
            (size * size - 1) / 6.0, abs=1e-9)


def test_complete_graph_hitting_closed_form():
    # each unmarked state needs S-1 expected steps; the start is uniform
    for size in (2, 5, 8):
        chain = complete_graph_chain(size, marked={size - 1})
        assert exact_hitting_mean(chain) == pytest.approx(
            (size - 1) ** 2 / size, abs=1e-9)


def test_monte_carlo_hitting_tracks_exact_solution():
    for chain in (cycle_chain(12, marked={0}), complete_graph_chain(8, marked={3})):
        exact = exact_hitting_mean(chain)
        sampled = classical_hitting(chain, SeededRng(4444, 0), trials=2000)
        assert abs(sampled - exact) / exact < 0.10


def test_hitting_validation():
    with pytest.raises(ParameterError):
        exact_hitting_mean(cycle_chain(6))
    with pytest.raises(ParameterError):
        classical_hitting(cycle_chain(6), SeededRng(0), 100)
    with pytest.raises(ParameterError):
        classical_hitting(cycle_chain(6, marked={0}), SeededRng(0), 0)


def test_default_shot_cap_is_root_hitting_time():
    chain = cycle_chain(16, marked={0})
    assert default_shot_cap(chain) == math.ceil(math.sqrt((256 - 1) / 6))
    assert default_shot_cap(torus_chain(4, 2, marked={5})) >= 1
    with pytest.raises(ParameterError):
        default_shot_cap(cycle_chain(8))


# ------------------------------------------------------- quantized search

def test_szegedy_search_finds_marked_and_accounts_cost():
    chain = torus_chain(4, 2, marked={9})
    costs = WalkCosts(setup=2.0, transition=1.0, check=0.5)
    found = 0
    for seed in range(30):
        result = szegedy_find_marked(chain, costs, SeededRng(112, seed))
        assert result.cost == pytest.approx(
            result.preparations * 2.0 + result.walk_steps * 1.5, abs=1e-12)
        if result.state is not None:
            assert result.state == 9
            found += 1
    assert found >= 20


def test_szegedy_search_shot_cap_one_prepares_every_step():
    chain = complete_graph_chain(6, marked={2})
    result = szegedy_find_marked(chain, WalkCosts(), SeededRng(77, 0), shot_cap=1)
    assert result.preparations == result.walk_steps


def test_szegedy_search_without_marks_exhausts_budget():
    chain = cycle_chain(8)
    result = szegedy_find_marked(chain, WalkCosts(), SeededRng(0, 0), step_budget=17)
    assert result.state is None
    assert result.walk_steps == 17
    with pytest.raises(ParameterError):
        szegedy_find_marked(chain, WalkCosts(), SeededRng(0, 0))


def test_szegedy_search_validation():
    chain = cycle_chain(8, marked={0})
    with pytest.raises(ParameterError):
        szegedy_find_marked(chain, WalkCosts(), SeededRng(0), step_budget=0)
    with pytest.raises(ParameterError):
        szegedy_find_marked(chain, WalkCosts(), SeededRng(0), shot_cap=0)
    with pytest.raises(ParameterError):
        WalkCosts(setup=-1.0)
    with pytest.raises(ParameterError):
        recommended_step_budget(cycle_chain(8))


def test_expected_steps_matches_search_monte_carlo():
    chain = cycle_chain(8, marked={0})
    exact = expected_steps_to_success(chain)
    runs = [
        szegedy_find_marked(chain, WalkCosts(), SeededRng(5150, seed), step_budget=10_000)
        for seed in range(300)
    ]
    assert all(r.state == 0 for r in runs)
    sampled = sum(r.walk_steps for r in runs) / len(runs)
    assert abs(sampled - exact) / exact < 0.15


def test_expected_steps_validation():
    with pytest.raises(ParameterError):
        expected_steps_to_success(cycle_chain(8))
    with pytest.raises(ParameterError):
        expected_steps_to_success(cycle_chain(8, marked={0}), shot_cap=0)


# ----------------------------------------------------------- subset walks

def test_johnson_chain_structure():
    chain = JohnsonChain(5, 2)
    # layers: all 2-subsets then all 3-subsets of {0..4}
    assert chain.size == math.comb(5, 2) + math.comb(5, 3)
    assert len(chain.subset_of(0)) == 2
    assert len(chain.subset_of(chain.size - 1)) == 3
    for u in range(chain.size):
        for v in range(chain.size):
            adjacent = chain.matrix[u, v] > 0
            su, sv = set(chain.subset_of(u)), set(chain.subset_of(v))
            one_step = len(su ^ sv) == 1
            if adjacent:
                assert one_step or u == v  # lazy self-loops are allowed
            if one_step:
                assert chain.matrix[u, v] > 0


def test_johnson_chain_marks_collision_vertices():
    values = [7, 1, 7, 3, 4, 5, 6, 0]  # planted pair at positions 0 and 2
    chain = johnson_chain(8, 4, ValueOracle(values))
    want = math.comb(6, 2) + math.comb(6, 3)  # supersets of {0, 2} in both layers
    assert len(chain.marked) == want
    for state in chain.marked:
        subset = chain.subset_of(state)
        assert {0, 2} <= set(subset)
    distinct = johnson_chain(6, 3, ValueOracle(list(range(6))))
    assert distinct.marked == frozenset()


@given(st.integers(min_value=2, max_value=9).flatmap(
    lambda n: st.tuples(st.just(n), st.integers(min_value=0, max_value=n))))
@settings(max_examples=40, deadline=None)
def test_collision_vertex_probability_matches_enumeration(case):
    element_count, subset_size = case
    fraction = collision_vertex_probability(element_count, subset_size)
    assert isinstance(fraction, Fraction)
    if element_count < 2:
        return
    containing = sum(
        1 for subset in combinations(range(element_count), subset_size)
        if 0 in subset and 1 in subset)
    total = math.comb(element_count, subset_size)
    assert fraction == Fraction(containing, total)


def test_ed_walk_recovers_planted_collision():
    values = list(range(6))
    values[4] = values[1]  # single duplicated value
    found = 0
    for seed in range(60):
        oracle = ValueOracle(values)
        result = ed_walk(oracle, 6, 4, SeededRng(2828, seed))
        assert result.queries == 4 + result.walk_steps
        assert oracle.query_count == result.queries
        if result.pair is not None:
            assert result.pair == (1, 4)
            found += 1
    assert found >= 30


def test_ed_walk_on_distinct_values_returns_nothing():
    oracle = ValueOracle([3, 1, 4, 5])
    result = ed_walk(oracle, 4, 2, SeededRng(1, 1))
    assert result.pair is None
