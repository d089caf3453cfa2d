from fractions import Fraction

import numpy as np
import pytest

import oracles
from randjig.core import Assembly, Carving, JigSystem
from randjig.experiments import feasibility_mc
from randjig.sampler import jig_system_of_kind, make_rng, sample_carving
from randjig.solver import is_feasible_batch
from randjig.structure import (
    connected_regions, contour_graph, dual_edges, exact_feasibility_probability,
    is_contour_edge, is_k_good, old_new_graph, planted_partner, render_contours, shape_multiplicity,
)


def test_planted_partner():
    assert planted_partner(((0, 0), 1), 3) == ((0, 1), 3)
    assert planted_partner(((0, 0), 0), 3) is None


def test_planted_and_rotated_have_no_contour():
    for a in (Assembly.planted(4), Assembly.planted(4).rotated(1), Assembly.planted_window(5, 1, 1, 3, 2)):
        assert len(contour_graph(a)) == 0
        assert len(connected_regions(a)) == 1
        assert exact_feasibility_probability(a, JigSystem.identity(7)).value == 1
    assert len(dual_edges(Assembly.planted(4))) == 24


def test_distant_swap_structure():
    a = Assembly.planted(6).swapped((1, 1), (4, 4))
    cg = contour_graph(a)
    assert len(cg) == 8 and len(cg.contours) == 2
    assert len(connected_regions(a)) == 3
    g = old_new_graph(a)
    assert g.num_cycles == 4 and g.cycle_new_counts() == [2, 2, 2, 2] and g.paths == ()
    assert exact_feasibility_probability(a, JigSystem.identity(5)).value == Fraction(1, 625)


def test_boundary_swap_has_paths():
    a = Assembly.planted(3).swapped((0, 0), (2, 2))
    g = old_new_graph(a)
    assert len(g.new_edges) == 4 and g.num_cycles == 0
    assert sorted(g.path_new_counts()) == [1, 1, 1, 1]


def test_region_offsets_checked():
    # a rotated 2x2 block cut out of the planted grid forms its own region
    n = 4
    cells = {(r, c): ((r, c), 0) for r in range(n) for c in range(n)}
    block = {(1, 1): ((1, 2), 1), (1, 2): ((2, 2), 1), (2, 1): ((1, 1), 1), (2, 2): ((2, 1), 1)}
    cells.update(block)
    a = Assembly(n, cells)
    regions = connected_regions(a)
    assert sorted(map(len, regions)) == [4, 12]
    assert len(contour_graph(a)) == 8 and old_new_graph(a).num_cycles == 2
    sys = JigSystem.identity(3)
    assert exact_feasibility_probability(a, sys).value == Fraction(1, 3**6)
    mc = feasibility_mc(a, n, sys, 200_000, seed=3)
    assert abs(mc.z) < 4


def test_render_contours_marks_segments():
    text = render_contours(Assembly.planted(3).swapped((0, 0), (0, 1)))
    assert "#" in text and "=" in text
    assert render_contours(Assembly(2, {})) == ""


@pytest.mark.parametrize("kind", ["identity", "paired"])
def test_exact_probability_by_enumerating_all_carvings(kind):
    q, n = 2, 2
    sys = jig_system_of_kind(q, kind)
    north, west = oracles.all_carvings(n, q)
    assemblies = [
        Assembly.planted(2).swapped((0, 0), (1, 1)),
        Assembly.planted(2).with_rotation((0, 0), 2),
        Assembly.planted(2).rotated(1).swapped((0, 0), (0, 1)),
        Assembly(2, {(0, 0): ((0, 0), 0), (0, 1): ((1, 1), 0)}),
        Assembly(2, {(0, 0): ((0, 1), 1), (1, 0): ((1, 0), 0)}),
    ]
    for a in assemblies:
        hits = int(is_feasible_batch(a, north, west, sys).sum())
        assert Fraction(hits, q ** (2 * n * (n + 1))) == exact_feasibility_probability(a, sys).value


def _carving_with_edges(n, q, horizontal, vertical):
    """Identity-system carving whose interior edge types are given; the rest
    use fresh distinct values."""
    north = np.zeros((n + 1, n), dtype=np.int64)
    west = np.zeros((n, n + 1), dtype=np.int64)
    north[1:n, :] = vertical
    west[:, 1:n] = horizontal
    fresh = iter(range(int(max(north.max(), west.max())) + 1, q + 1))
    for arr in (north, west):
        for idx in zip(*np.nonzero(arr == 0)):
            arr[idx] = next(fresh)
    return Carving(n, north, west)


def test_shape_multiplicity_counts_disjoint_pairs():
    sys = JigSystem.identity(60)
    n = 4
    H = np.arange(1, 13).reshape(4, 3)
    V = np.arange(13, 25).reshape(3, 4)
    w = _carving_with_edges(n, 60, H, V)
    a = Assembly.planted(n)
    edges = dual_edges(a)
    assert shape_multiplicity(edges, w, sys) == 0
    H2 = H.copy()
    H2[0, 0] = H2[0, 1] = H2[1, 0] = 1
    assert shape_multiplicity(edges, _carving_with_edges(n, 60, H2, V), sys) == 1
    H2[1, 1] = 1
    assert shape_multiplicity(edges, _carving_with_edges(n, 60, H2, V), sys) == 2


def test_shape_multiplicity_uses_fitting_classes():
    sys = JigSystem(4, (2, 1, 4, 3))
    a = Assembly.planted(2)
    # horizontal edges carry stored values 1 and 2, which are the same type
    w = Carving(2, [[3, 3], [3, 4], [3, 3]], [[3, 1, 3], [3, 2, 3]])
    h_edges = [e for e in dual_edges(a) if e.horizontal_neighbours]
    assert shape_multiplicity(h_edges, w, sys) == 1


def test_k_good_errors():
    sys = JigSystem.identity(5)
    w = sample_carving(4, sys, make_rng(0))
    with pytest.raises(ValueError):
        is_k_good(Assembly.planted(4), w, sys, 6)
    with pytest.raises(ValueError):
        is_k_good(Assembly.planted(4), w, sys, 3)
    with pytest.raises(ValueError):
        is_k_good(Assembly.planted_window(4, 0, 0, 2, 2), w, sys, 2)


def _k_good_brute(n, k, H, V):
    for top in range(n - k + 1):
        for left in range(n - k + 1):
            types = list(H[top:top + k, left:left + k - 1].ravel()) + list(V[top:top + k - 1, left:left + k].ravel())
            sm = sum(types.count(t) // 2 for t in set(types))
            touches = top == 0 or left == 0 or top + k == n or left + k == n
            if sm > (1 if touches else 2):
                return False
    return True


def test_k_good_sliding_window_matches_direct_count():
    rng = np.random.default_rng(0)
    n, q = 6, 40
    sys = JigSystem.identity(q)
    for _ in range(60):
        H = rng.integers(1, q + 1, size=(n, n - 1))
        V = rng.integers(1, q + 1, size=(n - 1, n))
        w = Carving(n, np.vstack([np.ones((1, n)), V, np.ones((1, n))]), np.hstack([np.ones((n, 1)), H, np.ones((n, 1))]))
        for k in (2, 4, 6):
            assert is_k_good(Assembly.planted(n), w, sys, k) == _k_good_brute(n, k, H, V)


from hypothesis import given, settings, strategies as st  # noqa: E402

from randjig.solver import is_feasible  # noqa: E402


@st.composite
def assemblies(draw, n=3):
    cells = [(r, c) for r in range(n) for c in range(n)]
    full = draw(st.booleans())
    k = n * n if full else draw(st.integers(2, 5))
    pos = cells if full else draw(st.permutations(cells))[:k]
    origins = draw(st.permutations(cells))[:k]
    rots = draw(st.lists(st.integers(0, 3), min_size=k, max_size=k))
    return Assembly(n, {p: (o, r) for p, o, r in zip(pos, origins, rots)})


@settings(max_examples=300, deadline=None)
@given(assemblies())
def test_contour_edges_separate_regions(a):
    regions = connected_regions(a)
    region_of = {p: i for i, r in enumerate(regions) for p in r}
    for e in dual_edges(a):
        assert is_contour_edge(e, a.n) == (region_of[e.cells[0]] != region_of[e.cells[1]])


@settings(max_examples=300, deadline=None)
@given(assemblies(), st.integers(0, 2**32))
def test_feasible_assemblies_pair_up_cycles(a, seed):
    # every cycle of a feasible assembly needs two contour edges of one type
    sys_ = JigSystem.identity(2)
    g = old_new_graph(a)
    edges = contour_graph(a).edges
    for i in range(6):
        w = sample_carving(a.n, sys_, make_rng(seed + i))
        if is_feasible(a, w, sys_):
            assert shape_multiplicity(edges, w, sys_) >= g.num_cycles


@settings(max_examples=200, deadline=None)
@given(assemblies())
def test_complete_contour_free_iff_rotated_planted(a):
    if not a.is_complete:
        return
    planted = Assembly.planted(a.n)
    is_rotation = any(a == planted.rotated(k) for k in range(4))
    assert (len(contour_graph(a)) == 0) == is_rotation


def test_contour_free_translated_window():
    # a planted window shifted to another spot of the grid keeps its adjacencies
    a = Assembly(4, {(r + 2, c + 1): ((r, c), 0) for r in range(2) for c in range(3)})
    assert len(contour_graph(a)) == 0 and len(connected_regions(a)) == 1


@pytest.mark.parametrize("n,q,kind", [(2, 3, "identity"), (2, 3, "paired")])
def test_exact_probability_enumeration_q3(n, q, kind):
    sys_ = jig_system_of_kind(q, kind)
    north, west = oracles.all_carvings(n, q)
    for a in (Assembly.planted(2).swapped((0, 0), (1, 1)), Assembly.planted(2).with_rotation((1, 0), 1)):
        hits = int(is_feasible_batch(a, north, west, sys_).sum())
        assert Fraction(hits, q ** (2 * n * (n + 1))) == exact_feasibility_probability(a, sys_).value
