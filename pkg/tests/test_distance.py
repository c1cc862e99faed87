import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from steeptime.causal import build_causal_graph, reachability
from steeptime.distance import (PathError, distance, distance_field, distance_matrix,
                                distance_to_field, export_distance_table, path_length,
                                stable_distance)
from steeptime.geometry import builtin_spacetime

MINK = builtin_spacetime("minkowski2d", dims=(5, 5))


@pytest.mark.parametrize("radius", [1, 2])
def test_all_pairs_match_longest_path_oracle(radius):
    g = build_causal_graph(MINK, radius)
    want = np.array(oracles.longest_paths(25, oracles.minkowski_edges(5, 5, radius)))
    np.testing.assert_allclose(distance_matrix(g, range(25)), want, atol=1e-12)


def test_custom_finsler_matches_oracle_on_graph_edges():
    s = builtin_spacetime("custom_finsler_polyhedral", dims=(5, 5))
    g = build_causal_graph(s, 2)
    edges = {(int(u), int(v)): float(w) for u, v, w in zip(g.src, g.dst, g.weight)}
    want = np.array(oracles.longest_paths(g.n, edges))
    np.testing.assert_allclose(distance_matrix(g, range(g.n)), want, atol=1e-12)


def test_frozen_values():
    # from oracles.longest_paths on the 5x5 flat grid
    g1, g2 = build_causal_graph(MINK, 1), build_causal_graph(MINK, 2)
    p, q = MINK.node((0, 0)), MINK.node((4, 2))
    assert distance(g1, p, q).value == pytest.approx(2.0)
    assert distance(g2, p, q).value == pytest.approx(math.sqrt(12))
    assert distance(g2, MINK.node((0, 2)), MINK.node((4, 2))).value == pytest.approx(4.0)
    # spacelike separated and self pairs
    assert distance(g2, p, MINK.node((0, 4))).value == 0.0
    assert distance(g2, p, p).value == 0.0
    assert distance(g2, q, p).witness is None


def test_witness_is_smallest_optimal_path():
    g = build_causal_graph(MINK, 1)
    p, q = MINK.node((0, 1)), MINK.node((3, 2))
    res = distance(g, p, q)
    assert path_length(g, res.witness) == pytest.approx(res.value)
    adj = [list(map(int, g.successors(v))) for v in range(g.n)]
    paths = list(oracles.all_paths(adj, p, q))
    best = max(path_length(g, pth) for pth in paths)
    optimal = sorted(pth for pth in paths if abs(path_length(g, pth) - best) < 1e-9)
    assert res.value == pytest.approx(best)
    assert res.witness == optimal[0]


def test_path_length_rejects_non_paths():
    g = build_causal_graph(MINK, 1)
    with pytest.raises(PathError):
        path_length(g, [0, 2])
    with pytest.raises(PathError):
        path_length(g, [])
    assert path_length(g, [7]) == 0.0


def test_cycle_gives_infinite_distance():
    s = builtin_spacetime("periodic_time", period=5, nx=5)
    g = build_causal_graph(s, 1)
    assert distance(g, 0, 10).value == math.inf
    assert distance(g, 0, 0).value == math.inf
    # (0, 2) -> (0, 0) is spacelike but reachable once time wraps around
    assert reachability(g)[2, 0]
    assert distance_field(g, 2)[0] == math.inf


def test_zero_weight_cycle_is_finite():
    from steeptime.causal import Digraph

    g = Digraph(3, [0, 1, 1], [1, 0, 2], [0.0, 0.0, 1.5])
    assert distance(g, 0, 2).value == 1.5


def test_distance_to_field_is_transpose():
    g = build_causal_graph(MINK, 2)
    D = distance_matrix(g, range(g.n))
    for q in (0, 12, 24):
        np.testing.assert_allclose(distance_to_field(g, q), D[:, q])


def test_threaded_matrix_matches():
    g = build_causal_graph(MINK, 2)
    np.testing.assert_array_equal(distance_matrix(g, range(25), workers=4),
                                  distance_matrix(g, range(25)))


def test_export_format(tmp_path):
    path = tmp_path / "d.csv"
    export_distance_table(path, [(0, 5, 1.0), (1, 2, math.inf)])
    assert path.read_text() == "source,target,value,finite_flag\n0,5,1,1\n1,2,inf,0\n"


def test_stable_distance_decreases_to_d():
    g = build_causal_graph(MINK, 1)
    p, q = MINK.node((0, 2)), MINK.node((4, 2))
    sd = stable_distance(MINK, p, q)
    assert all(a >= b - 1e-12 for a, b in zip(sd.values, sd.values[1:]))
    assert sd.estimate >= distance(g, p, q).value - 1e-9
    assert sd.estimate == pytest.approx(4.0, rel=0.05)
    assert stable_distance(builtin_spacetime("periodic_time"), 0, 10).stably_infinite


G = build_causal_graph(builtin_spacetime("minkowski2d", dims=(8, 8)), 2)
DG = distance_matrix(G, range(G.n))
RG = reachability(G)


@settings(max_examples=100, deadline=None)
@given(p=st.integers(0, 63), q=st.integers(0, 63), r=st.integers(0, 63))
def test_reverse_triangle(p, q, r):
    if RG[p, q] and RG[q, r]:
        assert DG[p, r] >= DG[p, q] + DG[q, r] - 1e-9


@settings(max_examples=60, deadline=None)
@given(p=st.integers(0, 63), q=st.integers(0, 63), shift=st.integers(1, 3))
def test_time_translation_invariance(p, q, shift):
    (tp, xp), (tq, xq) = divmod(p, 8), divmod(q, 8)
    if max(tp, tq) + shift < 8:
        assert DG[(tp + shift) * 8 + xp, (tq + shift) * 8 + xq] == pytest.approx(DG[p, q])


@settings(max_examples=20, deadline=None)
@given(h=st.floats(0.1, 10.0))
def test_spacing_homogeneity(h):
    g = build_causal_graph(builtin_spacetime("minkowski2d", dims=(5, 5), spacing=h), 2)
    assert distance(g, 0, 22).value == pytest.approx(h * math.sqrt(12))
