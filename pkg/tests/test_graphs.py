"""Metric graphs, hyperbolicity estimates, and the bottleneck test.

networkx plays the independent oracle for distances; four-point and
bottleneck values on the small named graphs were enumerated by hand.
"""

import itertools
import random

import networkx as nx
import pytest

from quasitrees.graphs import (
    MetricGraph,
    bfs_rows,
    bottleneck_check,
    estimate_hyperbolicity,
    graph_to_text,
    nearest_point_projection,
    set_diameter,
)
from quasitrees.groups import cayley_ball


def path_graph():
    return MetricGraph({"a": ["b"], "b": ["a", "c"], "c": ["b"]})


def cycle_graph(n):
    return MetricGraph({i: [(i - 1) % n, (i + 1) % n] for i in range(n)})


def random_graph(seed, n=14, p=0.25):
    rng = random.Random(seed)
    adj = {i: set() for i in range(n)}
    for i in range(n - 1):
        adj[i].add(i + 1)
        adj[i + 1].add(i)
    for i in range(n):
        for j in range(i + 2, n):
            if rng.random() < p:
                adj[i].add(j)
                adj[j].add(i)
    return MetricGraph({v: sorted(ws) for v, ws in adj.items()})


def test_unknown_vertex_rejected():
    g = path_graph()
    with pytest.raises(ValueError, match="vertex not in graph"):
        g.distance("a", "z")
    with pytest.raises(ValueError, match="vertex not in graph"):
        MetricGraph({"a": ["q"]})


def test_unreachable_raises():
    g = MetricGraph({"a": ["b"], "b": ["a"], "c": []})
    with pytest.raises(ValueError, match="unreachable"):
        g.distance("a", "c")
    assert g.distances_from("a")[g.index["c"]] == -1


def test_path_graph_distance_and_geodesic():
    g = path_graph()
    assert g.distance("a", "c") == 2
    assert g.geodesic("a", "c") == ["a", "b", "c"]
    assert g.geodesic("a", "a") == ["a"]


def test_four_cycle_geodesic_tie_break():
    g = MetricGraph({"a": ["b", "d"], "b": ["a", "c"], "c": ["b", "d"], "d": ["c", "a"]})
    # both a-b-c and a-d-c are geodesics; the smaller-index middle wins
    assert g.geodesic("a", "c") == ["a", "b", "c"]


@pytest.mark.parametrize("seed", range(5))
def test_distances_match_networkx(seed):
    g = random_graph(seed)
    G = nx.Graph()
    G.add_nodes_from(g.vertices)
    G.add_edges_from((g.vertices[i], g.vertices[j]) for i, j in g.edges())
    want = dict(nx.all_pairs_shortest_path_length(G))
    for u in g.vertices:
        for v in g.vertices:
            assert g.distance(u, v) == want[u][v]


def test_bfs_rows_matches_distances_from():
    g = random_graph(3)
    rows = bfs_rows(g, [0, 5, 9])
    for r, src in zip(rows, [0, 5, 9]):
        assert list(r) == g.distances_from(g.vertices[src])


def test_diameter_and_eccentricity():
    g = cycle_graph(8)
    assert g.diameter() == 4
    assert g.eccentricity(0) == 4


def test_nearest_point_projection_examples():
    g = path_graph()
    assert nearest_point_projection(g, ["a", "b", "c"], "b") == ("b",)
    assert nearest_point_projection(g, ["a", "c"], "b") == ("a", "c")
    with pytest.raises(ValueError, match="empty projection input"):
        nearest_point_projection(g, [], "a")


@pytest.mark.parametrize("seed", range(3))
def test_nearest_point_projection_brute_force(seed):
    g = random_graph(seed, n=12)
    target = list(g.vertices[:5])
    for s in g.vertices:
        got = nearest_point_projection(g, target, s)
        dists = {t: g.distance(s, t) for t in target}
        best = min(dists.values())
        assert set(got) == {t for t, d in dists.items() if d == best}


def test_set_diameter():
    g = cycle_graph(6)
    assert set_diameter(g, [0, 3]) == 3
    assert set_diameter(g, [0]) == 0


def test_four_point_zero_on_trees(f2):
    ball = cayley_ball(f2, 3)
    # 53 vertices, above the exhaustive limit: force full enumeration
    quads = itertools.combinations(ball.vertices, 4)
    assert estimate_hyperbolicity(ball.graph, sample=quads) == 0.0


def test_four_point_on_four_cycle():
    assert estimate_hyperbolicity(cycle_graph(4)) == 1.0


def test_four_point_identity_quadruple():
    g = cycle_graph(5)
    assert estimate_hyperbolicity(g, sample=[(0, 0, 1, 2)]) == 0.0


def test_four_point_seeded_sampling_is_deterministic():
    g = cycle_graph(30)  # not a tree, forces sampling branch at default limit
    a = estimate_hyperbolicity(g, seed=5, samples=300)
    b = estimate_hyperbolicity(g, seed=5, samples=300)
    assert a == b


def test_genus2_ball_radius3_is_still_a_tree(genus2):
    # relator length 8: the first cycles close at radius 4
    b3 = cayley_ball(genus2, 3)
    assert estimate_hyperbolicity(b3.graph, seed=0, samples=800) == 0.0


def test_genus2_four_point_positive_at_radius4(genus2):
    b4 = cayley_ball(genus2, 4)
    d = estimate_hyperbolicity(b4.graph, seed=0, samples=800)
    assert d >= 0.5


def test_bottleneck_zero_on_tree(f2):
    ball = cayley_ball(f2, 4)
    passed, delta = bottleneck_check(ball.graph, seed=1, samples=60)
    assert passed
    assert delta == 0


def test_bottleneck_on_eight_cycle():
    g = cycle_graph(8)
    passed, delta = bottleneck_check(g, pairs=[(0, 4)])
    assert passed
    assert delta == 2


def test_bottleneck_unreachable_pair():
    g = MetricGraph({"a": ["b"], "b": ["a"], "c": []})
    with pytest.raises(ValueError, match="unreachable"):
        bottleneck_check(g, pairs=[("a", "c")])


def test_graph_to_text_round_shape():
    text = graph_to_text(path_graph())
    lines = text.strip().splitlines()
    assert lines[0].startswith("a:")
    assert len(lines) == 3
