"""The five mining apps against brute-force oracles and known answers."""

from fractions import Fraction

import pytest

from submine.apps import APP_NAMES, make_app
from submine.apps.gmatch import QueryGraph, fig4_query, parse_query_file
from submine.apps.oracles import (
    match_bf,
    max_clique_bf,
    maximal_cliques_bf,
    quasi_cliques_bf,
    tri_count_bf,
)
from submine.engine import RunConfig, run_job
from submine.gen import (
    complete_graph,
    fig4_data_graph,
    gnp_graph,
    labeled_gnp_graph,
    path_graph,
    star_graph,
)
from submine.graph import AdjItem, Graph, GraphParseError, Vertex


def _graph_from_edges(edges, extra_ids=(), labels=None):
    ids = set(extra_ids)
    for a, b in edges:
        ids.add(a)
        ids.add(b)
    adj = {v: [] for v in ids}
    for a, b in edges:
        la = labels.get(a) if labels else None
        lb = labels.get(b) if labels else None
        adj[a].append(AdjItem(b, lb))
        adj[b].append(AdjItem(a, la))
    g = Graph()
    for v in sorted(ids):
        g.add(Vertex(v, labels.get(v) if labels else None, sorted(adj[v])))
    return g


def _run(app, graph, workers=3, **kw):
    return run_job(RunConfig(workers=workers, **kw), app, graph=graph)


def _result_sets(res):
    return {frozenset(int(x) for x in line.split()) for line in res.result_lines()}


# -- triangle --------------------------------------------------------------------


@pytest.mark.parametrize("graph,want", [
    (complete_graph(3), 1),
    (complete_graph(4), 4),
    (complete_graph(5), 10),
    (path_graph(4), 0),
    (star_graph(6), 0),
])
def test_triangle_known_counts(graph, want):
    assert _run(make_app("triangle"), graph).aggregate == want


def test_triangle_emit_mode_lists_each_once():
    res = _run(make_app("triangle", emit_triangles=True), complete_graph(4))
    lines = sorted(res.result_lines())
    assert lines == ["1 2 3", "1 2 4", "1 3 4", "2 3 4"]
    for line in lines:
        a, b, c = map(int, line.split())
        assert a < b < c


def test_triangle_pruned_and_unpruned_agree():
    g = gnp_graph(60, 0.15, seed=21)
    a = _run(make_app("triangle"), g).aggregate
    b = _run(make_app("triangle", pruned=False), g).aggregate
    assert a == b == tri_count_bf(g)


@pytest.mark.parametrize("workers", [1, 3])
def test_triangle_oracle_loop(workers):
    for s in range(10):
        g = gnp_graph(40, 0.15, seed=800 + s)
        assert _run(make_app("triangle"), g, workers=workers).aggregate \
            == tri_count_bf(g)


# -- maximum clique ----------------------------------------------------------------


def test_maxclique_known_answers():
    assert _run(make_app("maxclique"), complete_graph(5)).aggregate \
        == (5, (1, 2, 3, 4, 5))
    # two K4s joined by a bridge edge: still size 4, first K4 wins the tie
    edges = [(i, j) for i in range(1, 5) for j in range(i + 1, 5)]
    edges += [(i, j) for i in range(10, 14) for j in range(i + 1, 14)]
    edges.append((4, 10))
    g = _graph_from_edges(edges)
    size, wit = _run(make_app("maxclique"), g).aggregate
    assert size == 4
    assert wit == (1, 2, 3, 4)
    # star: the best clique is a single edge
    assert _run(make_app("maxclique"), star_graph(5)).aggregate[0] == 2
    # no edges at all: a lone vertex is a clique of size 1
    g1 = _graph_from_edges([], extra_ids=(3, 7, 9))
    assert _run(make_app("maxclique"), g1).aggregate == (1, (3,))


def _check_witness(g, size, wit):
    assert len(wit) == size == len(set(wit))
    for i, a in enumerate(wit):
        nbs = set(g[a].neighbor_ids())
        for b in wit[i + 1:]:
            assert b in nbs


def test_maxclique_oracle_loop():
    for s in range(8):
        g = gnp_graph(30, 0.3, seed=900 + s)
        size, wit = _run(make_app("maxclique"), g).aggregate
        assert size == max_clique_bf(g)
        _check_witness(g, size, wit)


def test_maxclique_unpruned_agrees():
    g = gnp_graph(30, 0.3, seed=17)
    assert _run(make_app("maxclique"), g).aggregate \
        == _run(make_app("maxclique", pruned=False), g).aggregate


# -- maximal cliques ----------------------------------------------------------------


def test_maximal_known_answers():
    res = _run(make_app("maximalcliques"), complete_graph(4))
    assert res.aggregate == 1
    assert res.result_lines() == ["1 2 3 4"]
    # the K4 line is attributed to its smallest member
    assert res.emitted[0][1] == 1
    # triangle with a pendant: {0,1,2} and {2,3}
    g = _graph_from_edges([(0, 1), (0, 2), (1, 2), (2, 3)])
    res = _run(make_app("maximalcliques"), g)
    assert _result_sets(res) == {frozenset({0, 1, 2}), frozenset({2, 3})}
    assert res.aggregate == 2
    # isolated vertices are maximal singletons
    g1 = _graph_from_edges([(1, 2)], extra_ids=(9,))
    res = _run(make_app("maximalcliques"), g1)
    assert _result_sets(res) == {frozenset({1, 2}), frozenset({9})}


def test_maximal_oracle_loop():
    for s in range(8):
        g = gnp_graph(25, 0.3, seed=1000 + s)
        res = _run(make_app("maximalcliques"), g)
        assert _result_sets(res) == maximal_cliques_bf(g)
        assert res.aggregate == len(maximal_cliques_bf(g))


def test_maximal_lines_attributed_to_min_vertex():
    g = gnp_graph(30, 0.25, seed=31)
    res = _run(make_app("maximalcliques"), g, workers=4)
    for _wid, seed_id, line in res.emitted:
        members = [int(x) for x in line.split()]
        assert members == sorted(members)
        assert members[0] == seed_id


# -- quasi-cliques -------------------------------------------------------------------


def test_quasi_known_answers():
    res = _run(make_app("quasiclique", gamma="0.8", min_size=4),
               complete_graph(4))
    assert _result_sets(res) == {frozenset({1, 2, 3, 4})}
    # a star has no gamma>=0.5 set of size 3: leaves are non-adjacent
    res = _run(make_app("quasiclique", gamma="0.6", min_size=3), star_graph(5))
    assert res.aggregate == 0
    # K4 at gamma=1 min_size=2: every clique subset of size >= 2 qualifies
    res = _run(make_app("quasiclique", gamma="1", min_size=2),
               complete_graph(4))
    assert res.aggregate == 11  # 6 edges + 4 triangles + K4 itself


@pytest.mark.parametrize("gamma,min_size", [("0.6", 4), ("0.5", 4),
                                            (Fraction(3, 4), 3)])
def test_quasi_oracle_loop(gamma, min_size):
    for s in range(6):
        g = gnp_graph(16, 0.4, seed=1100 + s)
        res = _run(make_app("quasiclique", gamma=gamma, min_size=min_size), g)
        want = quasi_cliques_bf(g, Fraction(gamma), min_size)
        assert _result_sets(res) == want
        assert res.aggregate == len(want)


def test_quasi_gamma_forms():
    g = gnp_graph(14, 0.45, seed=55)
    outs = {
        str(_result_sets(_run(make_app("quasiclique", gamma=form, min_size=3), g)))
        for form in ("0.6", 0.6, Fraction(3, 5))
    }
    assert len(outs) == 1


def test_quasi_parameter_validation():
    with pytest.raises(ValueError, match="gamma"):
        make_app("quasiclique", gamma="0.3", min_size=3)
    with pytest.raises(ValueError, match="gamma"):
        make_app("quasiclique", gamma="1.2", min_size=3)
    with pytest.raises(ValueError, match="min_size"):
        make_app("quasiclique", gamma="0.6", min_size=0)
    with pytest.raises(ValueError, match="needs gamma"):
        make_app("quasiclique")


# -- graph matching ------------------------------------------------------------------


def test_fig4_replica_matches_exactly_once():
    res = _run(make_app("gmatch", query=fig4_query()), fig4_data_graph(),
               workers=2)
    lines = res.result_lines()
    assert lines == ["2 5 4 7 8"]  # the 25478 assignment
    assert "2 5 1 7 8" not in lines  # 25178 must not appear
    assert res.aggregate == 1


def test_gmatch_bowtie_oracle_loop():
    q = fig4_query()
    for s in range(8):
        g = labeled_gnp_graph(30, 0.18, seed=1200 + s, alphabet="abcd")
        res = _run(make_app("gmatch", query=q), g)
        got = {tuple(int(x) for x in line.split()) for line in res.result_lines()}
        assert got == match_bf(g, q)
        assert res.aggregate == len(got)


def test_gmatch_generic_pipeline_oracle_loop():
    # queries that are not the bowtie shape take the generic ego pipeline
    queries = [
        QueryGraph({1: "a", 2: "b"}, [(1, 2)]),
        QueryGraph({1: "a", 2: "b", 3: "c"}, [(1, 2), (2, 3), (1, 3)]),
        QueryGraph({1: "b", 2: "a", 3: "b", 4: "c"},
                   [(1, 2), (2, 3), (3, 4)], start=2),
    ]
    for qi, q in enumerate(queries):
        for s in range(4):
            g = labeled_gnp_graph(25, 0.2, seed=1300 + 10 * qi + s,
                                  alphabet="abc")
            res = _run(make_app("gmatch", query=q), g)
            got = {tuple(int(x) for x in line.split())
                   for line in res.result_lines()}
            assert got == match_bf(g, q), (qi, s)


def test_gmatch_unlabeled_graph_matches_nothing():
    q = QueryGraph({1: "a", 2: "b"}, [(1, 2)])
    g = gnp_graph(10, 0.5, seed=1)  # unlabeled: None never equals a label
    res = _run(make_app("gmatch", query=q), g)
    assert res.aggregate == 0
    assert res.result_lines() == []


def test_query_graph_validation():
    with pytest.raises(ValueError, match="no vertices"):
        QueryGraph({}, [])
    with pytest.raises(ValueError, match="no label"):
        QueryGraph({1: None}, [])
    with pytest.raises(ValueError, match="unknown vertex"):
        QueryGraph({1: "a"}, [(1, 2)])
    with pytest.raises(ValueError, match="self-loop"):
        QueryGraph({1: "a"}, [(1, 1)])
    with pytest.raises(ValueError, match="connected"):
        QueryGraph({1: "a", 2: "b"}, [])
    with pytest.raises(ValueError, match="start"):
        QueryGraph({1: "a", 2: "b"}, [(1, 2)], start=5)


def test_query_helpers():
    q = fig4_query()
    assert q.start == 1
    assert q.label_set() == {"a", "b", "c", "d"}
    assert q.eccentricity_from_start() == 3
    order = q.bfs_order()
    assert order[0] == 1
    assert set(order) == {1, 2, 3, 4, 5}


def test_parse_query_file(tmp_path):
    p = tmp_path / "q.txt"
    p.write_text("# start: 2\n1\tb\t2\n2\ta\t1 3\n3\tc\t2\n")
    q = parse_query_file(p)
    assert q.start == 2
    assert q.labels == {1: "b", 2: "a", 3: "c"}
    assert q.adj[2] == {1, 3}
    bad = tmp_path / "bad.txt"
    bad.write_text("1\ta\t\n2\tb\t\n")  # disconnected
    with pytest.raises(GraphParseError, match="connected"):
        parse_query_file(bad)


# -- app registry ----------------------------------------------------------------------


def test_make_app_validation():
    assert set(APP_NAMES) == {"triangle", "maxclique", "maximalcliques",
                              "quasiclique", "gmatch"}
    with pytest.raises(ValueError, match="unknown app"):
        make_app("nope")
    with pytest.raises(ValueError, match="query"):
        make_app("gmatch")


# -- oracles are themselves sane ---------------------------------------------------------


def test_oracle_spot_checks():
    assert tri_count_bf(complete_graph(4)) == 4
    assert max_clique_bf(complete_graph(5)) == 5
    assert maximal_cliques_bf(complete_graph(3)) == {frozenset({1, 2, 3})}
    assert quasi_cliques_bf(complete_graph(3), Fraction(1), 3) \
        == {frozenset({1, 2, 3})}
    assert match_bf(fig4_data_graph(), fig4_query()) == {(2, 5, 4, 7, 8)}


def test_oracles_refuse_oversized_inputs():
    with pytest.raises(ValueError, match="limit"):
        quasi_cliques_bf(gnp_graph(30, 0.1, seed=1), Fraction(1, 2), 3)
    with pytest.raises(ValueError, match="limit"):
        max_clique_bf(gnp_graph(501, 0.001, seed=1))
