import math
import random

import pytest

from feedsel import (
    BipartiteGraph,
    Condensation,
    DimensionError,
    FeedbackPattern,
    StructuredSystem,
    closed_loop_bipartite,
    closed_loop_digraph,
    condense,
    has_line_spanning_path,
    is_line_dag,
    max_matching,
    min_cost_perfect_matching,
    reduce_set_cover,
    state_bipartite,
    state_digraph,
)
from feedsel.graphs import (
    closed_loop_successors,
    hopcroft_karp,
    strongly_connected_components,
)
from tests.conftest import (
    brute_force_min_cost_perfect_matching,
    fig1_cover_instance,
    maxflow_matching_size,
    scc_partition_by_closure,
)


def fig1_system():
    system, costs = reduce_set_cover(fig1_cover_instance())
    return system, costs


# ---------------------------------------------------------------------------
# digraph construction


def test_state_digraph_single_entry():
    system = StructuredSystem(n=2, m=0, p=0, a_edges=frozenset({(1, 2)}))
    graph = state_digraph(system)
    assert graph.state_edges == frozenset({(2, 1)})  # x2 -> x1


def test_state_digraph_empty():
    system = StructuredSystem(n=3, m=0, p=0)
    assert state_digraph(system).all_edges() == frozenset()


def test_state_digraph_fig1_topology():
    system, _ = fig1_system()
    graph = state_digraph(system)
    self_loops = {(v, v) for v in range(1, 7)}
    hub_edges = {(6, i) for i in range(1, 6)}
    assert graph.state_edges == frozenset(self_loops | hub_edges)


def test_closed_loop_digraph_adds_feedback_edge():
    system, _ = fig1_system()
    graph = closed_loop_digraph(system, FeedbackPattern.of((1, 1)))
    # y1 is vertex 6+1+1 = 8, u1 is vertex 7
    assert graph.feedback_edges == frozenset({(8, 7)})
    assert graph.label(8) == "y1" and graph.label(7) == "u1"


def test_closed_loop_digraph_empty_pattern_has_no_feedback():
    system, _ = fig1_system()
    graph = closed_loop_digraph(system, FeedbackPattern())
    assert graph.feedback_edges == frozenset()
    assert len(graph.input_edges) == 1 and len(graph.output_edges) == 7


def test_closed_loop_digraph_rejects_out_of_range_link():
    system, _ = fig1_system()
    with pytest.raises(DimensionError):
        closed_loop_digraph(system, FeedbackPattern.of((2, 1)))


def _reaches(succ, start, goal):
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        if v == goal:
            return True
        for w in succ[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def test_closed_loop_digraph_reference_cycle(section5):
    system, _ = section5
    graph = closed_loop_digraph(system, FeedbackPattern.of((2, 3)))
    succ = [list(row) for row in graph.successor_lists]
    u2 = system.n + 2
    y3 = system.n + system.m + 3
    assert _reaches(succ, u2, y3) and _reaches(succ, y3, u2)


def test_successor_lists_agree_with_fast_builder(section5):
    system, _ = section5
    pattern = FeedbackPattern.of((2, 3), (1, 1))
    graph = closed_loop_digraph(system, pattern)
    fast = closed_loop_successors(system, pattern.links)
    slow = graph.successor_lists
    assert [sorted(row) for row in fast] == [sorted(row) for row in slow]


# ---------------------------------------------------------------------------
# condensation


def test_condense_reference_system(section5):
    system, _ = section5
    cond = condense(system)
    assert [sorted(s) for s in cond.sccs] == [
        [1, 2, 3], [4, 5], [6], [7, 8, 9, 10, 11],
    ]
    assert cond.sccs[3] >= frozenset({7, 8, 9, 10})
    assert sorted(cond.dag_edges) == [(1, 2), (2, 3), (3, 4)]
    assert [sorted(s) for s in cond.input_incidence] == [[1, 2], [2], [3], [3, 4]]
    assert [sorted(s) for s in cond.output_incidence] == [[1], [], [2], [3]]
    assert cond.scc_index[1] == 1 and cond.scc_index[6] == 3 and cond.scc_index[11] == 4
    assert cond.non_top_linked_sccs() == [1] and cond.non_bottom_linked_sccs() == [4]


def test_condense_single_self_loop_vertex():
    system = StructuredSystem(n=1, m=0, p=0, a_edges=frozenset({(1, 1)}))
    cond = condense(system)
    assert cond.scc_count == 1
    assert cond.non_top_linked(1) and cond.non_bottom_linked(1)


def test_condense_fig1_has_unique_source():
    system, _ = fig1_system()
    cond = condense(system)
    assert cond.scc_count == 6
    sources = cond.non_top_linked_sccs()
    assert len(sources) == 1
    assert cond.sccs[sources[0] - 1] == frozenset({6})
    assert len(cond.non_bottom_linked_sccs()) == 5


def test_condense_dag_edges_respect_topological_order():
    rng = random.Random(7)
    for _ in range(30):
        n = rng.randint(1, 8)
        edges = {
            (i, j)
            for i in range(1, n + 1)
            for j in range(1, n + 1)
            if rng.random() < 0.3
        }
        cond = condense(StructuredSystem(n=n, m=0, p=0, a_edges=frozenset(edges)))
        assert all(a < b for a, b in cond.dag_edges)
        assert sorted(s for scc in cond.sccs for s in scc) == list(range(1, n + 1))


def test_condense_matches_transitive_closure_oracle():
    rng = random.Random(11)
    for _ in range(60):
        n = rng.randint(1, 8)
        edges = {
            (i, j)
            for i in range(1, n + 1)
            for j in range(1, n + 1)
            if rng.random() < 0.35
        }
        system = StructuredSystem(n=n, m=0, p=0, a_edges=frozenset(edges))
        cond = condense(system)
        succ = [[] for _ in range(n + 1)]
        for i, j in edges:
            succ[j].append(i)
        assert set(cond.sccs) == scc_partition_by_closure(succ, n)


def test_condense_isomorphic_under_relabeling():
    rng = random.Random(23)
    for _ in range(25):
        n = rng.randint(2, 8)
        edges = {
            (i, j)
            for i in range(1, n + 1)
            for j in range(1, n + 1)
            if rng.random() < 0.3
        }
        perm = list(range(1, n + 1))
        rng.shuffle(perm)
        relabel = {v: perm[v - 1] for v in range(1, n + 1)}
        original = condense(StructuredSystem(n=n, m=0, p=0, a_edges=frozenset(edges)))
        mapped = condense(
            StructuredSystem(
                n=n, m=0, p=0,
                a_edges=frozenset((relabel[i], relabel[j]) for i, j in edges),
            )
        )
        translated = {frozenset(relabel[s] for s in scc) for scc in original.sccs}
        assert translated == set(mapped.sccs)
        index_map = {
            k: mapped.sccs.index(frozenset(relabel[s] for s in original.sccs[k - 1])) + 1
            for k in range(1, original.scc_count + 1)
        }
        assert {(index_map[a], index_map[b]) for a, b in original.dag_edges} == set(
            mapped.dag_edges
        )


def _chain_condensation(ell, extra=()):
    return Condensation(
        sccs=tuple(frozenset({k}) for k in range(1, ell + 1)),
        dag_edges=frozenset({(k, k + 1) for k in range(1, ell)} | set(extra)),
        input_incidence=tuple(frozenset() for _ in range(ell)),
        output_incidence=tuple(frozenset() for _ in range(ell)),
    )


def test_is_line_dag_reference(section5):
    system, _ = section5
    assert is_line_dag(condense(system))


def test_is_line_dag_rejects_disconnected_pair():
    system = StructuredSystem(n=2, m=0, p=0, a_edges=frozenset({(1, 1), (2, 2)}))
    assert not is_line_dag(condense(system))


def test_spanning_path_with_forward_shortcuts():
    shortcuts = {(1, 6), (2, 4), (3, 5), (2, 5), (4, 6), (1, 4)}
    cond = _chain_condensation(6, extra=shortcuts)
    assert not is_line_dag(cond)
    assert has_line_spanning_path(cond) == (1, 2, 3, 4, 5, 6)


def test_spanning_path_absent_with_two_sources():
    system = StructuredSystem(
        n=3, m=0, p=0, a_edges=frozenset({(1, 1), (2, 2), (3, 3), (3, 1), (3, 2)})
    )
    cond = condense(system)
    assert has_line_spanning_path(cond) is None


def test_strict_line_has_identity_spanning_path():
    cond = _chain_condensation(4)
    assert is_line_dag(cond)
    assert has_line_spanning_path(cond) == (1, 2, 3, 4)


# ---------------------------------------------------------------------------
# bipartite graphs and matchings


def test_state_bipartite_fig1_has_perfect_matching():
    system, _ = fig1_system()
    graph = state_bipartite(system)
    assert len(max_matching(graph)) == system.n


def test_state_bipartite_lower_triangular_has_no_perfect_matching():
    # Strictly lower-triangular pattern: row 1 is empty, so x'_1 is isolated.
    system = StructuredSystem(
        n=4, m=0, p=0,
        a_edges=frozenset((i, j) for i in range(2, 5) for j in range(1, i)),
    )
    graph = state_bipartite(system)
    assert len(max_matching(graph)) < system.n


def test_state_bipartite_diagonal_matches_everything():
    system = StructuredSystem(n=5, m=0, p=0, a_edges=frozenset((i, i) for i in range(1, 6)))
    assert len(max_matching(state_bipartite(system))) == 5


def test_closed_loop_bipartite_pads_with_identity_edges():
    system = StructuredSystem(
        n=2, m=1, p=1,
        a_edges=frozenset({(1, 1), (2, 2)}),
        b_edges=frozenset({(1, 1)}),
        c_edges=frozenset({(1, 2)}),
    )
    graph = closed_loop_bipartite(system, FeedbackPattern())
    assert len(max_matching(graph)) == 4


def test_closed_loop_bipartite_reference_full_pattern(section5):
    system, _ = section5
    full = FeedbackPattern(frozenset((i, j) for i in range(1, 5) for j in range(1, 4)))
    graph = closed_loop_bipartite(system, full)
    assert len(max_matching(graph)) == system.n + system.m + system.p


def test_closed_loop_bipartite_degenerates_to_state_bipartite():
    system = StructuredSystem(n=3, m=0, p=0, a_edges=frozenset({(1, 2), (2, 3)}))
    closed = closed_loop_bipartite(system, FeedbackPattern())
    assert closed.edges == state_bipartite(system).edges


def test_max_matching_complete_3x3():
    graph = BipartiteGraph(
        left=("a", "b", "c"),
        right=("d", "e", "f"),
        edges=frozenset((l, r) for l in range(3) for r in range(3)),
    )
    assert len(max_matching(graph)) == 3


def test_max_matching_star():
    graph = BipartiteGraph(
        left=("hub",), right=("a", "b", "c"), edges=frozenset((0, r) for r in range(3))
    )
    assert len(max_matching(graph)) == 1


def test_max_matching_agrees_with_flow_oracle():
    rng = random.Random(41)
    for _ in range(60):
        n_left = rng.randint(1, 12)
        n_right = rng.randint(1, 12)
        adjacency = [
            sorted({rng.randrange(n_right) for _ in range(rng.randint(0, 4))})
            for _ in range(n_left)
        ]
        size, _, _ = hopcroft_karp(adjacency, n_right)
        assert size == maxflow_matching_size(adjacency, n_left, n_right)


def test_tarjan_agrees_with_closure_on_mixed_graphs():
    rng = random.Random(13)
    for _ in range(40):
        n = rng.randint(1, 8)
        succ = [[] for _ in range(n + 1)]
        for v in range(1, n + 1):
            for w in range(1, n + 1):
                if rng.random() < 0.3:
                    succ[v].append(w)
        parts = {frozenset(c) for c in strongly_connected_components(succ, n)}
        assert parts == scc_partition_by_closure(succ, n)


def _cost_graph(rows):
    n = len(rows)
    edges = set()
    costs = {}
    for i in range(n):
        for j in range(n):
            if rows[i][j] != math.inf:
                edges.add((i, j))
                costs[(i, j)] = rows[i][j]
    return BipartiteGraph(
        left=tuple(f"l{i}" for i in range(n)),
        right=tuple(f"r{j}" for j in range(n)),
        edges=frozenset(edges),
        edge_costs=costs,
    )


def test_min_cost_perfect_matching_prefers_diagonal():
    result = min_cost_perfect_matching(_cost_graph([[0, 1], [1, 0]]))
    assert result is not None
    matching, total = result
    assert total == 0 and matching == {0: 0, 1: 1}


def test_min_cost_perfect_matching_infeasible_when_vertex_isolated():
    graph = BipartiteGraph(
        left=("a", "b"), right=("c", "d"), edges=frozenset({(0, 0), (1, 0)}), edge_costs={}
    )
    assert min_cost_perfect_matching(graph) is None


def test_min_cost_perfect_matching_rejects_unbalanced_sides():
    graph = BipartiteGraph(left=("a",), right=("b", "c"), edges=frozenset({(0, 0)}))
    with pytest.raises(DimensionError):
        min_cost_perfect_matching(graph)


def test_min_cost_perfect_matching_agrees_with_permutation_oracle():
    rng = random.Random(57)
    for _ in range(40):
        n = 6
        rows = [
            [math.inf if rng.random() < 0.25 else rng.randint(0, 50) for _ in range(n)]
            for _ in range(n)
        ]
        expected = brute_force_min_cost_perfect_matching(rows)
        result = min_cost_perfect_matching(_cost_graph(rows))
        if expected is None:
            assert result is None
        else:
            assert result is not None
            assert result[1] == expected[0]


def test_min_cost_perfect_matching_shift_invariance():
    rng = random.Random(91)
    for _ in range(20):
        n = 5
        rows = [[rng.randint(0, 40) for _ in range(n)] for _ in range(n)]
        base = min_cost_perfect_matching(_cost_graph(rows))
        assert base is not None
        delta = rng.randint(1, 9)
        shifted_rows = [[c + delta for c in row] for row in rows]
        shifted = min_cost_perfect_matching(_cost_graph(shifted_rows))
        assert shifted is not None
        assert shifted[0] == base[0]  # same optimal edge set
        assert shifted[1] == base[1] + n * delta
