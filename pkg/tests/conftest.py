"""Shared fixtures and independent brute-force oracles.

The oracles here deliberately avoid the library's algorithms: matching size
is recomputed by augmenting max-flow, SCCs by transitive closure, cycle
spanning by exhaustive subset-and-permutation search, and set cover by full
enumeration. They are the ground truth the fast implementations are
compared against.
"""

from __future__ import annotations

import collections
from itertools import combinations, permutations

import pytest

from feedsel import CostMatrix, FeedbackPattern, SetCoverInstance, StructuredSystem
from feedsel.graphs import closed_loop_successors


# ---------------------------------------------------------------------------
# reference instances


def section5_system() -> tuple[StructuredSystem, CostMatrix]:
    """Eleven-state chain: 3-loop, 2-loop, self-loop, 5-state hub cluster."""
    a = {
        (2, 1), (1, 2), (3, 2), (2, 3), (3, 3), (4, 3),
        (5, 4), (4, 5), (6, 5), (6, 6), (7, 6),
        (8, 7), (7, 8), (9, 8), (8, 9), (9, 9),
        (10, 8), (8, 10), (10, 10), (11, 8), (8, 11), (11, 11),
    }
    b = {(1, 1), (3, 2), (4, 2), (6, 3), (7, 3), (10, 4)}
    c = {(1, 2), (2, 6), (3, 9)}
    system = StructuredSystem(
        n=11, m=4, p=3,
        a_edges=frozenset(a), b_edges=frozenset(b), c_edges=frozenset(c),
    )
    costs = CostMatrix.from_rows([[2, 10, 100], [7, 8, 5], [9, 5, 50], [10, 11, 13]])
    return system, costs


def fig1_cover_instance() -> SetCoverInstance:
    return SetCoverInstance(
        universe_size=5,
        sets=(frozenset({1, 2}), frozenset({2, 3}), frozenset({3, 4, 5})),
        weights=(2, 3, 4),
    )


@pytest.fixture
def section5():
    return section5_system()


@pytest.fixture
def fig1_cover():
    return fig1_cover_instance()


# ---------------------------------------------------------------------------
# brute-force oracles


def maxflow_matching_size(adjacency, n_left: int, n_right: int) -> int:
    """Maximum bipartite matching by Edmonds-Karp on the unit network."""
    source = 0
    sink = n_left + n_right + 1
    cap: dict[tuple[int, int], int] = collections.defaultdict(int)
    neighbors: dict[int, list[int]] = collections.defaultdict(list)

    def add(u: int, v: int) -> None:
        if v not in neighbors[u]:
            neighbors[u].append(v)
            neighbors[v].append(u)
        cap[(u, v)] += 1

    for u in range(n_left):
        add(source, 1 + u)
    for v in range(n_right):
        add(1 + n_left + v, sink)
    for u, row in enumerate(adjacency):
        for v in row:
            add(1 + u, 1 + n_left + v)

    flow = 0
    while True:
        parent: dict[int, int | None] = {source: None}
        queue = collections.deque([source])
        while queue and sink not in parent:
            u = queue.popleft()
            for v in neighbors[u]:
                if v not in parent and cap[(u, v)] > 0:
                    parent[v] = u
                    queue.append(v)
        if sink not in parent:
            return flow
        v = sink
        while parent[v] is not None:
            u = parent[v]
            cap[(u, v)] -= 1
            cap[(v, u)] += 1
            v = u
        flow += 1


def scc_partition_by_closure(succ, n: int) -> set[frozenset[int]]:
    """SCCs via transitive closure (Floyd-Warshall), O(n^3)."""
    reach = [[False] * (n + 1) for _ in range(n + 1)]
    for v in range(1, n + 1):
        reach[v][v] = True
        for w in succ[v]:
            reach[v][w] = True
    for k in range(1, n + 1):
        row_k = reach[k]
        for i in range(1, n + 1):
            if reach[i][k]:
                row_i = reach[i]
                for j in range(1, n + 1):
                    if row_k[j]:
                        row_i[j] = True
    seen: set[int] = set()
    parts: set[frozenset[int]] = set()
    for v in range(1, n + 1):
        if v in seen:
            continue
        comp = frozenset(
            w for w in range(1, n + 1) if reach[v][w] and reach[w][v]
        )
        seen |= comp
        parts.add(comp)
    return parts


def _has_spanning_permutation(vertices: list[int], succ) -> bool:
    chosen = set(vertices)
    candidates = {v: [w for w in succ[v] if w in chosen] for v in vertices}
    order = sorted(vertices, key=lambda v: len(candidates[v]))
    used: set[int] = set()

    def backtrack(idx: int) -> bool:
        if idx == len(order):
            return True
        v = order[idx]
        for w in candidates[v]:
            if w not in used:
                used.add(w)
                if backtrack(idx + 1):
                    return True
                used.remove(w)
        return False

    return backtrack(0)


def spanning_cycle_family_exists(system: StructuredSystem, pattern: FeedbackPattern) -> bool:
    """Exhaustive search for vertex-disjoint cycles covering every state.

    Tries every subset of input/output vertices as cycle participants and
    asks for a successor permutation on states plus that subset.
    """
    n = system.n
    total = n + system.m + system.p
    succ = closed_loop_successors(system, pattern.links)
    auxiliary = list(range(n + 1, total + 1))
    states = list(range(1, n + 1))
    for r in range(len(auxiliary) + 1):
        for extra in combinations(auxiliary, r):
            if _has_spanning_permutation(states + list(extra), succ):
                return True
    return False


def brute_force_set_cover(instance: SetCoverInstance) -> tuple[float, frozenset[int]]:
    """Optimal weighted cover by enumerating all subsets of sets."""
    best_weight = None
    best_sets: frozenset[int] = frozenset()
    indices = range(1, instance.set_count + 1)
    for r in range(instance.set_count + 1):
        for subset in combinations(indices, r):
            if instance.is_cover(subset):
                weight = instance.cover_weight(subset)
                if best_weight is None or weight < best_weight:
                    best_weight = weight
                    best_sets = frozenset(subset)
    assert best_weight is not None
    return best_weight, best_sets


def naive_pattern_optimum(system, costs, predicate) -> tuple[float, FeedbackPattern] | None:
    """Minimum-cost pattern among all subsets of admissible links.

    Plain itertools enumeration over the public checkers; ties go to the
    lexicographically smallest pattern, mirroring the solver contract.
    """
    links = costs.finite_links()
    best: tuple[float, tuple] | None = None
    for r in range(len(links) + 1):
        for chosen in combinations(links, r):
            pattern = FeedbackPattern(frozenset(chosen))
            if not predicate(system, pattern):
                continue
            from feedsel import cost_of

            key = (cost_of(pattern, costs), tuple(sorted(chosen)))
            if best is None or key < best:
                best = key
    if best is None:
        return None
    return best[0], FeedbackPattern(frozenset(best[1]))


def brute_force_min_cost_perfect_matching(cost_rows) -> tuple[float, tuple[int, ...]] | None:
    """Optimal assignment by enumerating all permutations (tiny sizes only)."""
    n = len(cost_rows)
    best = None
    best_perm: tuple[int, ...] = ()
    for perm in permutations(range(n)):
        total = 0.0
        ok = True
        for i, j in enumerate(perm):
            c = cost_rows[i][j]
            if c == float("inf"):
                ok = False
                break
            total += c
        if ok and (best is None or total < best):
            best = total
            best_perm = perm
    if best is None:
        return None
    return best, best_perm
