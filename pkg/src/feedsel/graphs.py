"""Graph machinery: system digraphs, SCC condensation, bipartite matchings.

Vertex numbering convention for system digraphs: states are vertices 1..n,
inputs n+1..n+m, outputs n+m+1..n+m+p. Bipartite graphs use 0-based
positional indices into their left/right vertex lists.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

from .model import CostMatrix, DimensionError, Edge, FeedbackPattern, INF, StructuredSystem

VertexEdge = tuple[int, int]


# ---------------------------------------------------------------------------
# digraphs


@dataclass(frozen=True, eq=False)
class Digraph:
    """System digraph with edges grouped by origin.

    state_edges run x -> x, input_edges u -> x, output_edges x -> y and
    feedback_edges y -> u; every edge is a (tail, head) pair of vertex ids.
    """

    n: int
    m: int
    p: int
    state_edges: frozenset[VertexEdge] = frozenset()
    input_edges: frozenset[VertexEdge] = frozenset()
    output_edges: frozenset[VertexEdge] = frozenset()
    feedback_edges: frozenset[VertexEdge] = frozenset()

    def __post_init__(self) -> None:
        n, m, p = self.n, self.m, self.p
        groups = (
            ("state_edges", (1, n), (1, n)),
            ("input_edges", (n + 1, n + m), (1, n)),
            ("output_edges", (1, n), (n + m + 1, n + m + p)),
            ("feedback_edges", (n + m + 1, n + m + p), (n + 1, n + m)),
        )
        for name, (tlo, thi), (hlo, hhi) in groups:
            edges = frozenset(getattr(self, name))
            object.__setattr__(self, name, edges)
            for tail, head in edges:
                if not (tlo <= tail <= thi and hlo <= head <= hhi):
                    raise DimensionError(f"{name}: edge ({tail}, {head}) violates vertex ranges")

    @property
    def vertex_count(self) -> int:
        return self.n + self.m + self.p

    def all_edges(self) -> frozenset[VertexEdge]:
        return self.state_edges | self.input_edges | self.output_edges | self.feedback_edges

    def label(self, v: int) -> str:
        if 1 <= v <= self.n:
            return f"x{v}"
        if self.n < v <= self.n + self.m:
            return f"u{v - self.n}"
        if self.n + self.m < v <= self.vertex_count:
            return f"y{v - self.n - self.m}"
        raise DimensionError(f"vertex {v} out of range 1..{self.vertex_count}")

    @cached_property
    def successor_lists(self) -> tuple[tuple[int, ...], ...]:
        """Adjacency as a tuple indexed by vertex id (entry 0 unused)."""
        succ: list[list[int]] = [[] for _ in range(self.vertex_count + 1)]
        for tail, head in sorted(self.all_edges()):
            succ[tail].append(head)
        return tuple(tuple(s) for s in succ)


def state_digraph(system: StructuredSystem) -> Digraph:
    """Digraph over the states only: a_edge (i, j) becomes x_j -> x_i."""
    return Digraph(
        n=system.n,
        m=0,
        p=0,
        state_edges=frozenset((j, i) for i, j in system.a_edges),
    )


def closed_loop_digraph(system: StructuredSystem, pattern: FeedbackPattern) -> Digraph:
    """Full system digraph including the feedback edges y_j -> u_i of ``pattern``."""
    n, m, p = system.n, system.m, system.p
    for i, j in pattern.links:
        if not (1 <= i <= m and 1 <= j <= p):
            raise DimensionError(f"feedback link ({i}, {j}) out of range for m={m}, p={p}")
    return Digraph(
        n=n,
        m=m,
        p=p,
        state_edges=frozenset((j, i) for i, j in system.a_edges),
        input_edges=frozenset((n + j, i) for i, j in system.b_edges),
        output_edges=frozenset((j, n + m + i) for i, j in system.c_edges),
        feedback_edges=frozenset((n + m + j, n + i) for i, j in pattern.links),
    )


def closed_loop_successors(
    system: StructuredSystem, links: Iterable[Edge]
) -> list[list[int]]:
    """Successor lists of the closed-loop digraph, without the Digraph wrapper.

    This is the hot path shared by the feasibility checks and the exhaustive
    oracle; entry 0 is unused.
    """
    n, m = system.n, system.m
    succ: list[list[int]] = [[] for _ in range(n + m + system.p + 1)]
    for i, j in system.a_edges:
        succ[j].append(i)
    for i, j in system.b_edges:
        succ[n + j].append(i)
    for i, j in system.c_edges:
        succ[j].append(n + m + i)
    for i, j in links:
        succ[n + m + j].append(n + i)
    return succ


def strongly_connected_components(
    succ: Sequence[Sequence[int]], n_vertices: int
) -> list[list[int]]:
    """Tarjan's algorithm, iterative so deep chains don't hit the recursion limit.

    ``succ`` is indexed by vertex id 1..n_vertices (entry 0 unused).
    """
    index = [0] * (n_vertices + 1)
    low = [0] * (n_vertices + 1)
    on_stack = [False] * (n_vertices + 1)
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = 1

    for root in range(1, n_vertices + 1):
        if index[root]:
            continue
        work: list[tuple[int, int]] = [(root, 0)]
        while work:
            v, ei = work[-1]
            if ei == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            descended = False
            neighbors = succ[v]
            while ei < len(neighbors):
                w = neighbors[ei]
                ei += 1
                if not index[w]:
                    work[-1] = (v, ei)
                    work.append((w, 0))
                    descended = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if descended:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
            if low[v] == index[v]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    component.append(w)
                    if w == v:
                        break
                sccs.append(component)
    return sccs


def scc_ids(succ: Sequence[Sequence[int]], n_vertices: int) -> list[int]:
    """Component id per vertex (entry 0 unused); ids are arbitrary but consistent."""
    ids = [0] * (n_vertices + 1)
    for cid, component in enumerate(strongly_connected_components(succ, n_vertices)):
        for v in component:
            ids[v] = cid
    return ids


# ---------------------------------------------------------------------------
# condensation


@dataclass(frozen=True, eq=False)
class Condensation:
    """SCCs of the state digraph in a fixed topological order.

    dag_edges are 1-based SCC index pairs (source, target) with source <
    target. input_incidence[k-1] is the set of inputs actuating some state
    of the k-th SCC; output_incidence[k-1] the outputs sensing it.
    """

    sccs: tuple[frozenset[int], ...]
    dag_edges: frozenset[tuple[int, int]]
    input_incidence: tuple[frozenset[int], ...]
    output_incidence: tuple[frozenset[int], ...]

    @property
    def scc_count(self) -> int:
        return len(self.sccs)

    @cached_property
    def scc_index(self) -> dict[int, int]:
        """Map from state to the 1-based index of its SCC."""
        return {state: k for k, states in enumerate(self.sccs, start=1) for state in states}

    @cached_property
    def _has_incoming(self) -> frozenset[int]:
        return frozenset(target for _, target in self.dag_edges)

    @cached_property
    def _has_outgoing(self) -> frozenset[int]:
        return frozenset(source for source, _ in self.dag_edges)

    def non_top_linked(self, k: int) -> bool:
        """True when SCC k has no incoming edge from another SCC."""
        return k not in self._has_incoming

    def non_bottom_linked(self, k: int) -> bool:
        """True when SCC k has no outgoing edge to another SCC."""
        return k not in self._has_outgoing

    def non_top_linked_sccs(self) -> list[int]:
        return [k for k in range(1, self.scc_count + 1) if self.non_top_linked(k)]

    def non_bottom_linked_sccs(self) -> list[int]:
        return [k for k in range(1, self.scc_count + 1) if self.non_bottom_linked(k)]


def condense(system: StructuredSystem) -> Condensation:
    """Condense the state digraph into its SCC DAG.

    The SCC order is topological; among admissible choices the SCC holding
    the smallest state index comes first, so the result is reproducible and
    independent of edge iteration order.
    """
    system.require_valid()
    n = system.n
    succ: list[list[int]] = [[] for _ in range(n + 1)]
    for i, j in system.a_edges:
        succ[j].append(i)
    components = strongly_connected_components(succ, n)

    comp_of = [0] * (n + 1)
    for cid, component in enumerate(components):
        for v in component:
            comp_of[v] = cid

    raw_edges: set[tuple[int, int]] = set()
    for i, j in system.a_edges:  # edge x_j -> x_i
        a, b = comp_of[j], comp_of[i]
        if a != b:
            raw_edges.add((a, b))

    # Kahn's algorithm with a min-heap keyed by smallest member state.
    out_adj: list[list[int]] = [[] for _ in components]
    indeg = [0] * len(components)
    for a, b in raw_edges:
        out_adj[a].append(b)
        indeg[b] += 1
    min_state = [min(component) for component in components]
    heap = [(min_state[c], c) for c in range(len(components)) if indeg[c] == 0]
    heapq.heapify(heap)
    position = [0] * len(components)  # 1-based topological index
    order: list[int] = []
    while heap:
        _, c = heapq.heappop(heap)
        order.append(c)
        position[c] = len(order)
        for b in out_adj[c]:
            indeg[b] -= 1
            if indeg[b] == 0:
                heapq.heappush(heap, (min_state[b], b))

    sccs = tuple(frozenset(components[c]) for c in order)
    dag_edges = frozenset((position[a], position[b]) for a, b in raw_edges)

    inputs: list[set[int]] = [set() for _ in sccs]
    outputs: list[set[int]] = [set() for _ in sccs]
    for i, j in system.b_edges:  # input j actuates state i
        inputs[position[comp_of[i]] - 1].add(j)
    for i, j in system.c_edges:  # output i senses state j
        outputs[position[comp_of[j]] - 1].add(i)

    return Condensation(
        sccs=sccs,
        dag_edges=dag_edges,
        input_incidence=tuple(frozenset(s) for s in inputs),
        output_incidence=tuple(frozenset(s) for s in outputs),
    )


def is_line_dag(condensation: Condensation) -> bool:
    """True when the SCC DAG is exactly the path C_1 -> C_2 -> ... -> C_l."""
    ell = condensation.scc_count
    expected = frozenset((k, k + 1) for k in range(1, ell))
    return condensation.dag_edges == expected


def has_line_spanning_path(condensation: Condensation) -> Optional[tuple[int, ...]]:
    """The Hamiltonian path of the SCC DAG as an index order, if one exists.

    A DAG has a Hamiltonian path exactly when its topological order is
    unique, i.e. every pair of consecutive SCCs in the fixed order is
    joined by an edge. Extra forward edges are allowed.
    """
    ell = condensation.scc_count
    for k in range(1, ell):
        if (k, k + 1) not in condensation.dag_edges:
            return None
    return tuple(range(1, ell + 1))


def missing_path_links(condensation: Condensation) -> list[tuple[int, int]]:
    """Consecutive SCC pairs that are not joined by a DAG edge."""
    ell = condensation.scc_count
    return [
        (k, k + 1) for k in range(1, ell) if (k, k + 1) not in condensation.dag_edges
    ]


# ---------------------------------------------------------------------------
# bipartite graphs and matchings


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    """Bipartite graph over labelled left/right vertex lists.

    Edges are 0-based (left index, right index) pairs; ``edge_costs`` maps
    a subset of the edges to costs (edges without an entry cost 0).
    """

    left: tuple[str, ...]
    right: tuple[str, ...]
    edges: frozenset[tuple[int, int]]
    edge_costs: dict[tuple[int, int], float] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", frozenset(self.edges))
        for l, r in self.edges:
            if not (0 <= l < len(self.left) and 0 <= r < len(self.right)):
                raise DimensionError(f"edge ({l}, {r}) out of range")
        if self.edge_costs is not None:
            for edge, cost in self.edge_costs.items():
                if edge not in self.edges:
                    raise DimensionError(f"cost given for non-edge {edge}")
                if not (cost >= 0):
                    raise ValueError(f"edge cost for {edge} must be >= 0 or inf")

    @cached_property
    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.left]
        for l, r in sorted(self.edges):
            adj[l].append(r)
        return adj

    def cost(self, edge: tuple[int, int]) -> float:
        if self.edge_costs is None:
            return 0
        return self.edge_costs.get(edge, 0)


def state_bipartite(system: StructuredSystem) -> BipartiteGraph:
    """Bipartite graph pairing primed states with states: x'_i — x_j iff a_edge (i, j)."""
    n = system.n
    return BipartiteGraph(
        left=tuple(f"x'{i}" for i in range(1, n + 1)),
        right=tuple(f"x{i}" for i in range(1, n + 1)),
        edges=frozenset((i - 1, j - 1) for i, j in system.a_edges),
    )


def closed_loop_bipartite_adjacency(
    system: StructuredSystem, links: Iterable[Edge]
) -> list[list[int]]:
    """0-based left adjacency of the closed-loop bipartite graph.

    Left/right vertex order is x'_1..x'_n, u'_1..u'_m, y'_1..y'_p against
    x_1..x_n, u_1..u_m, y_1..y_p. Includes the identity edges u'_i — u_i
    and y'_j — y_j.
    """
    n, m, p = system.n, system.m, system.p
    adj: list[list[int]] = [[] for _ in range(n + m + p)]
    for i, j in system.a_edges:
        adj[i - 1].append(j - 1)
    for i, j in system.b_edges:
        adj[i - 1].append(n + j - 1)
    for i, j in system.c_edges:
        adj[n + m + i - 1].append(j - 1)
    for i in range(1, m + 1):
        adj[n + i - 1].append(n + i - 1)
    for j in range(1, p + 1):
        adj[n + m + j - 1].append(n + m + j - 1)
    for i, j in links:
        adj[n + i - 1].append(n + m + j - 1)
    return adj


def closed_loop_bipartite(
    system: StructuredSystem,
    pattern: FeedbackPattern,
    feedback_costs: Optional[CostMatrix] = None,
) -> BipartiteGraph:
    """Closed-loop bipartite graph; feedback edges may carry costs.

    When a cost matrix is given, each feedback edge u'_i — y_j costs the
    matrix entry (i, j) and every other edge costs 0.
    """
    n, m, p = system.n, system.m, system.p
    for i, j in pattern.links:
        if not (1 <= i <= m and 1 <= j <= p):
            raise DimensionError(f"feedback link ({i}, {j}) out of range for m={m}, p={p}")
    adj = closed_loop_bipartite_adjacency(system, pattern.links)
    edges = frozenset((l, r) for l, row in enumerate(adj) for r in row)
    costs = None
    if feedback_costs is not None:
        costs = {
            (n + i - 1, n + m + j - 1): feedback_costs.cost(i, j) for i, j in pattern.links
        }
    labels_left = (
        tuple(f"x'{i}" for i in range(1, n + 1))
        + tuple(f"u'{i}" for i in range(1, m + 1))
        + tuple(f"y'{j}" for j in range(1, p + 1))
    )
    labels_right = (
        tuple(f"x{i}" for i in range(1, n + 1))
        + tuple(f"u{i}" for i in range(1, m + 1))
        + tuple(f"y{j}" for j in range(1, p + 1))
    )
    return BipartiteGraph(left=labels_left, right=labels_right, edges=edges, edge_costs=costs)


def hopcroft_karp(
    adjacency: Sequence[Sequence[int]], n_right: int
) -> tuple[int, list[int], list[int]]:
    """Maximum bipartite matching in O(E * sqrt(V)) phases.

    Returns (size, match_left, match_right) with -1 marking unmatched
    vertices. The augmenting DFS is iterative, so long alternating paths
    are safe.
    """
    n_left = len(adjacency)
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    dist = [0.0] * n_left

    def bfs() -> bool:
        queue: deque[int] = deque()
        for u in range(n_left):
            if match_l[u] == -1:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = INF
        shortest = INF
        while queue:
            u = queue.popleft()
            if dist[u] >= shortest:
                continue
            for v in adjacency[u]:
                w = match_r[v]
                if w == -1:
                    if shortest == INF:
                        shortest = dist[u] + 1
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return shortest != INF

    def dfs(root: int) -> bool:
        stack: list[tuple[int, Iterator[int]]] = [(root, iter(adjacency[root]))]
        entered_via: list[int] = []  # right vertex used to reach each non-root frame
        while stack:
            u, neighbors = stack[-1]
            descended = False
            for v in neighbors:
                w = match_r[v]
                if w == -1:
                    match_l[u] = v
                    match_r[v] = u
                    stack.pop()
                    while stack:
                        pu, _ = stack.pop()
                        pv = entered_via.pop()
                        match_l[pu] = pv
                        match_r[pv] = pu
                    return True
                if dist[w] == dist[u] + 1:
                    stack.append((w, iter(adjacency[w])))
                    entered_via.append(v)
                    descended = True
                    break
            if not descended:
                dist[u] = INF
                stack.pop()
                if entered_via:
                    entered_via.pop()
        return False

    size = 0
    while bfs():
        for u in range(n_left):
            if match_l[u] == -1 and dfs(u):
                size += 1
    return size, match_l, match_r


def max_matching(graph: BipartiteGraph) -> dict[int, int]:
    """A maximum-cardinality matching as a left-index -> right-index map."""
    _, match_l, _ = hopcroft_karp(graph.adjacency, len(graph.right))
    return {l: r for l, r in enumerate(match_l) if r != -1}


def _assignment_min_cost(cost: list[list[float]]) -> Optional[tuple[list[int], float]]:
    """Square min-cost assignment by successive shortest paths with potentials.

    ``cost[i][j]`` is inf for absent edges. Returns (column per row, total)
    or None when no perfect matching over finite-cost edges exists. O(n^3).
    """
    n = len(cost)
    if n == 0:
        return [], 0
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    assigned_row = [0] * (n + 1)  # row matched to each column; 0 = free
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        assigned_row[0] = i
        j0 = 0
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = assigned_row[j0]
            delta = INF
            j1 = -1
            row = cost[i0 - 1]
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = row[j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            if delta == INF:
                return None  # every remaining column is unreachable
            for j in range(n + 1):
                if used[j]:
                    u[assigned_row[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if assigned_row[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            assigned_row[j0] = assigned_row[j1]
            j0 = j1
    columns = [-1] * n
    for j in range(1, n + 1):
        if assigned_row[j]:
            columns[assigned_row[j] - 1] = j - 1
    total = sum(cost[i][columns[i]] for i in range(n))
    return columns, total


def min_cost_perfect_matching(
    graph: BipartiteGraph,
) -> Optional[tuple[dict[int, int], float]]:
    """Minimum-cost perfect matching, or None when no perfect matching exists.

    Infinite-cost edges are unusable and excluded up front; both sides must
    have equal size.
    """
    n_left, n_right = len(graph.left), len(graph.right)
    if n_left != n_right:
        raise DimensionError(f"perfect matching needs equal sides, got {n_left} vs {n_right}")
    cost = [[INF] * n_right for _ in range(n_left)]
    for l, r in graph.edges:
        c = graph.cost((l, r))
        if not math.isinf(c):
            cost[l][r] = c
    result = _assignment_min_cost(cost)
    if result is None:
        return None
    columns, total = result
    return {l: r for l, r in enumerate(columns)}, total
