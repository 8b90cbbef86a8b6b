"""Seed-deterministic random instance generators.

Every generator draws from a ``random.Random`` seeded by the caller, so a
fixed seed reproduces the instance bit for bit. Generators that promise
structural properties (line-shaped SCC DAG, perfect matching on or off,
full-pattern feasibility) verify them and redraw until they hold, which
keeps the output honest without biasing the common case.
"""

from __future__ import annotations

import random
from typing import Optional

from .graphs import condense, hopcroft_karp, is_line_dag, state_bipartite
from .model import CostMatrix, FeedbackPattern, StructuredSystem, full_pattern
from .sfm import check_no_sfm


def _has_perfect_matching(system: StructuredSystem) -> bool:
    graph = state_bipartite(system)
    size, _, _ = hopcroft_karp(graph.adjacency, system.n)
    return size == system.n


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def random_line_system(
    seed,
    *,
    scc_count: int = 4,
    scc_size_range: tuple[int, int] = (1, 3),
    n_inputs: int = 3,
    n_outputs: int = 3,
    cost_range: tuple[int, int] = (1, 100),
    perfect_matching: bool = True,
    extra_edge_prob: float = 0.25,
    max_tries: int = 200,
) -> tuple[StructuredSystem, CostMatrix]:
    """Random system whose SCC DAG is exactly a chain C_1 -> ... -> C_scc_count.

    With ``perfect_matching`` each SCC is built on a state cycle, so every
    state sits on a cycle. Without it, one SCC is built as a hub-and-spoke
    that is strongly connected but has no spanning cycle family, which
    removes the perfect matching; one spoke gets an input and an output so
    feedback can repair the deficit. All generated instances are feasible
    under the full pattern, and costs are integers in ``cost_range``.
    """
    rng = _rng(seed)
    if scc_count < 1 or n_inputs < 1 or n_outputs < 1:
        raise ValueError("need at least one SCC, one input and one output")
    lo, hi = scc_size_range
    for _ in range(max_tries):
        sizes = [rng.randint(lo, hi) for _ in range(scc_count)]
        victim = rng.randrange(scc_count) if not perfect_matching else -1
        if victim >= 0:
            # Hub-and-spoke needs >= 3 states; a bare single state also works.
            sizes[victim] = 1 if sizes[victim] == 1 else 3
        n = sum(sizes)
        labels = list(range(1, n + 1))
        rng.shuffle(labels)
        scc_states: list[list[int]] = []
        offset = 0
        for size in sizes:
            scc_states.append(labels[offset : offset + size])
            offset += size

        a_edges: set[tuple[int, int]] = set()
        helper_state: Optional[int] = None
        for k, states in enumerate(scc_states):
            if k == victim:
                if len(states) == 1:
                    helper_state = states[0]  # bare vertex: no self-loop, no cycle
                    continue
                hub, *spokes = rng.sample(states, len(states))
                for s in spokes:
                    a_edges.add((s, hub))
                    a_edges.add((hub, s))
                helper_state = spokes[-1]
                continue
            if len(states) == 1:
                a_edges.add((states[0], states[0]))
                continue
            cycle = rng.sample(states, len(states))
            for tail, head in zip(cycle, cycle[1:] + cycle[:1]):
                a_edges.add((head, tail))
            for tail in states:
                for head in states:
                    if tail != head and rng.random() < extra_edge_prob:
                        a_edges.add((head, tail))
        for k in range(scc_count - 1):
            tail = rng.choice(scc_states[k])
            head = rng.choice(scc_states[k + 1])
            a_edges.add((head, tail))
            if rng.random() < extra_edge_prob:
                a_edges.add((rng.choice(scc_states[k + 1]), rng.choice(scc_states[k])))

        b_edges: set[tuple[int, int]] = set()
        for i in range(1, n_inputs + 1):
            for state in rng.sample(labels, min(len(labels), rng.randint(1, 2))):
                b_edges.add((state, i))
        b_edges.add((rng.choice(scc_states[0]), rng.randint(1, n_inputs)))

        c_edges: set[tuple[int, int]] = set()
        for j in range(1, n_outputs + 1):
            for state in rng.sample(labels, min(len(labels), rng.randint(1, 2))):
                c_edges.add((j, state))
        c_edges.add((rng.randint(1, n_outputs), rng.choice(scc_states[-1])))

        if helper_state is not None:
            b_edges.add((helper_state, rng.randint(1, n_inputs)))
            c_edges.add((rng.randint(1, n_outputs), helper_state))

        system = StructuredSystem(
            n=n, m=n_inputs, p=n_outputs,
            a_edges=frozenset(a_edges), b_edges=frozenset(b_edges), c_edges=frozenset(c_edges),
        )
        costs = CostMatrix.from_rows(
            [
                [rng.randint(cost_range[0], cost_range[1]) for _ in range(n_outputs)]
                for _ in range(n_inputs)
            ]
        )

        condensation = condense(system)
        if condensation.scc_count != scc_count or not is_line_dag(condensation):
            continue
        if _has_perfect_matching(system) != perfect_matching:
            continue
        if not check_no_sfm(system, full_pattern(costs)).feasible:
            continue
        return system, costs
    raise RuntimeError(f"no admissible instance found in {max_tries} draws")


def random_single_input_system(
    seed,
    *,
    n_branches: int = 3,
    branch_length_range: tuple[int, int] = (1, 2),
    scc_size_range: tuple[int, int] = (1, 2),
    n_outputs: Optional[int] = None,
    cost_range: tuple[int, int] = (1, 100),
    max_tries: int = 200,
) -> tuple[StructuredSystem, CostMatrix]:
    """Random single-input system with one source SCC and ``n_branches`` sinks.

    A root SCC fans out into branches of chained SCCs; every SCC is a state
    cycle, so the state bipartite graph has a perfect matching. The input
    drives the root and each sink SCC is sensed by at least one output, so
    the full pattern is feasible.
    """
    rng = _rng(seed)
    if n_branches < 1:
        raise ValueError("need at least one branch")
    for _ in range(max_tries):
        lo, hi = scc_size_range
        scc_sizes = [rng.randint(lo, hi)]  # root first
        branch_sccs: list[list[int]] = []
        for _ in range(n_branches):
            length = rng.randint(*branch_length_range)
            ids = []
            for _ in range(length):
                scc_sizes.append(rng.randint(lo, hi))
                ids.append(len(scc_sizes) - 1)
            branch_sccs.append(ids)
        n = sum(scc_sizes)
        labels = list(range(1, n + 1))
        rng.shuffle(labels)
        scc_states: list[list[int]] = []
        offset = 0
        for size in scc_sizes:
            scc_states.append(labels[offset : offset + size])
            offset += size

        a_edges: set[tuple[int, int]] = set()
        for states in scc_states:
            if len(states) == 1:
                a_edges.add((states[0], states[0]))
                continue
            cycle = rng.sample(states, len(states))
            for tail, head in zip(cycle, cycle[1:] + cycle[:1]):
                a_edges.add((head, tail))
        for ids in branch_sccs:
            previous = 0  # root
            for scc_id in ids:
                tail = rng.choice(scc_states[previous])
                head = rng.choice(scc_states[scc_id])
                a_edges.add((head, tail))
                previous = scc_id

        b_edges = {(rng.choice(scc_states[0]), 1)}
        p = n_outputs if n_outputs is not None else n_branches + rng.randint(0, 2)
        c_edges: set[tuple[int, int]] = set()
        for j in range(1, p + 1):
            for state in rng.sample(labels, min(len(labels), rng.randint(1, 2))):
                c_edges.add((j, state))
        terminal_sccs = [ids[-1] for ids in branch_sccs]
        for scc_id in terminal_sccs:
            states = set(scc_states[scc_id])
            if not any(s in states for _, s in c_edges):
                c_edges.add((rng.randint(1, p), rng.choice(scc_states[scc_id])))

        system = StructuredSystem(
            n=n, m=1, p=p,
            a_edges=frozenset(a_edges), b_edges=frozenset(b_edges), c_edges=frozenset(c_edges),
        )
        costs = CostMatrix.from_rows(
            [[rng.randint(cost_range[0], cost_range[1]) for _ in range(p)]]
        )

        condensation = condense(system)
        if len(condensation.non_top_linked_sccs()) != 1:
            continue
        if not _has_perfect_matching(system):
            continue
        if not check_no_sfm(system, full_pattern(costs)).feasible:
            continue
        return system, costs
    raise RuntimeError(f"no admissible instance found in {max_tries} draws")


def random_system(
    seed,
    *,
    n: int,
    m: int,
    p: int,
    a_density: float = 0.25,
    b_density: float = 0.3,
    c_density: float = 0.3,
    link_density: float = 0.3,
) -> tuple[StructuredSystem, FeedbackPattern]:
    """Unconstrained random system plus a random feedback pattern."""
    rng = _rng(seed)
    a_edges = {
        (i, j)
        for i in range(1, n + 1)
        for j in range(1, n + 1)
        if rng.random() < a_density
    }
    b_edges = {
        (i, j)
        for i in range(1, n + 1)
        for j in range(1, m + 1)
        if rng.random() < b_density
    }
    c_edges = {
        (i, j)
        for i in range(1, p + 1)
        for j in range(1, n + 1)
        if rng.random() < c_density
    }
    links = {
        (i, j)
        for i in range(1, m + 1)
        for j in range(1, p + 1)
        if rng.random() < link_density
    }
    system = StructuredSystem(
        n=n, m=m, p=p,
        a_edges=frozenset(a_edges), b_edges=frozenset(b_edges), c_edges=frozenset(c_edges),
    )
    return system, FeedbackPattern(frozenset(links))
