"""Feedback-selection solvers.

Five routes to a pattern:

* ``solve_dp`` / ``dp_cover``: exact chain dynamic program for systems whose
  SCC DAG is a line (or has a line spanning path). Optimal overall when the
  state bipartite graph has a perfect matching; otherwise optimal for the
  SCC-coverage condition alone.
* ``min_cost_condition_b``: cheapest pattern that puts every state on a
  cycle, via minimum-cost perfect matching.
* ``two_stage``: union of the two stages above; within a factor 2 of the
  optimum on line systems without a perfect matching.
* ``greedy_single_input``: weighted-set-cover greedy for single-input
  systems with one source SCC; logarithmic approximation factor.
* ``exact_oracle``: exhaustive enumeration over admissible links, used to
  validate the others at small sizes.

``reduce_set_cover`` maps a weighted set cover instance to an equivalent
feedback-selection instance and doubles as a hard-instance generator.

Deterministic tie-breaking throughout: stage argmins prefer smaller total,
then smaller first-actuated stage, then lexicographically smaller
(input, output); the oracle resolves equal-cost optima by lexicographic
pattern comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .graphs import (
    Condensation,
    closed_loop_bipartite,
    closed_loop_bipartite_adjacency,
    closed_loop_successors,
    condense,
    has_line_spanning_path,
    hopcroft_karp,
    min_cost_perfect_matching,
    missing_path_links,
    scc_ids,
    state_bipartite,
)
from .model import (
    INF,
    CostMatrix,
    DimensionError,
    Edge,
    FeedbackPattern,
    PreconditionError,
    SetCoverInstance,
    StructuredSystem,
    cost_of,
    full_pattern,
)
from .sfm import check_no_sfm


class BudgetExceededError(ValueError):
    """The exhaustive oracle refused an instance with too many candidate links."""


@dataclass(frozen=True)
class DpTable:
    """Stage table of the chain dynamic program.

    ``stage_costs[k]`` is the cheapest way to cover the first k SCCs
    (``stage_costs[0] == 0``). ``choices[k]`` records the argmin edge as
    (input, output, predecessor stage), or None when stage k is
    unreachable with admissible links.
    """

    stage_costs: tuple[float, ...]
    choices: tuple[Optional[tuple[int, int, int]], ...]


@dataclass(frozen=True, eq=False)
class Solution:
    """A solver outcome: the selected pattern, its cost, and provenance."""

    pattern: FeedbackPattern
    cost: float
    method: str
    reason: Optional[str] = None
    certificates: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return not math.isinf(self.cost)


def _infeasible(method: str, reason: str, certificates: Optional[dict] = None) -> Solution:
    return Solution(
        pattern=FeedbackPattern(),
        cost=INF,
        method=method,
        reason=reason,
        certificates=certificates or {},
    )


def cumulative_input_sets(condensation: Condensation) -> list[frozenset[int]]:
    """Inputs actuating any of the first k SCCs, for k = 1..l."""
    sets = []
    acc: frozenset[int] = frozenset()
    for incidence in condensation.input_incidence:
        acc |= incidence
        sets.append(acc)
    return sets


def suffix_output_sets(condensation: Condensation) -> list[frozenset[int]]:
    """Outputs sensing any of the SCCs k..l, for k = 1..l."""
    sets: list[frozenset[int]] = []
    acc: frozenset[int] = frozenset()
    for incidence in reversed(condensation.output_incidence):
        acc |= incidence
        sets.append(acc)
    sets.reverse()
    return sets


def covering_edge_set(
    condensation: Condensation, costs: CostMatrix, k: int
) -> frozenset[Edge]:
    """All admissible feedback links that cover SCC k.

    A link (i, j) covers SCC k when input u_i actuates some SCC at or
    before k and output y_j senses some SCC at or after k: the feedback
    edge then closes a cycle through the whole stretch including SCC k.
    """
    cum_in = cumulative_input_sets(condensation)[k - 1]
    suf_out = suffix_output_sets(condensation)[k - 1]
    return frozenset(
        (i, j)
        for i in cum_in
        for j in suf_out
        if not math.isinf(costs.cost(i, j))
    )


def _check_incidence_ranges(condensation: Condensation, costs: CostMatrix) -> None:
    for incidence in condensation.input_incidence:
        for i in incidence:
            if not 1 <= i <= costs.m:
                raise DimensionError(f"input u{i} outside cost matrix with m={costs.m}")
    if costs.m == 0:
        return  # empty matrix carries no column count, and no link can exist
    for incidence in condensation.output_incidence:
        for j in incidence:
            if not 1 <= j <= costs.p:
                raise DimensionError(f"output y{j} outside cost matrix with p={costs.p}")


def _require_line_order(condensation: Condensation) -> None:
    if has_line_spanning_path(condensation) is None:
        missing = missing_path_links(condensation)
        raise PreconditionError(
            "SCC DAG admits no line spanning path; consecutive SCC pairs "
            f"without an edge: {missing}; DAG edges: {sorted(condensation.dag_edges)}"
        )


def dp_cover(condensation: Condensation, costs: CostMatrix) -> Solution:
    """Cheapest pattern putting every SCC of a chain in a feedback cycle.

    Walks the SCC chain left to right. Stage k asks: which admissible link
    (i, j) with u_i actuating an SCC at or before k and y_j sensing one at
    or after k should cover SCC k? Such a link also covers everything back
    to the first SCC u_i actuates, so the recurrence charges its cost plus
    the best table entry just before that point. The final stage's
    backtrack yields the selected pattern.
    """
    _require_line_order(condensation)
    _check_incidence_ranges(condensation, costs)
    ell = condensation.scc_count
    m = costs.m

    # First chain position each input actuates; inputs actuating nothing
    # can never participate.
    first_stage: dict[int, int] = {}
    for k, incidence in enumerate(condensation.input_incidence, start=1):
        for i in incidence:
            first_stage.setdefault(i, k)

    # best_link[i][k] = cheapest (cost, output) over outputs sensing SCCs
    # k..l, built by a backward sweep; row k = l+1 is the empty sentinel.
    sentinel = (INF, 0)
    best_link: dict[int, list[tuple[float, int]]] = {
        i: [sentinel] * (ell + 2) for i in first_stage
    }
    for k in range(ell, 0, -1):
        outputs_here = sorted(condensation.output_incidence[k - 1])
        for i, row in best_link.items():
            best = row[k + 1]
            cost_row = costs.rows[i - 1]
            for j in outputs_here:
                candidate = (cost_row[j - 1], j)
                if candidate < best:
                    best = candidate
            row[k] = best

    by_stage: dict[int, list[int]] = {}
    for i, k in first_stage.items():
        by_stage.setdefault(k, []).append(i)

    stage_costs: list[float] = [0] + [INF] * ell
    choices: list[Optional[tuple[int, int, int]]] = [None] * (ell + 1)
    active: list[int] = []
    for k in range(1, ell + 1):
        active.extend(sorted(by_stage.get(k, ())))
        best_key: Optional[tuple[float, int, int, int]] = None
        for i in active:
            value, j = best_link[i][k]
            prior = stage_costs[first_stage[i] - 1]
            if math.isinf(value) or math.isinf(prior):
                continue
            key = (value + prior, first_stage[i], i, j)
            if best_key is None or key < best_key:
                best_key = key
        if best_key is not None:
            total, t_i, i, j = best_key
            stage_costs[k] = total
            choices[k] = (i, j, t_i - 1)

    table = DpTable(stage_costs=tuple(stage_costs), choices=tuple(choices))

    if math.isinf(stage_costs[ell]):
        blocked = next(
            (
                k
                for k in range(1, ell + 1)
                if all(math.isinf(best_link[i][k][0]) for i in active if first_stage[i] <= k)
            ),
            ell,
        )
        return _infeasible(
            "dp",
            f"SCC coverage unachievable: no admissible feedback link covers SCC {blocked}",
            {"dp_table": table},
        )

    links: set[Edge] = set()
    k = ell
    while k > 0:
        i, j, predecessor = choices[k]
        links.add((i, j))
        k = predecessor
    pattern = FeedbackPattern(frozenset(links))
    return Solution(
        pattern=pattern,
        cost=cost_of(pattern, costs),
        method="dp",
        certificates={"dp_table": table},
    )


def _has_state_perfect_matching(system: StructuredSystem) -> bool:
    graph = state_bipartite(system)
    size, _, _ = hopcroft_karp(graph.adjacency, system.n)
    return size == system.n


def solve_dp(system: StructuredSystem, costs: CostMatrix) -> Solution:
    """Chain dynamic program on a full system description.

    The method tag records the guarantee: ``dp`` is optimal overall (the
    state bipartite graph has a perfect matching, so cycle spanning is
    free); ``dp-condition-a`` only optimizes SCC coverage and leaves cycle
    spanning to ``two_stage``.
    """
    system.require_valid()
    costs.require_matches(system)
    solution = dp_cover(condense(system), costs)
    if not _has_state_perfect_matching(system):
        solution = replace(solution, method="dp-condition-a")
    return solution


def min_cost_condition_b(system: StructuredSystem, costs: CostMatrix) -> Solution:
    """Cheapest pattern that spans every state with disjoint cycles.

    Builds the closed-loop bipartite graph over all admissible links,
    charges each feedback edge its link cost and everything else 0, and
    extracts the pattern from a minimum-cost perfect matching.
    """
    system.require_valid()
    costs.require_matches(system)
    n, m, p = system.n, system.m, system.p
    graph = closed_loop_bipartite(system, full_pattern(costs), feedback_costs=costs)
    if _has_state_perfect_matching(system):
        # Padding a state matching with the u'_i-u_i and y'_j-y_j identity
        # edges is a zero-cost perfect matching, which no matching can beat.
        _, state_match, _ = hopcroft_karp(state_bipartite(system).adjacency, n)
        matching = {l: r for l, r in enumerate(state_match)}
        matching.update({v: v for v in range(n, n + m + p)})
        return Solution(
            pattern=FeedbackPattern(),
            cost=0,
            method="matching",
            certificates={
                "matching": sorted(
                    (graph.left[l], graph.right[r]) for l, r in matching.items()
                ),
                "matching_cost": 0,
            },
        )
    result = min_cost_perfect_matching(graph)
    if result is None:
        return _infeasible(
            "matching",
            "cycle spanning unachievable even with every admissible link "
            "(arbitrary pole placement impossible)",
        )
    matching, total = result
    links = set()
    for l, r in matching.items():
        if n <= l < n + m and n + m <= r < n + m + p:
            links.add((l - n + 1, r - n - m + 1))
    pattern = FeedbackPattern(frozenset(links))
    cost = cost_of(pattern, costs)
    if cost != total:
        raise AssertionError(f"matching cost {total} != pattern cost {cost}")
    return Solution(
        pattern=pattern,
        cost=cost,
        method="matching",
        certificates={
            "matching": sorted((graph.left[l], graph.right[r]) for l, r in matching.items()),
            "matching_cost": total,
        },
    )


def two_stage(system: StructuredSystem, costs: CostMatrix) -> Solution:
    """Coverage stage plus cycle-spanning stage; their union is 2-optimal.

    Each stage alone is a lower bound on the optimum, so the union costs
    at most twice the optimum; it is feasible whenever both stages are.
    """
    system.require_valid()
    costs.require_matches(system)
    condensation = condense(system)
    _require_line_order(condensation)
    stage_a = dp_cover(condensation, costs)
    stage_b = min_cost_condition_b(system, costs)
    certificates = {"stage_a": stage_a, "stage_b": stage_b}
    if not stage_a.feasible:
        return _infeasible("two-stage", f"coverage stage infeasible: {stage_a.reason}", certificates)
    if not stage_b.feasible:
        return _infeasible("two-stage", f"cycle stage infeasible: {stage_b.reason}", certificates)
    pattern = stage_a.pattern.union(stage_b.pattern)
    return Solution(
        pattern=pattern,
        cost=cost_of(pattern, costs),
        method="two-stage",
        certificates=certificates,
    )


# ---------------------------------------------------------------------------
# set cover: reduction in, greedy out


def reduce_set_cover(instance: SetCoverInstance) -> tuple[StructuredSystem, CostMatrix]:
    """Encode a weighted set cover instance as a feedback-selection instance.

    States 1..N mirror the universe plus a hub state N+1; every state has a
    self-loop and the hub feeds all others. The single input drives the
    hub, output y_i senses exactly the states in set i, and feeding y_i
    back costs that set's weight. A pattern is feasible exactly when its
    selected sets cover the universe, with equal cost.
    """
    big_n = instance.universe_size
    a_edges = {(i, i) for i in range(1, big_n + 2)} | {
        (i, big_n + 1) for i in range(1, big_n + 1)
    }
    b_edges = {(big_n + 1, 1)}
    c_edges = {(i, j) for i, s in enumerate(instance.sets, start=1) for j in s}
    system = StructuredSystem(
        n=big_n + 1, m=1, p=instance.set_count,
        a_edges=frozenset(a_edges), b_edges=frozenset(b_edges), c_edges=frozenset(c_edges),
    )
    costs = CostMatrix.from_rows([list(instance.weights)])
    return system, costs


def selected_sets(pattern: FeedbackPattern) -> frozenset[int]:
    """Set indices selected by a pattern on a reduced set-cover system."""
    return frozenset(j for i, j in pattern.links if i == 1)


def greedy_set_cover(
    instance: SetCoverInstance,
) -> tuple[list[int], float, list[tuple[int, int, float]]]:
    """Greedy weighted set cover: repeatedly take the best weight-per-new-element set.

    Returns (picked set indices in pick order, total weight, trace); each
    trace entry is (set index, newly covered count, weight). Ratio
    comparisons are done by cross-multiplication so no division is
    involved; ties prefer the smaller set index.
    """
    uncovered = set(range(1, instance.universe_size + 1))
    picked: list[int] = []
    trace: list[tuple[int, int, float]] = []
    total: float = 0
    while uncovered:
        best_idx = -1
        best_w: float = 0
        best_new = 0
        for idx in range(1, instance.set_count + 1):
            if idx in picked:
                continue
            new = len(instance.sets[idx - 1] & uncovered)
            if new == 0:
                continue
            w = instance.weights[idx - 1]
            # w / new < best_w / best_new, cross-multiplied
            if best_idx == -1 or w * best_new < best_w * new:
                best_idx, best_w, best_new = idx, w, new
        if best_idx == -1:
            raise AssertionError("instance invariant violated: universe not coverable")
        picked.append(best_idx)
        trace.append((best_idx, best_new, best_w))
        total += best_w
        uncovered -= instance.sets[best_idx - 1]
    return picked, total, trace


def greedy_single_input(system: StructuredSystem, costs: CostMatrix) -> Solution:
    """Set-cover greedy for single-input systems with one source SCC.

    Cycle spanning is free here (perfect matching required up front), so
    only SCC coverage matters, and every sink SCC must be sensed by some
    fed-back output. That is a covering problem over the sink SCCs with
    one candidate set per admissible output; the greedy cover maps back to
    feedback links on the single input.
    """
    system.require_valid()
    costs.require_matches(system)
    condensation = condense(system)
    problems = []
    if system.m != 1:
        problems.append(f"requires a single input, got m={system.m}")
    if not _has_state_perfect_matching(system):
        problems.append("requires a perfect matching in the state bipartite graph")
    sources = condensation.non_top_linked_sccs()
    if len(sources) != 1:
        problems.append(f"requires exactly one source SCC, got {len(sources)}")
    if problems:
        raise PreconditionError("; ".join(problems))

    sinks = condensation.non_bottom_linked_sccs()
    element_of = {scc: e for e, scc in enumerate(sinks, start=1)}

    candidate_sets: list[frozenset[int]] = []
    candidate_outputs: list[int] = []
    for j in range(1, system.p + 1):
        if math.isinf(costs.cost(1, j)):
            continue
        sensed = frozenset(
            element_of[scc]
            for scc in sinks
            if j in condensation.output_incidence[scc - 1]
        )
        if sensed:
            candidate_sets.append(sensed)
            candidate_outputs.append(j)

    covered = frozenset().union(*candidate_sets) if candidate_sets else frozenset()
    if covered != frozenset(range(1, len(sinks) + 1)):
        missing = sorted(set(range(1, len(sinks) + 1)) - covered)
        missing_sccs = [sinks[e - 1] for e in missing]
        return _infeasible(
            "greedy",
            f"sink SCCs {missing_sccs} are sensed by no admissible output; no pattern is feasible",
        )

    cover_instance = SetCoverInstance(
        universe_size=len(sinks),
        sets=tuple(candidate_sets),
        weights=tuple(costs.cost(1, j) for j in candidate_outputs),
    )
    picked, _, trace = greedy_set_cover(cover_instance)
    pattern = FeedbackPattern(frozenset((1, candidate_outputs[idx - 1]) for idx in picked))
    verdict = check_no_sfm(system, pattern)
    certificates = {
        "sink_sccs": sinks,
        "cover_outputs": sorted(candidate_outputs[idx - 1] for idx in picked),
        "trace": [
            (candidate_outputs[idx - 1], new, w) for idx, new, w in trace
        ],
    }
    if not verdict.feasible:
        return _infeasible(
            "greedy",
            "covering every sink SCC does not close the loop "
            f"({verdict.describe()}); the input likely fails to actuate the source SCC",
            certificates,
        )
    return Solution(
        pattern=pattern,
        cost=cost_of(pattern, costs),
        method="greedy",
        certificates=certificates,
    )


# ---------------------------------------------------------------------------
# exhaustive oracle


def _subset_costs(link_costs: list[float]) -> np.ndarray:
    """Cost of every link subset; bit b of the index selects link b."""
    arr = np.zeros(1, dtype=np.float64)
    for c in link_costs:
        arr = np.concatenate([arr, arr + c])
    return arr


def exact_oracle(
    system: StructuredSystem, costs: CostMatrix, budget: int = 20
) -> Solution:
    """Exhaustive minimum over all patterns of admissible links.

    Enumerates subsets in ascending cost order and stops at the first
    feasible one, which is therefore optimal; equal-cost ties go to the
    lexicographically smallest pattern. The certificates expose the
    coverage-only optimum (condition (a) alone) for validating the chain
    dynamic program. Refuses instances with more than ``budget`` admissible
    links.
    """
    system.require_valid()
    costs.require_matches(system)
    links = costs.finite_links()
    n_links = len(links)
    if n_links > budget:
        raise BudgetExceededError(
            f"{n_links} admissible links exceed the enumeration budget of {budget} "
            f"(2^{n_links} patterns); raise the budget to force the issue"
        )

    n, m, p = system.n, system.m, system.p
    total_vertices = n + m + p
    succ_base = closed_loop_successors(system, [])
    adj_base = closed_loop_bipartite_adjacency(system, [])
    base_b_size, _, _ = hopcroft_karp(adj_base, total_vertices)
    base_b_ok = base_b_size == total_vertices  # monotone: stays true for every pattern

    def mask_links(mask: int) -> list[Edge]:
        return [links[b] for b in range(n_links) if (mask >> b) & 1]

    cond_a_memo: dict[int, bool] = {}

    def cond_a_ok(mask: int) -> bool:
        hit = cond_a_memo.get(mask)
        if hit is not None:
            return hit
        chosen = mask_links(mask)
        succ = list(succ_base)
        for i, j in chosen:
            v = n + m + j
            if succ[v] is succ_base[v]:
                succ[v] = succ_base[v] + [n + i]
            else:
                succ[v].append(n + i)
        ids = scc_ids(succ, total_vertices)
        covered = set()
        for i, j in chosen:
            if ids[n + m + j] == ids[n + i]:
                covered.add(ids[n + i])
        ok = all(ids[s] in covered for s in range(1, n + 1))
        cond_a_memo[mask] = ok
        return ok

    def cond_b_ok(mask: int) -> bool:
        if base_b_ok:
            return True
        adj = list(adj_base)
        for i, j in mask_links(mask):
            l = n + i - 1
            if adj[l] is adj_base[l]:
                adj[l] = adj_base[l] + [n + m + j - 1]
            else:
                adj[l].append(n + m + j - 1)
        size, _, _ = hopcroft_karp(adj, total_vertices)
        return size == total_vertices

    subset_costs = _subset_costs([costs.cost(i, j) for i, j in links])
    order = np.argsort(subset_costs, kind="stable")

    def scan(feasible) -> Optional[tuple[float, FeedbackPattern]]:
        best_cost: Optional[float] = None
        best_links: Optional[list[Edge]] = None
        for mask in order:
            mask = int(mask)
            c = float(subset_costs[mask])
            if best_cost is not None and c > best_cost:
                break
            if not feasible(mask):
                continue
            chosen = sorted(mask_links(mask))
            if best_cost is None or chosen < best_links:
                best_cost, best_links = c, chosen
        if best_cost is None:
            return None
        return best_cost, FeedbackPattern(frozenset(best_links))

    coverage_only = scan(cond_a_ok)
    overall = None
    if coverage_only is not None:
        overall = scan(lambda mask: cond_a_ok(mask) and cond_b_ok(mask))

    certificates = {
        "admissible_links": n_links,
        "condition_a_cost": cost_of(coverage_only[1], costs) if coverage_only else INF,
        "condition_a_pattern": coverage_only[1] if coverage_only else FeedbackPattern(),
    }
    if overall is None:
        return _infeasible(
            "exact", "no feasible pattern exists (optimal cost is infinite)", certificates
        )
    _, pattern = overall
    return Solution(
        pattern=pattern,
        cost=cost_of(pattern, costs),
        method="exact",
        certificates=certificates,
    )
