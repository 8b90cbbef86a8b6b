"""Feasibility of a feedback pattern: the no-structurally-fixed-modes check.

A pattern is feasible when both graph conditions hold on the closed loop:

  (a) every state vertex lies in a strongly connected component that
      contains a selected feedback edge (both of its endpoints), and
  (b) every state vertex is spanned by a disjoint union of cycles, which
      is equivalent to a perfect matching in the closed-loop bipartite
      graph.

Feasible patterns permit arbitrary (generic) pole placement; check results
carry the offending states so callers can explain failures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .graphs import (
    closed_loop_bipartite_adjacency,
    closed_loop_successors,
    hopcroft_karp,
    scc_ids,
)
from .model import Edge, FeedbackPattern, StructuredSystem


@dataclass(frozen=True)
class SfmVerdict:
    """Outcome of the two-part feasibility check."""

    uncovered_states: tuple[int, ...]
    condition_b_ok: bool

    @property
    def condition_a_ok(self) -> bool:
        return not self.uncovered_states

    @property
    def feasible(self) -> bool:
        return self.condition_a_ok and self.condition_b_ok

    def describe(self) -> str:
        a = "pass" if self.condition_a_ok else f"fail (uncovered states: {list(self.uncovered_states)})"
        b = "pass" if self.condition_b_ok else "fail (no spanning cycle family)"
        verdict = "feasible" if self.feasible else "infeasible"
        return f"condition a: {a}; condition b: {b}; {verdict}"


def _uncovered_states(system: StructuredSystem, links: Iterable[Edge]) -> tuple[int, ...]:
    n, m = system.n, system.m
    links = list(links)
    succ = closed_loop_successors(system, links)
    ids = scc_ids(succ, system.n + system.m + system.p)
    covered = set()
    for i, j in links:
        # A feedback edge is inside an SCC exactly when its endpoints share one.
        if ids[n + m + j] == ids[n + i]:
            covered.add(ids[n + i])
    return tuple(s for s in range(1, n + 1) if ids[s] not in covered)


def check_condition_a(system: StructuredSystem, pattern: FeedbackPattern) -> tuple[int, ...]:
    """States whose closed-loop SCC contains no selected feedback edge (empty = pass)."""
    system.require_valid()
    return _uncovered_states(system, pattern.links)


def check_condition_b(system: StructuredSystem, pattern: FeedbackPattern) -> bool:
    """True when the closed-loop bipartite graph has a perfect matching."""
    system.require_valid()
    total = system.n + system.m + system.p
    adjacency = closed_loop_bipartite_adjacency(system, pattern.links)
    size, _, _ = hopcroft_karp(adjacency, total)
    return size == total


def check_no_sfm(system: StructuredSystem, pattern: FeedbackPattern) -> SfmVerdict:
    """Run both feasibility conditions and return the combined verdict."""
    system.require_valid()
    return SfmVerdict(
        uncovered_states=_uncovered_states(system, pattern.links),
        condition_b_ok=check_condition_b(system, pattern),
    )
