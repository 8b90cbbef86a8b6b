"""Graphviz DOT export with deterministic node naming and ordering.

State nodes are circles named x1..xn, inputs are boxes u1..um, outputs are
diamonds y1..yp; feedback edges are dashed. Output is sorted throughout so
two exports of the same graph are byte-identical and diffable.
"""

from __future__ import annotations

from .graphs import Condensation, Digraph


def digraph_to_dot(graph: Digraph, name: str = "system") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for v in range(1, graph.n + 1):
        lines.append(f'  {graph.label(v)} [shape=circle];')
    for v in range(graph.n + 1, graph.n + graph.m + 1):
        lines.append(f'  {graph.label(v)} [shape=box];')
    for v in range(graph.n + graph.m + 1, graph.vertex_count + 1):
        lines.append(f'  {graph.label(v)} [shape=diamond];')
    plain = sorted(graph.state_edges | graph.input_edges | graph.output_edges)
    for tail, head in plain:
        lines.append(f"  {graph.label(tail)} -> {graph.label(head)};")
    for tail, head in sorted(graph.feedback_edges):
        lines.append(f"  {graph.label(tail)} -> {graph.label(head)} [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def condensation_to_dot(condensation: Condensation, name: str = "condensation") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for k in range(1, condensation.scc_count + 1):
        states = ",".join(f"x{s}" for s in sorted(condensation.sccs[k - 1]))
        inputs = ",".join(f"u{i}" for i in sorted(condensation.input_incidence[k - 1]))
        outputs = ",".join(f"y{j}" for j in sorted(condensation.output_incidence[k - 1]))
        label = f"C{k}: {{{states}}}"
        if inputs:
            label += f"\\nin: {inputs}"
        if outputs:
            label += f"\\nout: {outputs}"
        lines.append(f'  C{k} [shape=box, label="{label}"];')
    for a, b in sorted(condensation.dag_edges):
        lines.append(f"  C{a} -> C{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
