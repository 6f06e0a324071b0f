"""
Graph exports: logic-program facts and Graphviz DOT.
"""
import re

import pygraphviz as pgv

from .errors import ExportError
from .graph import FlowGraph, Node
from .labels import EDGE_COLORS, NODE_COLORS, NODE_SHAPES

# Ids must be usable as bare atoms by a grounder.
ATOM_RE = re.compile(r"[a-z][a-z0-9_]*")

ELLIPSIS = "..."
FONT_NAME = "Helvetica"


def _sorted_edges(graph: FlowGraph):
    return sorted(
        graph.edges,
        key=lambda e: (graph.ordinal(e.src), graph.ordinal(e.dst), e.label.value),
    )


def export_facts(graph: FlowGraph) -> str:
    """
    Render the graph's base relation as node/2 and edge/3 facts.

    Nodes come first in ordinal order, then edges sorted by
    (source ordinal, target ordinal, label). Derived predicates are not
    exported.

    Args:
        graph: The graph to export

    Returns:
        One fact per line, LF terminated; empty string for an empty graph

    Raises:
        ExportError: If a node id is not a valid bare atom
    """
    for node in graph.nodes:
        if not ATOM_RE.fullmatch(node.id):
            raise ExportError(
                f"Node id {node.id!r} is not a valid atom (expected [a-z][a-z0-9_]*)"
            )

    lines = [f'node({n.id}, "{n.label.value}").' for n in graph.nodes]
    lines.extend(f'edge({e.src}, {e.dst}, "{e.label.value}").' for e in _sorted_edges(graph))
    return "".join(line + "\n" for line in lines)


def truncate(text: str, width: int) -> str:
    """Shorten text to at most width characters, marking the cut with an ellipsis."""
    text = " ".join(text.split())
    if len(text) <= width:
        return text
    return text[: width - len(ELLIPSIS)] + ELLIPSIS


def node_caption(node: Node, width: int) -> str:
    """
    Two-line DOT label of a node: "id [label]" over its truncated text.

    Backslashes in the text are doubled so Graphviz does not read them as
    label escapes; "\\n" is the Graphviz line break.
    """
    text = truncate(node.text, width).replace("\\", "\\\\")
    return f"{node.id} [{node.label.value}]\\n{text}"


def export_dot(graph: FlowGraph, color_by_label: bool = True, width: int = 60) -> str:
    """
    Render the graph as a Graphviz digraph.

    Node shape (and fill, if color_by_label) encodes the node label; each
    edge carries its label as text. Nodes are added in ordinal order and
    edges in (source ordinal, target ordinal, label) order, so the output
    is byte-identical for the same graph.

    Args:
        graph: The graph to render
        color_by_label: Fill nodes and color edges with the label palette
        width: Maximum node text length before truncation

    Returns:
        DOT source text
    """
    A = pgv.AGraph(directed=True, strict=False, name="reasoning_flow", rankdir="TB")
    A.node_attr["fontname"] = FONT_NAME
    A.node_attr["fontsize"] = "10"
    A.edge_attr["fontname"] = FONT_NAME
    A.edge_attr["fontsize"] = "9"

    for node in graph.nodes:
        attrs = {"label": node_caption(node, width), "shape": NODE_SHAPES[node.label]}
        if color_by_label:
            attrs["style"] = "rounded,filled"
            attrs["fillcolor"] = NODE_COLORS[node.label]
        A.add_node(node.id, **attrs)

    for edge in _sorted_edges(graph):
        attrs = {"label": edge.label.value}
        if color_by_label:
            attrs["color"] = EDGE_COLORS[edge.label]
        # Parallel edges between one pair are told apart by their label.
        A.add_edge(edge.src, edge.dst, key=edge.label.value, **attrs)

    return A.string()
