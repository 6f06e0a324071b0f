"""
Reachability, ancestry, evaluation contexts and ancestor-based compression.
"""
import logging
from enum import Enum
from fractions import Fraction
from typing import Iterable, List, Optional, Set, Tuple

from .errors import CompressionError
from .graph import FlowGraph, build_graph
from .labels import NodeLabel
from .validation import ValidationReport

logger = logging.getLogger(__name__)


class ContextMode(str, Enum):
    """How far back an evaluation context reaches."""
    DIRECT = "direct"
    CLOSURE = "closure"


def _in_order(graph: FlowGraph, ids: Iterable[str]) -> List[str]:
    return sorted(ids, key=graph.ordinal)


def direct_predecessors(graph: FlowGraph, node_id: str) -> List[str]:
    """
    Nodes with an edge into node_id, in ordinal order.

    Raises:
        UnknownNodeError: If node_id is not in the graph
    """
    graph.node(node_id)
    return _in_order(graph, set(graph.get_nx_graph().predecessors(node_id)))


def ancestors(graph: FlowGraph, ids: Iterable[str]) -> Set[str]:
    """
    All nodes with a directed path (one or more edges) to any seed.

    Args:
        graph: The graph
        ids: Seed node ids

    Returns:
        Union of the seeds' ancestors, seeds themselves excluded

    Raises:
        UnknownNodeError: If a seed is not in the graph
    """
    seeds = set(ids)
    result: Set[str] = set()
    for node_id in seeds:
        result |= graph.ancestors_of(node_id)
    return result - seeds


def connected(graph: FlowGraph, x: str, y: str) -> bool:
    """True iff a directed path of length >= 1 leads from x to y."""
    graph.node(x)
    graph.node(y)
    return y in graph.reach[x]


def distance(graph: FlowGraph, x: str, y: str) -> Optional[int]:
    """
    Shortest directed path length from x to y in edges.

    Returns:
        0 when x == y, None when y is unreachable from x
    """
    graph.node(x)
    graph.node(y)
    return graph.dist[x].get(y)


def evaluation_context(
    graph: FlowGraph,
    node_id: str,
    mode: ContextMode = ContextMode.DIRECT,
    exclude_labels: Iterable[NodeLabel] = (),
) -> List[str]:
    """
    Nodes needed to judge the validity of node_id.

    Args:
        graph: The graph
        node_id: Target node
        mode: DIRECT for direct predecessors, CLOSURE for all ancestors
        exclude_labels: Node labels to leave out (e.g. planning, reflection)

    Returns:
        Node ids in ordinal order
    """
    if ContextMode(mode) is ContextMode.DIRECT:
        ids = direct_predecessors(graph, node_id)
    else:
        ids = _in_order(graph, ancestors(graph, [node_id]))

    skipped = set(exclude_labels)
    if skipped:
        ids = [i for i in ids if graph.node(i).label not in skipped]
    return ids


def _conclusion_ids(graph: FlowGraph) -> List[str]:
    return [n.id for n in graph.nodes_with_label(NodeLabel.CONCLUSION)]


def unnecessary_nodes(graph: FlowGraph) -> List[str]:
    """
    Non-context nodes with no path to the conclusion run.

    Raises:
        CompressionError: If the graph has no conclusion node
    """
    conclusions = _conclusion_ids(graph)
    if not conclusions:
        raise CompressionError("Graph has no conclusion node")
    needed = set(conclusions) | ancestors(graph, conclusions)
    return [
        n.id for n in graph.nodes
        if n.label is not NodeLabel.CONTEXT and n.id not in needed
    ]


def compress_to_conclusion(graph: FlowGraph) -> Tuple[FlowGraph, Fraction]:
    """
    Restrict the graph to the conclusion run, its ancestors and all context nodes.

    Args:
        graph: Graph with at least one conclusion node

    Returns:
        (compressed graph, kept non-context nodes / all non-context nodes)

    Raises:
        CompressionError: If the graph has no conclusion node
    """
    dropped = set(unnecessary_nodes(graph))
    doc = graph.to_document()
    kept_nodes = [r for r in doc.nodes if r.id not in dropped]
    kept_edges = [e for e in doc.edges if e.src not in dropped and e.dst not in dropped]
    compressed_doc = doc.model_copy(update={"nodes": kept_nodes, "edges": kept_edges})

    result = build_graph(compressed_doc, graph.strictness)
    if isinstance(result, ValidationReport):
        # An induced subgraph of a valid graph stays valid.
        raise CompressionError(f"Compressed graph failed validation: {result.summary()}")

    total = sum(1 for n in graph.nodes if n.label is not NodeLabel.CONTEXT)
    ratio = Fraction(total - len(dropped), total)
    logger.info("Compressed %d -> %d nodes (ratio %s)",
                len(graph.nodes), len(result.nodes), ratio)
    return result, ratio
