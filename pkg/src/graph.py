"""
Typed ReasoningFlow graph model and its construction from a document.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple, Union

import networkx as nx
from networkx import MultiDiGraph

from .document import AnnotationDocument, EdgeRecord, NodeRecord, read_document
from .errors import GraphValidationError, UnknownNodeError
from .labels import EdgeLabel, NodeLabel
from .validation import Strictness, ValidationReport, check_document

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Node:
    """A text snippet of the trace with its semantic label."""
    id: str
    label: NodeLabel
    text: str
    ordinal: int


@dataclass(frozen=True)
class Edge:
    """A labeled link from an earlier node to a later node."""
    src: str
    dst: str
    label: EdgeLabel


class FlowGraph:
    """
    Validated, immutable labeled DAG.

    Nodes keep document order (ordinal == position). Reachability and
    shortest distances are computed once at construction.
    """

    def __init__(
        self,
        nodes: List[Node],
        edges: List[Edge],
        meta: Optional[Mapping[str, str]] = None,
        strictness: Strictness = Strictness.LENIENT,
        warnings: Optional[ValidationReport] = None,
    ):
        """
        Build the graph from already validated parts. Use build_graph() for documents.

        Args:
            nodes: Nodes in ordinal order
            edges: Deduplicated edges
            meta: Document metadata
            strictness: Mode the graph was validated in
            warnings: Non-blocking findings from construction
        """
        self._nodes: Tuple[Node, ...] = tuple(nodes)
        self._edges: Tuple[Edge, ...] = tuple(edges)
        self._by_id: Dict[str, Node] = {n.id: n for n in self._nodes}
        self.meta: Mapping[str, str] = MappingProxyType(dict(meta or {}))
        self.strictness = strictness
        self.warnings = warnings or ValidationReport()

        graph: MultiDiGraph = nx.MultiDiGraph()
        graph.add_nodes_from(n.id for n in self._nodes)
        for edge in self._edges:
            graph.add_edge(edge.src, edge.dst, key=edge.label.value)
        self._graph = nx.freeze(graph)

        self._reach: Dict[str, FrozenSet[str]] = {
            n.id: frozenset(nx.descendants(self._graph, n.id)) for n in self._nodes
        }
        self._ancestors: Dict[str, FrozenSet[str]] = {
            n.id: frozenset(nx.ancestors(self._graph, n.id)) for n in self._nodes
        }
        self._dist: Dict[str, Mapping[str, int]] = {
            source: MappingProxyType(dict(lengths))
            for source, lengths in nx.all_pairs_shortest_path_length(self._graph)
        }

    def __repr__(self) -> str:
        return f"FlowGraph(nodes={len(self._nodes)}, edges={len(self._edges)})"

    @property
    def nodes(self) -> Tuple[Node, ...]:
        return self._nodes

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return self._edges

    @property
    def reach(self) -> Mapping[str, FrozenSet[str]]:
        """Node id -> ids reachable over one or more edges."""
        return MappingProxyType(self._reach)

    @property
    def dist(self) -> Mapping[str, Mapping[str, int]]:
        """Node id -> {reachable id: shortest path length}; includes the node itself at 0."""
        return MappingProxyType(self._dist)

    def has_node(self, node_id: str) -> bool:
        return node_id in self._by_id

    def node(self, node_id: str) -> Node:
        """
        Look up a node.

        Raises:
            UnknownNodeError: If the id is not in the graph
        """
        try:
            return self._by_id[node_id]
        except KeyError:
            raise UnknownNodeError(node_id) from None

    def ordinal(self, node_id: str) -> int:
        return self.node(node_id).ordinal

    def get_nx_graph(self) -> MultiDiGraph:
        """Frozen networkx view; edge keys are edge label strings."""
        return self._graph

    def ancestors_of(self, node_id: str) -> FrozenSet[str]:
        self.node(node_id)
        return self._ancestors[node_id]

    def nodes_with_label(self, label: NodeLabel) -> List[Node]:
        return [n for n in self._nodes if n.label is label]

    def to_document(self) -> AnnotationDocument:
        """Convert back to an annotation document (node order preserved)."""
        return AnnotationDocument(
            nodes=[NodeRecord(id=n.id, label=n.label.value, text=n.text) for n in self._nodes],
            edges=[EdgeRecord(src=e.src, dst=e.dst, label=e.label.value) for e in self._edges],
            meta=dict(self.meta),
        )


def build_graph(
    doc: AnnotationDocument,
    strictness: Strictness = Strictness.LENIENT,
) -> Union[FlowGraph, ValidationReport]:
    """
    Validate a document and build its FlowGraph.

    Args:
        doc: Parsed annotation document
        strictness: strict or lenient grading

    Returns:
        FlowGraph if no error-severity violation was found (warnings are
        attached as graph.warnings), otherwise the full ValidationReport
    """
    report = check_document(doc, strictness)
    if not report.is_constructible:
        logger.debug("Document rejected: %s", report.summary())
        return report

    nodes = [
        Node(id=r.id, label=NodeLabel(r.label), text=r.text, ordinal=i)
        for i, r in enumerate(doc.nodes)
    ]

    edges: List[Edge] = []
    seen = set()
    for record in doc.edges:
        triple = (record.src, record.dst, record.label)
        if triple in seen:
            logger.warning("Collapsed duplicate edge %s -> %s (%s)", *triple)
            continue
        seen.add(triple)
        edges.append(Edge(record.src, record.dst, EdgeLabel(record.label)))

    graph = FlowGraph(nodes, edges, doc.meta, strictness, report)
    logger.debug("Built %r", graph)
    return graph


def load_graph(
    path: Union[str, Path],
    strictness: Strictness = Strictness.LENIENT,
) -> FlowGraph:
    """
    Read a document from disk and build its graph.

    Args:
        path: Path to the annotation file
        strictness: strict or lenient grading

    Returns:
        The FlowGraph

    Raises:
        OSError: If the file cannot be read
        DocumentError: If the file does not parse
        GraphValidationError: If the document violates error-severity rules
    """
    result = build_graph(read_document(path), strictness)
    if isinstance(result, ValidationReport):
        raise GraphValidationError(result, str(path))
    return result
