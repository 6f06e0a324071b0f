"""
Schema validation: structural rules checked before a graph is built, and the
edge endpoint-compatibility matrix checked on built graphs.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Set, Tuple, TYPE_CHECKING

from .labels import EdgeLabel, NodeLabel, parse_edge_label, parse_node_label

if TYPE_CHECKING:
    from .document import AnnotationDocument
    from .graph import FlowGraph

logger = logging.getLogger(__name__)


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


class Strictness(str, Enum):
    """Strict mode turns endpoint-compatibility findings into errors."""
    STRICT = "strict"
    LENIENT = "lenient"

    def grade(self) -> Severity:
        return Severity.ERROR if self is Strictness.STRICT else Severity.WARNING


# Structural rule ids
DUPLICATE_NODE_ID = "duplicate-node-id"
UNKNOWN_NODE_LABEL = "unknown-node-label"
UNKNOWN_EDGE_LABEL = "unknown-edge-label"
DANGLING_EDGE = "dangling-edge"
SELF_LOOP = "self-loop"
EDGE_DIRECTION = "edge-direction"
CONTEXT_PREFIX = "context-prefix"
CONTEXT_INCOMING_EDGE = "context-incoming-edge"
CONTEXT_INTERNAL_EDGE = "context-internal-edge"
CONCLUSION_CONTIGUITY = "conclusion-contiguity"
EMPTY_TEXT = "empty-text"
DUPLICATE_EDGE = "duplicate-edge"
MULTI_LABEL_PAIR = "multi-label-pair"
# Label-matrix rule ids
CONCEPT_EXAMPLE_FACTS = "concept-example-facts"


def endpoint_rule(label: EdgeLabel) -> str:
    """Rule id of the endpoint-compatibility check for an edge label."""
    return f"endpoint-{label.value}"


@dataclass(frozen=True)
class Violation:
    """
    A single validation finding.

    Attributes:
        rule_id: Stable rule identifier
        severity: error or warning
        message: Human-readable description
        ids: Involved node ids
        positions: Document positions of the involved nodes (sort key)
    """
    rule_id: str
    severity: Severity
    message: str
    ids: Tuple[str, ...] = ()
    positions: Tuple[int, ...] = ()

    def render(self) -> str:
        involved = f" [{', '.join(self.ids)}]" if self.ids else ""
        return f"{self.severity.value} {self.rule_id}: {self.message}{involved}"


@dataclass(frozen=True)
class ValidationReport:
    """
    Ordered list of findings, sorted by rule id, then node positions.
    """
    violations: Tuple[Violation, ...] = ()

    @classmethod
    def of(cls, violations: Iterable[Violation]) -> "ValidationReport":
        ordered = sorted(
            violations,
            key=lambda v: (v.rule_id, v.positions, v.ids, v.message, v.severity.value),
        )
        return cls(tuple(ordered))

    def merge(self, other: "ValidationReport") -> "ValidationReport":
        return ValidationReport.of(self.violations + other.violations)

    @property
    def errors(self) -> List[Violation]:
        return [v for v in self.violations if v.severity is Severity.ERROR]

    @property
    def warnings(self) -> List[Violation]:
        return [v for v in self.violations if v.severity is Severity.WARNING]

    @property
    def is_constructible(self) -> bool:
        """True when no error-severity finding is present."""
        return not self.errors

    def rule_ids(self) -> List[str]:
        return [v.rule_id for v in self.violations]

    def summary(self) -> str:
        return f"{len(self.errors)} errors, {len(self.warnings)} warnings"

    def render(self) -> str:
        lines = [v.render() for v in self.violations]
        lines.append(self.summary())
        return "\n".join(lines)


class _Collector:
    """Accumulates findings with position lookup for a document."""

    def __init__(self, positions: Dict[str, int], missing_position: int):
        self.positions = positions
        self.missing_position = missing_position
        self.violations: List[Violation] = []

    def add(self, rule_id: str, severity: Severity, message: str, *ids: str) -> None:
        positions = tuple(self.positions.get(i, self.missing_position) for i in ids)
        self.violations.append(Violation(rule_id, severity, message, tuple(ids), positions))

    def report(self) -> ValidationReport:
        return ValidationReport.of(self.violations)


def check_document(doc: "AnnotationDocument", strictness: Strictness) -> ValidationReport:
    """
    Check the structural schema rules of a parsed document.

    Args:
        doc: Parsed annotation document
        strictness: Grading mode (affects context-to-context edges)

    Returns:
        ValidationReport; no errors means a FlowGraph can be built
    """
    positions: Dict[str, int] = {}
    labels: Dict[str, Optional[NodeLabel]] = {}
    collector = _Collector(positions, len(doc.nodes))

    # Nodes
    seen_trace_node: Optional[str] = None
    for ordinal, record in enumerate(doc.nodes):
        if record.id in positions:
            collector.violations.append(Violation(
                DUPLICATE_NODE_ID, Severity.ERROR,
                f"node id {record.id!r} repeated at position {ordinal}",
                (record.id,), (ordinal,),
            ))
            continue
        positions[record.id] = ordinal

        label = parse_node_label(record.label)
        labels[record.id] = label
        if label is None:
            collector.add(UNKNOWN_NODE_LABEL, Severity.ERROR,
                          f"unknown node label {record.label!r}", record.id)
        elif label is NodeLabel.CONTEXT:
            if seen_trace_node is not None:
                collector.add(CONTEXT_PREFIX, Severity.ERROR,
                              "context node after a trace node", record.id, seen_trace_node)
        elif seen_trace_node is None:
            seen_trace_node = record.id

        if not record.text.strip():
            collector.add(EMPTY_TEXT, Severity.WARNING, "node text is empty", record.id)

    # Conclusion run must be one interval of ordinals
    conclusions = [nid for nid, lab in labels.items() if lab is NodeLabel.CONCLUSION]
    if conclusions:
        ordinals = [positions[c] for c in conclusions]
        if max(ordinals) - min(ordinals) + 1 != len(ordinals):
            collector.add(CONCLUSION_CONTIGUITY, Severity.ERROR,
                          "conclusion not contiguous", *conclusions)

    # Edges
    triples: Set[Tuple[str, str, str]] = set()
    pair_labels: Dict[Tuple[str, str], Set[str]] = {}
    for record in doc.edges:
        src, dst = record.src, record.dst
        if parse_edge_label(record.label) is None:
            collector.add(UNKNOWN_EDGE_LABEL, Severity.ERROR,
                          f"unknown edge label {record.label!r}", src, dst)

        missing = [i for i in (src, dst) if i not in positions]
        if missing:
            collector.add(DANGLING_EDGE, Severity.ERROR,
                          f"edge endpoint not found: {', '.join(missing)}", src, dst)
            continue

        if src == dst:
            collector.add(SELF_LOOP, Severity.ERROR, "edge is a self-loop", src)
            continue
        if positions[src] > positions[dst]:
            collector.add(EDGE_DIRECTION, Severity.ERROR,
                          "left-to-right violated: edge points to an earlier node", src, dst)

        if labels.get(dst) is NodeLabel.CONTEXT:
            if labels.get(src) is NodeLabel.CONTEXT and strictness is Strictness.LENIENT:
                collector.add(CONTEXT_INTERNAL_EDGE, Severity.WARNING,
                              "edge between two context nodes", src, dst)
            else:
                collector.add(CONTEXT_INCOMING_EDGE, Severity.ERROR,
                              "incoming edge to a context node", src, dst)

        triple = (src, dst, record.label)
        if triple in triples:
            collector.add(DUPLICATE_EDGE, Severity.WARNING,
                          f"duplicate {record.label} edge collapsed", src, dst)
            continue
        triples.add(triple)

        known = pair_labels.setdefault((src, dst), set())
        known.add(record.label)
        if len(known) == 2:
            collector.add(MULTI_LABEL_PAIR, Severity.WARNING,
                          "node pair connected by edges with different labels", src, dst)

    report = collector.report()
    logger.debug("Structural check: %s", report.summary())
    return report


# Endpoint-compatibility matrix: edge label -> (required src labels, required dst labels).
# None means unconstrained.
_PLANNING = frozenset({NodeLabel.PLANNING})
_ENDPOINTS: Dict[EdgeLabel, Tuple[Optional[frozenset], Optional[frozenset], str]] = {
    EdgeLabel.FRONTIER_PLAN: (None, _PLANNING, "must end at planning node"),
    EdgeLabel.FRONTIER_VERIFY: (None, _PLANNING, "must end at planning node"),
    EdgeLabel.PLAN_SUBPLAN: (_PLANNING, _PLANNING, "must connect two planning nodes"),
    EdgeLabel.PLAN_NEXT_PLAN: (_PLANNING, _PLANNING, "must connect two planning nodes"),
    EdgeLabel.PLAN_ALTERNATIVE: (_PLANNING, _PLANNING, "must connect two planning nodes"),
    EdgeLabel.PLAN_STEP: (_PLANNING, None, "must start at planning node"),
    EdgeLabel.RESTATEMENT: (None, frozenset({NodeLabel.RESTATEMENT}),
                            "must end at restatement node"),
    EdgeLabel.CONCEPT_EXAMPLE: (None, frozenset({NodeLabel.EXAMPLE}),
                                "must end at example node"),
    EdgeLabel.FACT_DETAIL: (frozenset({NodeLabel.FACT}), frozenset({NodeLabel.FACT}),
                            "must connect two fact nodes"),
}


def validate_labels(graph: "FlowGraph", strictness: Optional[Strictness] = None) -> ValidationReport:
    """
    Check every edge against the endpoint-compatibility matrix.

    Args:
        graph: A constructed FlowGraph
        strictness: Grading mode; defaults to the mode the graph was built with

    Returns:
        ValidationReport with one finding per incompatible edge
    """
    mode = strictness or graph.strictness
    severity = mode.grade()
    collector = _Collector({n.id: n.ordinal for n in graph.nodes}, len(graph.nodes))

    for edge in graph.edges:
        src_label = graph.node(edge.src).label
        dst_label = graph.node(edge.dst).label

        if (edge.label is EdgeLabel.CONCEPT_EXAMPLE
                and src_label is NodeLabel.FACT and dst_label is NodeLabel.FACT):
            collector.add(CONCEPT_EXAMPLE_FACTS, severity,
                          "concept-example edge between two fact nodes should be fact-detail",
                          edge.src, edge.dst)
            continue

        rule = _ENDPOINTS.get(edge.label)
        if rule is None:
            continue
        src_ok, dst_ok, requirement = rule
        if (src_ok is not None and src_label not in src_ok) or \
                (dst_ok is not None and dst_label not in dst_ok):
            collector.add(endpoint_rule(edge.label), severity,
                          f"{edge.label.value} edge {requirement}", edge.src, edge.dst)

    return collector.report()
