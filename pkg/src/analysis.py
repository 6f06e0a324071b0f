"""
Corpus statistics: label distributions, node counts per graph and edge
category rollups.

Context nodes are input, not generated trace, so they are excluded from
node counts and the node label histogram.
"""
import csv
import io
import logging
from collections import Counter
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .errors import StatsError
from .graph import FlowGraph
from .labels import EDGE_CATEGORIES, EdgeCategory, EdgeLabel, NodeLabel

logger = logging.getLogger(__name__)

CSV_HEADER = ["label", "category", "count", "percent"]
NODE_CATEGORY = "node"
HEADER_NOTE = "context nodes excluded from node counts and node label distribution"
# Per-domain bucket for graphs whose meta has no "domain".
NO_DOMAIN = "(no domain)"

# Node labels that count as generated trace.
TRACE_NODE_LABELS = [label for label in NodeLabel if label is not NodeLabel.CONTEXT]


class ReportFormat(str, Enum):
    TEXT = "text-table"
    CSV = "csv"


@dataclass(frozen=True)
class CorpusStats:
    """
    Aggregated counts over a corpus of graphs. Percentages and means are
    derived exactly and rounded only when rendered.
    """
    graph_count: int
    node_counts: Mapping[NodeLabel, int]
    edge_counts: Mapping[EdgeLabel, int]
    per_domain: Mapping[str, "CorpusStats"] = field(default_factory=dict)

    @property
    def node_count(self) -> int:
        return sum(self.node_counts.values())

    @property
    def edge_count(self) -> int:
        return sum(self.edge_counts.values())

    @property
    def mean_nodes(self) -> Fraction:
        return Fraction(self.node_count, self.graph_count)

    @property
    def category_counts(self) -> Dict[EdgeCategory, int]:
        totals = {category: 0 for category in EdgeCategory}
        for label, count in self.edge_counts.items():
            totals[EDGE_CATEGORIES[label]] += count
        return totals

    def node_share(self, label: NodeLabel) -> Fraction:
        return _share(self.node_counts[label], self.node_count)

    def edge_share(self, label: EdgeLabel) -> Fraction:
        return _share(self.edge_counts[label], self.edge_count)

    def category_share(self, category: EdgeCategory) -> Fraction:
        return _share(self.category_counts[category], self.edge_count)

    def top_node_labels(self, k: int) -> Tuple[List[NodeLabel], Fraction]:
        """
        The k most frequent node labels and their combined share.

        Ties are broken by label order.
        """
        ranked = sorted(TRACE_NODE_LABELS, key=lambda lab: -self.node_counts[lab])[:k]
        combined = sum(self.node_counts[lab] for lab in ranked)
        return ranked, _share(combined, self.node_count)


def _share(count: int, total: int) -> Fraction:
    """Percentage as an exact fraction (0 for an empty total)."""
    return Fraction(100 * count, total) if total else Fraction(0)


def round_half_up(value: Fraction, places: int) -> str:
    """Render a fraction with a fixed number of decimals, rounding half up."""
    exact = Decimal(value.numerator) / Decimal(value.denominator)
    return str(exact.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP))


def _aggregate(graphs: Sequence[FlowGraph]) -> CorpusStats:
    node_counts: Counter = Counter()
    edge_counts: Counter = Counter()
    for graph in graphs:
        node_counts.update(n.label for n in graph.nodes if n.label is not NodeLabel.CONTEXT)
        edge_counts.update(e.label for e in graph.edges)
    return CorpusStats(
        graph_count=len(graphs),
        node_counts={label: node_counts[label] for label in TRACE_NODE_LABELS},
        edge_counts={label: edge_counts[label] for label in EdgeLabel},
    )


def corpus_stats(graphs: Iterable[FlowGraph]) -> CorpusStats:
    """
    Compute corpus statistics.

    Args:
        graphs: Graphs with their metadata; the "domain" meta key groups
            the per-domain breakdown. Once any graph names a domain, graphs
            without one are grouped under NO_DOMAIN (listed last) so the
            domain rows add up to the totals

    Returns:
        CorpusStats over all graphs

    Raises:
        StatsError: If the corpus is empty
    """
    graphs = list(graphs)
    if not graphs:
        raise StatsError("Cannot compute statistics of an empty corpus")

    domains: Dict[str, List[FlowGraph]] = {}
    unlabeled: List[FlowGraph] = []
    for graph in graphs:
        domain = graph.meta.get("domain")
        if domain:
            domains.setdefault(domain, []).append(graph)
        else:
            unlabeled.append(graph)

    overall = _aggregate(graphs)
    per_domain = {name: _aggregate(domains[name]) for name in sorted(domains)}
    if per_domain and unlabeled:
        per_domain[NO_DOMAIN] = _aggregate(unlabeled)
    logger.debug("Corpus: %d graphs, %d domains", len(graphs), len(per_domain))
    return CorpusStats(overall.graph_count, overall.node_counts, overall.edge_counts, per_domain)


def _label_rows(stats: CorpusStats) -> List[Tuple[str, str, int, str]]:
    rows = [
        (label.value, NODE_CATEGORY, stats.node_counts[label],
         round_half_up(stats.node_share(label), 1))
        for label in TRACE_NODE_LABELS
    ]
    rows.extend(
        (label.value, label.category.value, stats.edge_counts[label],
         round_half_up(stats.edge_share(label), 1))
        for label in EdgeLabel
    )
    return rows


def _render_csv(stats: CorpusStats) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(_label_rows(stats))
    return buffer.getvalue()


def _render_text(stats: CorpusStats, top_k: int) -> str:
    lines = [
        f"# Corpus statistics ({HEADER_NOTE})",
        f"graphs: {stats.graph_count}",
        f"nodes: {stats.node_count}",
        f"mean nodes per graph: {round_half_up(stats.mean_nodes, 2)}",
        f"edges: {stats.edge_count}",
        "",
        f"{'node label':<20}{'count':>8}{'percent':>10}",
    ]
    for label in TRACE_NODE_LABELS:
        lines.append(
            f"{label.value:<20}{stats.node_counts[label]:>8}"
            f"{round_half_up(stats.node_share(label), 1) + '%':>10}"
        )
    top, share = stats.top_node_labels(top_k)
    lines.append(
        f"top-{top_k} node labels ({', '.join(l.value for l in top)}): "
        f"{round_half_up(share, 1)}%"
    )

    lines.append("")
    lines.append(f"{'edge label':<20}{'category':<12}{'count':>8}{'percent':>10}")
    for label in EdgeLabel:
        lines.append(
            f"{label.value:<20}{label.category.value:<12}{stats.edge_counts[label]:>8}"
            f"{round_half_up(stats.edge_share(label), 1) + '%':>10}"
        )

    lines.append("")
    lines.append(f"{'edge category':<20}{'count':>8}{'percent':>10}")
    categories = stats.category_counts
    for category in EdgeCategory:
        lines.append(
            f"{category.value:<20}{categories[category]:>8}"
            f"{round_half_up(stats.category_share(category), 1) + '%':>10}"
        )

    if stats.per_domain:
        lines.append("")
        lines.append(f"{'domain':<20}{'graphs':>8}{'nodes':>8}{'mean':>10}{'edges':>8}")
        for name, domain in stats.per_domain.items():
            lines.append(
                f"{name:<20}{domain.graph_count:>8}{domain.node_count:>8}"
                f"{round_half_up(domain.mean_nodes, 2):>10}{domain.edge_count:>8}"
            )
    return "\n".join(lines) + "\n"


def report(stats: CorpusStats, format: ReportFormat = ReportFormat.TEXT, top_k: int = 4) -> str:
    """
    Render statistics.

    Args:
        stats: Computed statistics
        format: text-table or csv (header: label,category,count,percent)
        top_k: Number of labels in the combined top share (text only)

    Returns:
        Rendered text; identical for identical stats
    """
    if ReportFormat(format) is ReportFormat.CSV:
        return _render_csv(stats)
    return _render_text(stats, top_k)
