"""
ReasoningFlow graph toolkit

Main entry point for the command-line interface.
Validates annotation graphs, runs queries and pattern detection, computes
corpus statistics, compresses traces and exports graphs.

    python -m src.main validate graphs/*.rfg.json --strict
"""
import argparse
import csv
import io
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from enum import IntEnum
from typing import List, Optional, Sequence, Tuple, Union

from .analysis import ReportFormat, corpus_stats, report, round_half_up
from .config import ToolkitConfig, build_config
from .document import read_document, save_document
from .errors import (
    CompressionError,
    ConfigError,
    DocumentError,
    ExportError,
    GraphValidationError,
    QueryError,
    StatsError,
    UnknownNodeError,
)
from .export import export_dot, export_facts
from .graph import FlowGraph, build_graph, load_graph
from .labels import NodeLabel
from .patterns import PatternLibrary, detect
from .query_engine import MatchSet, evaluate
from .query_parser import parse_query
from .traversal import ContextMode, compress_to_conclusion, evaluation_context, unnecessary_nodes
from .validation import Strictness, ValidationReport, validate_labels

logger = logging.getLogger(__name__)


class ExitStatus(IntEnum):
    OK = 0
    INPUT_ERROR = 1  # validation or detection input errors
    USAGE_ERROR = 2  # usage or parse errors


def _plural(count: int, word: str) -> str:
    return f"{count} {word}" if count == 1 else f"{count} {word}es"


def _validate_file(path: str, strictness: Strictness) -> Tuple[Optional[ValidationReport], str]:
    """
    Full validation of one file.

    Returns:
        (report, "") on success, (None, error message) if the file cannot be read or parsed
    """
    try:
        doc = read_document(path)
    except (OSError, DocumentError) as e:
        return None, str(e)

    result = build_graph(doc, strictness)
    if isinstance(result, ValidationReport):
        return result, ""
    return result.warnings.merge(validate_labels(result, strictness)), ""


def cmd_validate(args: argparse.Namespace, config: ToolkitConfig) -> ExitStatus:
    """
    Validate each file and print its report.

    Exit 1 if any file has an error-severity violation, 2 if a file cannot
    be read or parsed.
    """
    status = ExitStatus.OK
    for path in args.paths:
        result, problem = _validate_file(path, config.strictness)
        if result is None:
            logger.error("%s: %s", path, problem)
            status = ExitStatus.USAGE_ERROR
            continue

        print(path)
        for violation in result.violations:
            print(f"  {violation.render()}")
        print(f"  {result.summary()}")
        if result.errors and status is ExitStatus.OK:
            status = ExitStatus.INPUT_ERROR
    return status


def _render_matches(match_sets: Sequence[MatchSet], out: str) -> str:
    if out == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        for match_set in match_sets:
            for row in match_set:
                writer.writerow([match_set.predicate, *row])
        return buffer.getvalue()

    lines: List[str] = []
    for match_set in match_sets:
        lines.append(f"{match_set.predicate}/{match_set.arity}: {_plural(len(match_set), 'match')}")
        lines.extend(",".join(str(v) for v in row) for row in match_set)
    return "".join(line + "\n" for line in lines)


def cmd_query(args: argparse.Namespace, config: ToolkitConfig) -> ExitStatus:
    """Evaluate a rules file against a graph and print one block per derived predicate."""
    graph = load_graph(args.graph, config.strictness)
    with open(args.rules, "r", encoding="utf-8") as f:
        program = parse_query(f.read())
    sys.stdout.write(_render_matches(evaluate(program, graph), args.out))
    return ExitStatus.OK


def cmd_detect(args: argparse.Namespace, config: ToolkitConfig) -> ExitStatus:
    """Run one named pattern, or all of them, and print role-labeled matches."""
    library = PatternLibrary()
    if args.pattern and library.get(args.pattern) is None:
        logger.error("Unknown pattern %r; available: %s",
                     args.pattern, ", ".join(library.get_names()))
        return ExitStatus.USAGE_ERROR

    graph = load_graph(args.graph, config.strictness)
    if args.all:
        results = library.detect_all(graph)
    else:
        results = [detect(library.get(args.pattern), graph)]

    for result in results:
        print(f"{result.pattern}: {_plural(len(result), 'match')}")
        for match in result.annotated():
            print("  " + ", ".join(f"{role}={value}" for role, value in match))
    return ExitStatus.OK


def _try_load(path: str, strictness: Strictness) -> Union[FlowGraph, str]:
    try:
        return load_graph(path, strictness)
    except GraphValidationError as e:
        return f"{e} ({', '.join(sorted(set(e.report.rule_ids())))})"
    except (OSError, DocumentError) as e:
        return str(e)


def cmd_stats(args: argparse.Namespace, config: ToolkitConfig) -> ExitStatus:
    """
    Aggregate statistics over all valid files; invalid files are skipped
    with a warning.
    """
    with ThreadPoolExecutor(max_workers=config.stats_workers) as pool:
        loaded = list(pool.map(lambda p: _try_load(p, config.strictness), args.paths))

    graphs = []
    for path, result in zip(args.paths, loaded):
        if isinstance(result, FlowGraph):
            graphs.append(result)
        else:
            logger.warning("Skipping %s: %s", path, result)

    if not graphs:
        raise StatsError("No valid graph among the given files")

    stats = corpus_stats(graphs)
    fmt = ReportFormat.CSV if args.csv else ReportFormat.TEXT
    sys.stdout.write(report(stats, fmt, top_k=config.stats_top_k))
    return ExitStatus.OK


def cmd_compress(args: argparse.Namespace, config: ToolkitConfig) -> ExitStatus:
    """Write the conclusion-ancestor subgraph to --out and print the kept ratio."""
    graph = load_graph(args.graph, config.strictness)
    dropped = unnecessary_nodes(graph)
    compressed, ratio = compress_to_conclusion(graph)
    save_document(compressed.to_document(), args.out)

    print(f"dropped {len(dropped)} of {len(graph.nodes)} nodes", file=sys.stderr)
    print(f"ratio {round_half_up(ratio, 3)}")
    return ExitStatus.OK


def cmd_export(args: argparse.Namespace, config: ToolkitConfig) -> ExitStatus:
    """Print the graph as facts or DOT."""
    graph = load_graph(args.graph, config.strictness)
    if args.format == "facts":
        sys.stdout.write(export_facts(graph))
    else:
        sys.stdout.write(export_dot(graph, config.color_by_label, config.dot_label_width))
    return ExitStatus.OK


def cmd_context(args: argparse.Namespace, config: ToolkitConfig) -> ExitStatus:
    """
    Print the evaluation context of a node: predecessor ids and text in
    order, one line per node with whitespace runs in the text collapsed.
    """
    graph = load_graph(args.graph, config.strictness)
    mode = ContextMode.CLOSURE if args.closure else ContextMode.DIRECT
    skipped = [NodeLabel(label) for label in args.skip_label or []]
    for node_id in evaluation_context(graph, args.node_id, mode, skipped):
        node = graph.node(node_id)
        print(f"{node.id}\t{' '.join(node.text.split())}")
    return ExitStatus.OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reasoning-flow",
        description="Validate, query and analyze ReasoningFlow annotation graphs.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="More diagnostics on standard error (-v info, -vv debug)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="Check annotation files against the schema")
    p.add_argument("paths", nargs="+")
    p.add_argument("--strict", action="store_true",
                   help="Treat endpoint-compatibility findings as errors")
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("query", help="Evaluate a rules file against a graph")
    p.add_argument("graph")
    p.add_argument("--rules", required=True, help="Query file (.flowq)")
    p.add_argument("--out", choices=["table", "csv"], default="table")
    p.set_defaults(handler=cmd_query)

    p = sub.add_parser("detect", help="Detect built-in reasoning patterns")
    p.add_argument("graph")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--pattern", help="Pattern name")
    group.add_argument("--all", action="store_true", help="Run every pattern")
    p.set_defaults(handler=cmd_detect)

    p = sub.add_parser("stats", help="Corpus statistics")
    p.add_argument("paths", nargs="+")
    p.add_argument("--csv", action="store_true", help="CSV output (label,category,count,percent)")
    p.set_defaults(handler=cmd_stats)

    p = sub.add_parser("compress", help="Keep only the conclusion's ancestors")
    p.add_argument("graph")
    p.add_argument("--out", required=True, help="Path of the compressed annotation file")
    p.set_defaults(handler=cmd_compress)

    p = sub.add_parser("export", help="Export a graph as facts or DOT")
    p.add_argument("graph")
    p.add_argument("--format", choices=["dot", "facts"], required=True)
    p.add_argument("--no-color", action="store_true", help="DOT without label colors")
    p.set_defaults(handler=cmd_export)

    p = sub.add_parser("context", help="Evaluation context of a node")
    p.add_argument("graph")
    p.add_argument("node_id")
    p.add_argument("--closure", action="store_true", help="All ancestors instead of direct predecessors")
    p.add_argument("--skip-label", action="append", choices=[label.value for label in NodeLabel],
                   help="Leave out nodes with this label (repeatable)")
    p.set_defaults(handler=cmd_context)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s", force=True)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Application entry point.

    Args:
        argv: Command-line arguments (defaults to sys.argv[1:])

    Returns:
        Exit status: 0 success, 1 input errors, 2 usage or parse errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    _configure_logging(args.verbose)

    try:
        config = build_config(
            strictness=Strictness.STRICT if getattr(args, "strict", False) else None,
            color_by_label=False if getattr(args, "no_color", False) else None,
        )
        return int(args.handler(args, config))
    except GraphValidationError as e:
        logger.error("%s", e)
        for violation in e.report.errors:
            logger.error("  %s", violation.render())
        return ExitStatus.INPUT_ERROR
    except (UnknownNodeError, CompressionError, ExportError, StatsError) as e:
        logger.error("%s", e)
        return ExitStatus.INPUT_ERROR
    except (OSError, DocumentError, QueryError, ConfigError) as e:
        logger.error("%s", e)
        return ExitStatus.USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
