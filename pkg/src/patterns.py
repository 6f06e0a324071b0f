"""
Pattern library: named query programs for reasoning patterns, with a
uniform detection interface.

The built-in programs live in src/queries/*.flowq so that external
grounders can run them against exported facts.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import QueryError
from .graph import FlowGraph
from .query_engine import FactBase, MatchSet, evaluate_facts, ground_facts
from .query_parser import QueryProgram, Variable, parse_query

logger = logging.getLogger(__name__)

QUERY_DIR = Path(__file__).parent / "queries"
QUERY_SUFFIX = ".flowq"


@dataclass(frozen=True)
class PatternDef:
    """
    A named reasoning pattern.

    Attributes:
        name: Pattern name (kebab-case); the program's reported predicate is
            the same name with underscores
        description: One-line description
        program: Query program defining the pattern
        roles: (variable name, role label) per head argument, in order
    """
    name: str
    description: str
    program: QueryProgram
    roles: Tuple[Tuple[str, str], ...]

    def __post_init__(self):
        rules = self.program.rules_for(self.predicate)
        if not rules:
            raise QueryError(f"pattern {self.name!r} defines no {self.predicate} rule")
        for rule in rules:
            head_vars = [a.name if isinstance(a, Variable) else None for a in rule.head.args]
            if head_vars != [var for var, _ in self.roles]:
                raise QueryError(
                    f"pattern {self.name!r}: roles {[v for v, _ in self.roles]} "
                    f"do not match head {rule.head}"
                )

    @property
    def predicate(self) -> str:
        return self.name.replace("-", "_")

    @property
    def role_labels(self) -> Tuple[str, ...]:
        return tuple(label for _, label in self.roles)


@dataclass(frozen=True)
class DetectionResult:
    """
    Matches of one pattern in one graph.

    Attributes:
        pattern: Pattern name
        roles: Role label per tuple position
        matches: Matching tuples, deterministically ordered
    """
    pattern: str
    roles: Tuple[str, ...]
    matches: MatchSet

    def __len__(self) -> int:
        return len(self.matches)

    def annotated(self) -> List[Tuple[Tuple[str, str], ...]]:
        """Each match as ((role label, node id), ...) pairs."""
        return [tuple(zip(self.roles, match)) for match in self.matches]


def load_pattern(
    name: str,
    description: str,
    roles: Sequence[Tuple[str, str]],
    source: Union[str, Path],
) -> PatternDef:
    """
    Build a pattern from query text or a .flowq file.

    Args:
        name: Pattern name
        description: One-line description
        roles: (variable, role label) pairs in head order
        source: Program text, or a Path to a query file

    Raises:
        QueryParseError: If the program does not parse
        QueryError: If the program is invalid or does not fit the roles
    """
    text = source.read_text(encoding="utf-8") if isinstance(source, Path) else source
    return PatternDef(name, description, parse_query(text), tuple(roles))


_BUILTIN_SPECS = [
    ("verification",
     "A frontier-verify plan leads to a verdict that supports or refutes the verified node",
     [("X", "verified node"), ("Y", "verification plan"), ("Z", "verdict")]),
    ("deductive-chain",
     "Two consecutive premise-conclusion steps",
     [("X", "premise"), ("Y", "intermediate conclusion"), ("Z", "conclusion")]),
    ("inductive-reasoning",
     "A concept illustrated by an example that feeds a generalization",
     [("C", "concept"), ("E", "example"), ("G", "generalization")]),
    ("proof-by-contradiction",
     "Reasoning under an assumption ends by refuting the assumption",
     [("A", "assumption"), ("R", "refutation")]),
    ("backtracking",
     "A plan is abandoned for an alternative plan",
     [("P", "abandoned plan"), ("Q", "alternative plan")]),
    ("correction",
     "A node corrects an earlier node",
     [("X", "corrected node"), ("Y", "correction")]),
    ("doubt",
     "A reflection expresses uncertainty about an earlier node",
     [("X", "doubted node"), ("R", "reflection")]),
    ("case-analysis",
     "A plan branches into two assumption cases",
     [("P", "plan"), ("A", "first case"), ("B", "second case")]),
]


def builtin_patterns() -> List[PatternDef]:
    """
    Load the shipped reasoning patterns.

    Each rule set is one formalization of its pattern and may be revised.
    Users can override any of them with their own query files.

    Returns:
        PatternDefs in a fixed order
    """
    patterns = []
    for name, description, roles in _BUILTIN_SPECS:
        path = QUERY_DIR / f"{name.replace('-', '_')}{QUERY_SUFFIX}"
        patterns.append(load_pattern(name, description, roles, path))
    return patterns


def detect(pattern: PatternDef, graph: FlowGraph, facts: Optional[FactBase] = None) -> DetectionResult:
    """
    Find all occurrences of a pattern in a graph.

    Args:
        pattern: The pattern
        graph: The graph to search
        facts: Pre-grounded facts of graph (grounded on demand if omitted)

    Returns:
        DetectionResult with role-annotated matches
    """
    if facts is None:
        facts = ground_facts(graph)
    results = evaluate_facts(pattern.program, facts)
    matches = next(m for m in results if m.predicate == pattern.predicate)
    logger.debug("Pattern %s: %d match(es)", pattern.name, len(matches))
    return DetectionResult(pattern.name, pattern.role_labels, matches)


class PatternLibrary:
    """
    Named collection of patterns.

    Starts with the built-in patterns; patterns added later replace
    same-named ones.
    """

    def __init__(self, patterns: Optional[Iterable[PatternDef]] = None):
        """
        Args:
            patterns: Initial patterns (defaults to builtin_patterns())
        """
        self._patterns: Dict[str, PatternDef] = {}
        for pattern in builtin_patterns() if patterns is None else patterns:
            self.add_pattern(pattern)

    def add_pattern(self, pattern: PatternDef) -> bool:
        """
        Add or replace a pattern.

        Returns:
            True if a pattern with the same name was replaced
        """
        replaced = pattern.name in self._patterns
        if replaced:
            logger.info("Pattern %s overridden", pattern.name)
        self._patterns[pattern.name] = pattern
        return replaced

    def get(self, name: str) -> Optional[PatternDef]:
        return self._patterns.get(name)

    def get_names(self) -> List[str]:
        return list(self._patterns)

    def detect_all(self, graph: FlowGraph) -> List[DetectionResult]:
        """Run every pattern over the graph, grounding its facts once."""
        facts = ground_facts(graph)
        return [detect(p, graph, facts) for p in self._patterns.values()]
