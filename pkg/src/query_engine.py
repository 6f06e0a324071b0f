"""
Bottom-up evaluation of query programs against a graph's fact base.
"""
import logging
import operator
from dataclasses import dataclass
from types import MappingProxyType
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple, Union

from .errors import QueryError
from .graph import FlowGraph
from .query_parser import (
    BUILTIN_SIGNATURES,
    Atom,
    Comparison,
    QueryProgram,
    Rule,
    Term,
    Variable,
    build_program,
)

logger = logging.getLogger(__name__)

Binding = Dict[str, Union[str, int]]

_COMPARE: Dict[str, Callable[[object, object], bool]] = {
    "==": operator.eq,
    "!=": operator.ne,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}


@dataclass(frozen=True)
class FactBase:
    """Immutable ground relations keyed by predicate name."""
    relations: Mapping[str, FrozenSet[tuple]]

    def __getitem__(self, predicate: str) -> FrozenSet[tuple]:
        return self.relations.get(predicate, frozenset())

    def base_relation(self) -> Dict[str, FrozenSet[tuple]]:
        """The node/2 and edge/3 facts (what export_facts writes)."""
        return {"node": self["node"], "edge": self["edge"]}


def _sort_key(values: tuple) -> tuple:
    return tuple(str(v) for v in values), tuple(type(v).__name__ for v in values)


@dataclass(frozen=True)
class MatchSet:
    """
    Deduplicated tuples of one derived predicate, sorted by rendered constants.
    """
    predicate: str
    arity: int
    tuples: Tuple[tuple, ...]

    @classmethod
    def of(cls, predicate: str, arity: int, tuples: Iterable[tuple]) -> "MatchSet":
        return cls(predicate, arity, tuple(sorted(set(tuples), key=_sort_key)))

    def __len__(self) -> int:
        return len(self.tuples)

    def __iter__(self) -> Iterator[tuple]:
        return iter(self.tuples)

    def __contains__(self, item: object) -> bool:
        return item in self.tuples

    def as_set(self) -> Set[tuple]:
        return set(self.tuples)


class Relation:
    """A mutable tuple set with hash indexes built on demand per bound-position set."""

    def __init__(self, tuples: Iterable[tuple] = ()):
        self.tuples: Set[tuple] = set(tuples)
        self._indexes: Dict[Tuple[int, ...], Dict[tuple, List[tuple]]] = {}

    def add_all(self, tuples: Iterable[tuple]) -> None:
        self.tuples.update(tuples)
        self._indexes.clear()

    def lookup(self, positions: Tuple[int, ...], key: tuple) -> Iterable[tuple]:
        if not positions:
            return self.tuples
        index = self._indexes.get(positions)
        if index is None:
            index = {}
            for tup in self.tuples:
                index.setdefault(tuple(tup[p] for p in positions), []).append(tup)
            self._indexes[positions] = index
        return index.get(key, ())


def ground_facts(graph: FlowGraph) -> FactBase:
    """
    Materialize the built-in relations of a graph.

    Returns:
        FactBase with node/2, edge/3, connected/2 (irreflexive reachability),
        distance/3 (reachable pairs only, including distance(x, x, 0)) and order/2
    """
    relations = {
        "node": frozenset((n.id, n.label.value) for n in graph.nodes),
        "edge": frozenset((e.src, e.dst, e.label.value) for e in graph.edges),
        "connected": frozenset(
            (x, y) for x, reachable in graph.reach.items() for y in reachable
        ),
        "distance": frozenset(
            (x, y, d) for x, lengths in graph.dist.items() for y, d in lengths.items()
        ),
        "order": frozenset((n.id, n.ordinal) for n in graph.nodes),
    }
    return FactBase(MappingProxyType(relations))


def _value(term: Term, binding: Binding):
    return binding[term.name] if isinstance(term, Variable) else term.value


def _compare(lit: Comparison, binding: Binding) -> bool:
    left, right = _value(lit.left, binding), _value(lit.right, binding)
    if type(left) is not type(right):
        return False
    return _COMPARE[lit.op](left, right)


class _Step:
    """One join step: match an atom, then apply the filters it makes checkable."""

    def __init__(self, atom: Atom, use_delta: bool, filters: List):
        self.atom = atom
        self.use_delta = use_delta
        self.filters = filters


def _plan(rule: Rule, delta_index: Optional[int]) -> Tuple[List[Comparison], List[_Step]]:
    """
    Order positive atoms greedily: the delta atom first, then whichever atom has
    the most bound arguments. Filters run as soon as their variables are bound.
    """
    atoms = [(i, lit) for i, lit in enumerate(rule.body)
             if isinstance(lit, Atom) and not lit.negated]
    filters = [lit for lit in rule.body
               if isinstance(lit, Comparison) or (isinstance(lit, Atom) and lit.negated)]

    def bound_args(atom: Atom, bound: Set[str]) -> int:
        return sum(1 for a in atom.args if not isinstance(a, Variable) or a.name in bound)

    # Filters with no variables are checked before any join.
    pending = [f for f in filters if f.variables()]
    upfront = [f for f in filters if not f.variables()]

    bound: Set[str] = set()
    steps: List[_Step] = []
    remaining = list(atoms)
    while remaining:
        if delta_index is not None and not steps:
            choice = next(item for item in remaining if item[0] == delta_index)
        else:
            choice = max(remaining, key=lambda item: (bound_args(item[1], bound), -item[0]))
        remaining.remove(choice)
        index, atom = choice
        bound |= atom.variables()
        ready = [f for f in pending if f.variables() <= bound]
        pending = [f for f in pending if f not in ready]
        steps.append(_Step(atom, index == delta_index, ready))
    return upfront, steps


def _match(atom: Atom, relation: Relation, binding: Binding) -> Iterator[Binding]:
    positions: List[int] = []
    key: List[object] = []
    for pos, term in enumerate(atom.args):
        if not isinstance(term, Variable):
            positions.append(pos)
            key.append(term.value)
        elif term.name in binding:
            positions.append(pos)
            key.append(binding[term.name])

    for tup in relation.lookup(tuple(positions), tuple(key)):
        extended = dict(binding)
        consistent = True
        for pos, term in enumerate(atom.args):
            if isinstance(term, Variable):
                seen = extended.setdefault(term.name, tup[pos])
                if seen != tup[pos] or type(seen) is not type(tup[pos]):
                    consistent = False
                    break
        if consistent:
            yield extended


def _passes(lit, binding: Binding, relations: Dict[str, Relation]) -> bool:
    if isinstance(lit, Comparison):
        return _compare(lit, binding)
    ground = tuple(_value(t, binding) for t in lit.args)
    return ground not in relations[lit.predicate].tuples


def _fire(
    rule: Rule,
    relations: Dict[str, Relation],
    delta_index: Optional[int] = None,
    delta: Optional[Relation] = None,
) -> Iterator[tuple]:
    """Yield head tuples derivable by one application of rule."""
    upfront, steps = _plan(rule, delta_index)
    if not all(_passes(f, {}, relations) for f in upfront):
        return

    def join(depth: int, binding: Binding) -> Iterator[Binding]:
        if depth == len(steps):
            yield binding
            return
        step = steps[depth]
        relation = delta if step.use_delta else relations[step.atom.predicate]
        for extended in _match(step.atom, relation, binding):
            if all(_passes(f, extended, relations) for f in step.filters):
                yield from join(depth + 1, extended)

    for binding in join(0, {}):
        yield tuple(_value(t, binding) for t in rule.head.args)


def _evaluate_stratum(
    program: QueryProgram,
    stratum: Sequence[str],
    relations: Dict[str, Relation],
    semi_naive: bool,
) -> None:
    members = set(stratum)
    rules = [r for r in program.rules if r.head.predicate in members]

    def fresh(tuples: Iterable[tuple], predicate: str, into: Dict[str, Set[tuple]]) -> None:
        known = relations[predicate].tuples
        into[predicate].update(t for t in tuples if t not in known)

    delta: Dict[str, Set[tuple]] = {p: set() for p in stratum}
    for rule in rules:
        fresh(_fire(rule, relations), rule.head.predicate, delta)
    for predicate, tuples in delta.items():
        relations[predicate].add_all(tuples)

    iteration = 1
    while any(delta.values()):
        new: Dict[str, Set[tuple]] = {p: set() for p in stratum}
        if semi_naive:
            delta_relations = {p: Relation(t) for p, t in delta.items()}
            for rule in rules:
                for index, lit in enumerate(rule.body):
                    if isinstance(lit, Atom) and not lit.negated and lit.predicate in members:
                        derived = _fire(rule, relations, index, delta_relations[lit.predicate])
                        fresh(derived, rule.head.predicate, new)
        else:
            for rule in rules:
                fresh(_fire(rule, relations), rule.head.predicate, new)

        for predicate, tuples in new.items():
            relations[predicate].add_all(tuples)
        delta = new
        iteration += 1

    logger.debug("Stratum %s reached fixpoint after %d iteration(s)", list(stratum), iteration)


def evaluate_facts(
    program: QueryProgram,
    facts: FactBase,
    semi_naive: bool = True,
) -> List[MatchSet]:
    """
    Compute the least model of a program over a fact base.

    Args:
        program: Checked query program
        facts: Ground built-in relations
        semi_naive: Use semi-naive iteration (False runs naive iteration)

    Returns:
        One MatchSet per derived predicate, in order of first definition
    """
    relations: Dict[str, Relation] = {p: Relation(facts[p]) for p in BUILTIN_SIGNATURES}
    for predicate in program.derived_predicates:
        relations[predicate] = Relation()

    for stratum in program.strata:
        _evaluate_stratum(program, stratum, relations, semi_naive)

    return [
        MatchSet.of(p, program.arity_of(p), relations[p].tuples)
        for p in program.derived_predicates
    ]


def evaluate(program: QueryProgram, graph: FlowGraph, semi_naive: bool = True) -> List[MatchSet]:
    """
    Evaluate a program against a graph.

    Args:
        program: Checked query program
        graph: The graph to query
        semi_naive: Use semi-naive iteration (False runs naive iteration)

    Returns:
        One MatchSet per derived predicate, in order of first definition
    """
    return evaluate_facts(program, ground_facts(graph), semi_naive)


def evaluate_with_disjunction(
    rules: Union[QueryProgram, Iterable[Rule]],
    graph: FlowGraph,
) -> MatchSet:
    """
    Evaluate alternative rules for one head predicate (union semantics).

    Args:
        rules: Rules that all define the same head predicate
        graph: The graph to query

    Returns:
        MatchSet of the shared head predicate

    Raises:
        QueryError: If the rules define different predicates or arities
    """
    rules = list(rules.rules if isinstance(rules, QueryProgram) else rules)
    if not rules:
        raise QueryError("no rules given")

    heads = {r.head.predicate for r in rules}
    if len(heads) > 1:
        raise QueryError(f"rules define different head predicates: {', '.join(sorted(heads))}")
    arities = {r.head.arity for r in rules}
    if len(arities) > 1:
        raise QueryError(
            f"arity mismatch across rules for {rules[0].head.predicate}: "
            f"{', '.join(str(a) for a in sorted(arities))}"
        )

    return evaluate(build_program(rules), graph)[0]
