"""
Query language: Datalog rules with comparisons and negation of built-in
predicates over the graph predicates node/2, edge/3, connected/2,
distance/3 and order/2.

    verification(X, Y, Z) :- node(Y, "planning"), edge(X, Y, "frontier-verify"),
                             connected(Y, Z), edge(X, Z, "support").

"%" starts a line comment. Node ids and labels are string constants.
"""
import re
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

import networkx as nx
from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken

from .errors import QueryError, QueryParseError

STR = "string"
INT = "integer"

# Built-in predicates and their argument types. User rules cannot define them.
BUILTIN_SIGNATURES: Dict[str, Tuple[str, ...]] = {
    "node": (STR, STR),
    "edge": (STR, STR, STR),
    "connected": (STR, STR),
    "distance": (STR, STR, INT),
    "order": (STR, INT),
}

COMPARATORS = ("==", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class StringConst:
    value: str

    def __str__(self) -> str:
        escaped = self.value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'


@dataclass(frozen=True)
class IntConst:
    value: int

    def __str__(self) -> str:
        return str(self.value)


Term = Union[Variable, StringConst, IntConst]


@dataclass(frozen=True)
class Atom:
    """A predicate applied to terms, possibly negated (body only)."""
    predicate: str
    args: Tuple[Term, ...]
    negated: bool = False

    @property
    def arity(self) -> int:
        return len(self.args)

    def variables(self) -> Set[str]:
        return {a.name for a in self.args if isinstance(a, Variable)}

    def __str__(self) -> str:
        text = f"{self.predicate}({', '.join(str(a) for a in self.args)})"
        return f"not {text}" if self.negated else text


@dataclass(frozen=True)
class Comparison:
    """Binary comparison constraint between two terms."""
    op: str
    left: Term
    right: Term

    def variables(self) -> Set[str]:
        return {t.name for t in (self.left, self.right) if isinstance(t, Variable)}

    def __str__(self) -> str:
        return f"{self.left} {self.op} {self.right}"


Literal = Union[Atom, Comparison]


@dataclass(frozen=True)
class Rule:
    """head :- body."""
    head: Atom
    body: Tuple[Literal, ...]
    line: int = field(default=0, compare=False)

    def positive_atoms(self) -> List[Atom]:
        return [lit for lit in self.body if isinstance(lit, Atom) and not lit.negated]

    def __str__(self) -> str:
        return f"{self.head} :- {', '.join(str(lit) for lit in self.body)}."


@dataclass(frozen=True)
class QueryProgram:
    """
    A checked program.

    Attributes:
        rules: Rules in source order
        strata: Groups of mutually recursive derived predicates, in evaluation order
    """
    rules: Tuple[Rule, ...]
    strata: Tuple[Tuple[str, ...], ...]

    @property
    def derived_predicates(self) -> List[str]:
        """Derived predicates in order of first appearance as a rule head."""
        seen: List[str] = []
        for rule in self.rules:
            if rule.head.predicate not in seen:
                seen.append(rule.head.predicate)
        return seen

    def rules_for(self, predicate: str) -> List[Rule]:
        return [r for r in self.rules if r.head.predicate == predicate]

    def arity_of(self, predicate: str) -> int:
        return self.rules_for(predicate)[0].head.arity


_TERMINALS = r"""
    VARIABLE: /[A-Z][A-Za-z0-9_]*/
    IDENT: /[a-z][a-z0-9_\-]*/
    STRING: /"(?:[^"\\\n]|\\.)*"/
    INTEGER: /-?[0-9]+/
    COMMENT: /%[^\n]*/
    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

_QUERY_GRAMMAR = r"""
    program: rule+
    rule: atom ":-" body "."
    body: literal ("," literal)*
    literal: atom                   -> positive
           | "not" atom             -> negative
           | term COMPARATOR term   -> comparison
    atom: IDENT "(" term ("," term)* ")"
    term: VARIABLE  -> variable
        | STRING    -> string
        | INTEGER   -> integer
    COMPARATOR: "==" | "!=" | "<=" | ">=" | "<" | ">"
""" + _TERMINALS

_FACT_GRAMMAR = r"""
    facts: fact*
    fact: IDENT "(" constant ("," constant)* ")" "."
    constant: IDENT    -> symbol
            | STRING   -> string
            | INTEGER  -> integer
""" + _TERMINALS

_query_parser = Lark(_QUERY_GRAMMAR, start="program", parser="lalr", propagate_positions=True)
_fact_parser = Lark(_FACT_GRAMMAR, start="facts", parser="lalr")

_ESCAPE_RE = re.compile(r"\\(.)")
_ESCAPES = {"n": "\n", "t": "\t"}


def _unescape(token: str) -> str:
    return _ESCAPE_RE.sub(lambda m: _ESCAPES.get(m.group(1), m.group(1)), token[1:-1])


class _ProgramBuilder(Transformer):
    """Turns the parse tree into rule objects."""

    def variable(self, children):
        return Variable(str(children[0]))

    def string(self, children):
        return StringConst(_unescape(str(children[0])))

    def integer(self, children):
        return IntConst(int(children[0]))

    def atom(self, children):
        return Atom(str(children[0]), tuple(children[1:]))

    def positive(self, children):
        return children[0]

    def negative(self, children):
        return replace(children[0], negated=True)

    def comparison(self, children):
        return Comparison(str(children[1]), children[0], children[2])

    def body(self, children):
        return tuple(children)

    @v_args(meta=True)
    def rule(self, meta, children):
        return Rule(children[0], children[1], line=getattr(meta, "line", 0))

    def program(self, children):
        return list(children)


class _FactBuilder(Transformer):
    def symbol(self, children):
        return str(children[0])

    def string(self, children):
        return _unescape(str(children[0]))

    def integer(self, children):
        return int(children[0])

    def fact(self, children):
        return str(children[0]), tuple(children[1:])

    def facts(self, children):
        return list(children)


def _syntax_error(text: str, error: UnexpectedInput) -> QueryParseError:
    """Convert a lark error into a QueryParseError with a position."""
    line = getattr(error, "line", None)
    column = getattr(error, "column", None)
    if not line or line < 1:
        lines = text.split("\n")
        line, column = len(lines), len(lines[-1]) + 1

    if isinstance(error, UnexpectedToken):
        if error.token.type == "$END":
            message = "unexpected end of input"
        else:
            message = f"unexpected {error.token.value!r}"
        expected = sorted(e for e in error.expected if not e.startswith("__"))
        if expected:
            message += f" (expected one of: {', '.join(expected)})"
    elif isinstance(error, UnexpectedCharacters):
        message = f"unexpected character {text[error.pos_in_stream]!r}"
    elif isinstance(error, UnexpectedEOF):
        message = "unexpected end of input"
    else:
        message = str(error)
    return QueryParseError(message, line, column)


def parse_rules(text: str) -> List[Rule]:
    """
    Parse rule syntax without program-level checks.

    Raises:
        QueryParseError: On a syntax error (with line and column)
    """
    try:
        tree = _query_parser.parse(text)
    except UnexpectedInput as e:
        raise _syntax_error(text, e) from None
    return _ProgramBuilder().transform(tree)


def parse_query(text: str) -> QueryProgram:
    """
    Parse and check a query program.

    Args:
        text: Program source

    Returns:
        The checked QueryProgram

    Raises:
        QueryParseError: On a syntax error
        QueryError: On an unsafe rule, a reserved or undefined predicate, an
            arity or type mismatch, or a negated derived predicate
    """
    return build_program(parse_rules(text))


def read_facts(text: str) -> Dict[str, FrozenSet[tuple]]:
    """
    Read ground facts such as node(trace0, "restatement").

    Bare atoms and quoted strings both read as strings.

    Returns:
        Predicate name -> set of argument tuples

    Raises:
        QueryParseError: On a syntax error
    """
    try:
        tree = _fact_parser.parse(text)
    except UnexpectedInput as e:
        raise _syntax_error(text, e) from None

    relations: Dict[str, Set[tuple]] = {}
    for predicate, args in _FactBuilder().transform(tree):
        relations.setdefault(predicate, set()).add(args)
    return {p: frozenset(t) for p, t in relations.items()}


def _where(rule: Rule) -> str:
    return f"rule at line {rule.line}" if rule.line else f"rule '{rule}'"


def _check_arities(rules: Sequence[Rule]) -> None:
    arities: Dict[str, int] = {p: len(sig) for p, sig in BUILTIN_SIGNATURES.items()}
    for rule in rules:
        if rule.head.predicate in BUILTIN_SIGNATURES:
            raise QueryError(
                f"{_where(rule)}: predicate {rule.head.predicate!r} is built in and cannot be defined"
            )
        for atom in (rule.head, *[lit for lit in rule.body if isinstance(lit, Atom)]):
            expected = arities.setdefault(atom.predicate, atom.arity)
            if expected != atom.arity:
                raise QueryError(
                    f"{_where(rule)}: arity mismatch for {atom.predicate}: "
                    f"expected {expected}, got {atom.arity}"
                )

    derived = {r.head.predicate for r in rules}
    for rule in rules:
        for lit in rule.body:
            if not isinstance(lit, Atom):
                continue
            if lit.predicate not in derived and lit.predicate not in BUILTIN_SIGNATURES:
                raise QueryError(f"{_where(rule)}: undefined predicate {lit.predicate!r}")
            if lit.negated and lit.predicate in derived:
                raise QueryError(
                    f"{_where(rule)}: negation of derived predicate {lit.predicate!r}; "
                    "only built-in predicates can be negated"
                )


def _check_safety(rule: Rule) -> None:
    bound: Set[str] = set()
    for atom in rule.positive_atoms():
        bound |= atom.variables()

    needed = rule.head.variables()
    for lit in rule.body:
        if isinstance(lit, Comparison) or lit.negated:
            needed |= lit.variables()

    unbound = sorted(needed - bound)
    if unbound:
        raise QueryError(
            f"{_where(rule)}: unsafe rule, variable(s) {', '.join(unbound)} "
            "not bound by a positive body atom"
        )


def _const_type(term: Term) -> Optional[str]:
    if isinstance(term, StringConst):
        return STR
    if isinstance(term, IntConst):
        return INT
    return None


def _check_types(rule: Rule) -> None:
    var_types: Dict[str, Set[str]] = {}
    for lit in rule.body:
        if not isinstance(lit, Atom) or lit.predicate not in BUILTIN_SIGNATURES:
            continue
        for term, expected in zip(lit.args, BUILTIN_SIGNATURES[lit.predicate]):
            if isinstance(term, Variable):
                var_types.setdefault(term.name, set()).add(expected)
            elif _const_type(term) != expected:
                raise QueryError(
                    f"{_where(rule)}: {lit.predicate} expects {expected} where {term} is given"
                )

    for name, types in var_types.items():
        if len(types) > 1:
            raise QueryError(f"{_where(rule)}: variable {name} used as both string and integer")

    def type_of(term: Term) -> Optional[str]:
        if isinstance(term, Variable):
            types = var_types.get(term.name)
            return next(iter(types)) if types else None
        return _const_type(term)

    for lit in rule.body:
        if isinstance(lit, Comparison):
            left, right = type_of(lit.left), type_of(lit.right)
            if left and right and left != right:
                raise QueryError(f"{_where(rule)}: cannot compare {left} with {right} in '{lit}'")


def _stratify(rules: Sequence[Rule]) -> Tuple[Tuple[str, ...], ...]:
    """
    Group derived predicates into strata: mutually recursive predicates
    share a stratum, and every stratum comes after the ones it reads.
    """
    order: Dict[str, int] = {}
    for rule in rules:
        order.setdefault(rule.head.predicate, len(order))

    deps = nx.DiGraph()
    deps.add_nodes_from(order)
    for rule in rules:
        for atom in rule.positive_atoms():
            if atom.predicate in order:
                deps.add_edge(atom.predicate, rule.head.predicate)

    condensed = nx.condensation(deps)

    def first_seen(component: int) -> int:
        return min(order[p] for p in condensed.nodes[component]["members"])

    return tuple(
        tuple(sorted(condensed.nodes[c]["members"], key=order.__getitem__))
        for c in nx.lexicographical_topological_sort(condensed, key=first_seen)
    )


def build_program(rules: Iterable[Rule]) -> QueryProgram:
    """
    Check rules and assemble a QueryProgram.

    Raises:
        QueryError: If the rules are empty, unsafe, mistyped or negate a derived predicate
    """
    rules = tuple(rules)
    if not rules:
        raise QueryError("program has no rules")
    _check_arities(rules)
    for rule in rules:
        _check_safety(rule)
        _check_types(rule)
    return QueryProgram(rules, _stratify(rules))
