"""
Tests for the pattern library.
"""
import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.errors import QueryError
from src.graph import build_graph
from src.patterns import PatternDef, PatternLibrary, builtin_patterns, detect, load_pattern
from src.query_parser import parse_query

from .oracles import DocumentFacts, brute_force
from .strategies import QUERY_SETTINGS, documents, make_graph, relabel, renamings


@pytest.fixture
def library():
    return PatternLibrary()


def _matches(library, name, graph):
    return detect(library.get(name), graph).matches.tuples


class TestBuiltinPatterns:
    """Each shipped pattern on a graph built to contain it."""

    def test_names(self, library):
        assert library.get_names() == [
            "verification", "deductive-chain", "inductive-reasoning",
            "proof-by-contradiction", "backtracking", "correction", "doubt", "case-analysis",
        ]

    def test_verification(self, library, verification_graph):
        """Test the plan-then-support verification step is found once."""
        result = detect(library.get("verification"), verification_graph)

        assert result.matches.tuples == (("trace39", "trace40", "trace41"),)
        assert result.annotated() == [(
            ("verified node", "trace39"),
            ("verification plan", "trace40"),
            ("verdict", "trace41"),
        )]

    def test_verification_with_refute(self, library):
        graph = make_graph(
            [("x", "reasoning"), ("y", "planning"), ("s", "reasoning"), ("z", "reflection")],
            [("x", "y", "frontier-verify"), ("y", "s", "plan-step"),
             ("s", "z", "premise-conclusion"), ("x", "z", "refute")],
        )

        assert _matches(library, "verification", graph) == (("x", "y", "z"),)

    def test_verification_needs_the_plan_first(self, library):
        """Test a verdict not reached from the plan does not count."""
        graph = make_graph(
            [("x", "reasoning"), ("z", "reasoning"), ("y", "planning")],
            [("x", "y", "frontier-verify"), ("x", "z", "support")],
        )

        assert _matches(library, "verification", graph) == ()

    def test_deductive_chain(self, library, verification_graph):
        assert _matches(library, "deductive-chain", verification_graph) == (
            ("trace0", "trace39", "trace42"),
            ("trace2", "trace39", "trace42"),
        )

    def test_inductive_reasoning(self, library):
        graph = make_graph(
            [("c", "fact"), ("e", "example"), ("g", "reasoning")],
            [("c", "e", "concept-example"), ("e", "g", "premise-conclusion")],
        )

        assert _matches(library, "inductive-reasoning", graph) == (("c", "e", "g"),)

    def test_proof_by_contradiction(self, library):
        graph = make_graph(
            [("a", "assumption"), ("b", "reasoning"), ("r", "reasoning")],
            [("a", "b", "premise-conclusion"), ("b", "r", "premise-conclusion"),
             ("a", "r", "refute")],
        )

        assert _matches(library, "proof-by-contradiction", graph) == (("a", "r"),)

    def test_refute_from_non_assumption(self, library):
        graph = make_graph([("a", "fact"), ("r", "reasoning")], [("a", "r", "refute")])

        assert _matches(library, "proof-by-contradiction", graph) == ()

    def test_backtracking(self, library):
        graph = make_graph([("p", "planning"), ("q", "planning")], [("p", "q", "plan-alternative")])

        assert _matches(library, "backtracking", graph) == (("p", "q"),)

    def test_correction(self, library):
        graph = make_graph([("x", "reasoning"), ("y", "reasoning")], [("x", "y", "correction")])

        assert _matches(library, "correction", graph) == (("x", "y"),)

    def test_doubt(self, library, dangling_graph):
        assert _matches(library, "doubt", dangling_graph) == (("a", "d"),)

    def test_case_analysis(self, library):
        graph = make_graph(
            [("p", "planning"), ("a", "assumption"), ("b", "assumption"), ("c", "reasoning")],
            [("p", "a", "plan-step"), ("p", "b", "plan-step"), ("p", "c", "plan-step")],
        )

        assert _matches(library, "case-analysis", graph) == (("p", "a", "b"),)

    def test_builtin_patterns_load(self):
        """Test every shipped query file parses and fits its roles."""
        patterns = builtin_patterns()

        assert len(patterns) == 8
        assert all(p.program.rules for p in patterns)


class TestPatternLibrary:
    """Tests for PatternLibrary."""

    def test_detect_all(self, library, verification_graph):
        results = library.detect_all(verification_graph)
        counts = {r.pattern: len(r) for r in results}

        assert [r.pattern for r in results] == library.get_names()
        assert counts["verification"] == 1
        assert counts["deductive-chain"] == 2
        assert sum(counts.values()) == 3

    def test_unknown_pattern(self, library):
        assert library.get("nope") is None

    def test_add_and_override(self, library, diamond_graph):
        """Test user patterns are added and replace same-named ones."""
        fan_in = load_pattern(
            "fan-in", "Two premises meet in one node",
            [("A", "first premise"), ("B", "second premise"), ("C", "joint")],
            'fan_in(A, B, C) :- edge(A, C, "premise-conclusion"), '
            'edge(B, C, "premise-conclusion"), order(A, I), order(B, J), I < J.',
        )
        custom_correction = load_pattern(
            "correction", "Any correction edge", [("X", "old"), ("Y", "new")],
            'correction(X, Y) :- edge(X, Y, "correction"), node(X, "fact").',
        )

        assert library.add_pattern(fan_in) is False
        assert library.add_pattern(custom_correction) is True
        assert library.get("correction") is custom_correction
        assert library.get_names()[-1] == "fan-in"
        assert detect(fan_in, diamond_graph).matches.tuples == (("b", "c", "d"),)

    def test_load_pattern_from_file(self, tmp_path, diamond_graph):
        path = tmp_path / "supported.flowq"
        path.write_text(
            "% conclusions with at least one incoming edge\n"
            "has_in(Y) :- edge(X, Y, L).\n"
            'supported(X) :- has_in(X), node(X, "conclusion").\n',
            encoding="utf-8",
        )

        pattern = load_pattern("supported", "Conclusions with a premise", [("X", "conclusion")], path)

        assert detect(pattern, diamond_graph).annotated() == [(("conclusion", "d"),)]

    def test_roles_must_match_head(self):
        program = parse_query('correction(X, Y) :- edge(X, Y, "correction").')

        with pytest.raises(QueryError, match="do not match head"):
            PatternDef("correction", "", program, (("Y", "b"), ("X", "a")))

    def test_program_must_define_pattern(self):
        program = parse_query('other(X) :- node(X, "fact").')

        with pytest.raises(QueryError, match="defines no"):
            PatternDef("correction", "", program, (("X", "a"),))

    def test_empty_library(self, diamond_graph):
        assert PatternLibrary([]).detect_all(diamond_graph) == []


# The shipped patterns restated directly over the reference relations.
PATTERN_ORACLES = {
    "verification": (3, lambda f, x, y, z: (
        f.node(y, "planning") and f.edge(x, y, "frontier-verify") and f.connected(y, z)
        and (f.edge(x, z, "support") or f.edge(x, z, "refute"))
    )),
    "deductive-chain": (3, lambda f, x, y, z: (
        f.edge(x, y, "premise-conclusion") and f.edge(y, z, "premise-conclusion")
    )),
    "inductive-reasoning": (3, lambda f, c, e, g: (
        f.edge(c, e, "concept-example") and f.edge(e, g, "premise-conclusion")
    )),
    "proof-by-contradiction": (2, lambda f, a, r: (
        f.node(a, "assumption") and f.connected(a, r) and f.edge(a, r, "refute")
    )),
    "backtracking": (2, lambda f, p, q: f.edge(p, q, "plan-alternative")),
    "correction": (2, lambda f, x, y: f.edge(x, y, "correction")),
    "doubt": (2, lambda f, x, r: f.edge(x, r, "uncertainty") and f.node(r, "reflection")),
    "case-analysis": (3, lambda f, p, a, b: (
        f.node(p, "planning") and f.edge(p, a, "plan-step") and f.edge(p, b, "plan-step")
        and f.node(a, "assumption") and f.node(b, "assumption") and f.order[a] < f.order[b]
    )),
}


class TestPatternProperties:
    """Built-in patterns on random graphs of up to 15 nodes."""

    def test_every_pattern_has_a_reference(self, library):
        assert sorted(PATTERN_ORACLES) == sorted(library.get_names())

    @QUERY_SETTINGS
    @given(documents())
    def test_detect_matches_exhaustive_assignment(self, doc):
        facts = DocumentFacts(doc)
        results = PatternLibrary().detect_all(build_graph(doc))

        for result in results:
            arity, holds = PATTERN_ORACLES[result.pattern]
            expected = brute_force(facts.ids, arity, lambda *ids: holds(facts, *ids))
            assert result.matches.as_set() == expected, result.pattern

    @QUERY_SETTINGS
    @given(documents(), st.data())
    def test_renaming_ids_renames_matches(self, doc, data):
        """Test matches depend on structure and labels, not on id spelling."""
        mapping = data.draw(renamings(doc))
        library = PatternLibrary()

        original = library.detect_all(build_graph(doc))
        renamed = library.detect_all(build_graph(relabel(doc, mapping)))

        for before, after in zip(original, renamed):
            assert before.pattern == after.pattern
            assert {tuple(mapping[v] for v in match) for match in before.matches} == \
                after.matches.as_set()
