"""
Tests for query evaluation, checked against brute-force oracles.
"""
import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.errors import QueryError
from src.labels import EdgeLabel, NodeLabel
from src.graph import build_graph
from src.query_engine import MatchSet, evaluate, evaluate_facts, evaluate_with_disjunction, ground_facts
from src.query_parser import parse_query, parse_rules

from .oracles import DocumentFacts, brute_force, query_by_assignment
from .strategies import QUERY_SETTINGS, conjunctive_queries, documents, make_graph, render_rule


def _run(text, graph, predicate="q", semi_naive=True):
    results = evaluate(parse_query(text), graph, semi_naive)
    return next(m for m in results if m.predicate == predicate).as_set()


class TestGroundFacts:
    """Tests for the built-in relations."""

    def test_relations(self, diamond_graph):
        facts = ground_facts(diamond_graph)

        assert ("a", "fact") in facts["node"]
        assert ("a", "b", "premise-conclusion") in facts["edge"]
        assert ("a", "d") in facts["connected"]
        assert ("a", "a") not in facts["connected"]
        assert ("a", "d", 2) in facts["distance"]
        assert ("d", "d", 0) in facts["distance"]
        assert not any(x == "d" and y == "a" for x, y, _ in facts["distance"])
        assert facts["order"] == frozenset({("a", 0), ("b", 1), ("c", 2), ("d", 3)})

    def test_unknown_predicate_is_empty(self, diamond_graph):
        assert ground_facts(diamond_graph)["missing"] == frozenset()


class TestEvaluate:
    """Tests for evaluate on hand-built graphs."""

    def test_verification_pattern(self, verification_graph):
        """Test the self-verification step of the divisor trace."""
        program = parse_query(
            'v(X, Y, Z) :- node(Y, "planning"), edge(X, Y, "frontier-verify"), '
            'connected(Y, Z), edge(X, Z, "support").'
        )

        (matches,) = evaluate(program, verification_graph)

        assert matches.predicate == "v"
        assert matches.arity == 3
        assert matches.tuples == (("trace39", "trace40", "trace41"),)

    def test_results_in_definition_order(self, diamond_graph):
        results = evaluate(parse_query(
            'late(X) :- order(X, I), I > 1.\n'
            'early(X) :- order(X, I), I <= 1.\n'
        ), diamond_graph)

        assert [m.predicate for m in results] == ["late", "early"]
        assert results[0].tuples == (("c",), ("d",))

    def test_empty_result(self, diamond_graph):
        (matches,) = evaluate(parse_query('q(X) :- node(X, "planning").'), diamond_graph)

        assert len(matches) == 0
        assert list(matches) == []

    def test_recursion(self, diamond_graph):
        """Test transitive closure over premise-conclusion edges."""
        result = _run(
            'q(X, Y) :- edge(X, Y, "premise-conclusion").\n'
            'q(X, Y) :- q(X, Z), edge(Z, Y, "premise-conclusion").\n',
            diamond_graph,
        )

        assert result == {("a", "b"), ("a", "c"), ("a", "d"), ("b", "d"), ("c", "d")}

    def test_repeated_variables(self, diamond_graph):
        """Test repeated variables join on equal values."""
        result = _run('q(X) :- distance(X, X, D), D == 0.', diamond_graph)

        assert result == {("a",), ("b",), ("c",), ("d",)}

    def test_string_and_integer_never_equal(self):
        """Test comparison across types is false, not an error."""
        graph = make_graph([("n1", "fact")])

        result = _run(
            "p(X, L) :- node(X, L).\n"
            "q(X) :- p(X, L), order(X, I), I == L.\n",
            graph,
        )

        assert result == set()

    def test_match_set_order(self):
        """Test tuples are sorted by their rendered constants."""
        nodes = [(f"n{i}", "fact") for i in range(12)]
        graph = make_graph(nodes)

        (matches,) = evaluate(parse_query("q(X, I) :- order(X, I), I >= 9."), graph)

        assert matches.tuples == (("n10", 10), ("n11", 11), ("n9", 9))

    def test_match_set_deduplicates(self):
        match_set = MatchSet.of("p", 1, [("b",), ("a",), ("b",)])

        assert match_set.tuples == (("a",), ("b",))
        assert ("a",) in match_set

    def test_deterministic(self, verification_graph):
        text = 'q(X, Y) :- connected(X, Y), node(X, "planning").'
        program = parse_query(text)

        assert evaluate(program, verification_graph) == evaluate(program, verification_graph)


class TestDisjunction:
    """Tests for evaluate_with_disjunction."""

    def test_union_of_alternatives(self, verification_graph):
        rules = parse_rules(
            'judged(X, Z) :- edge(X, Z, "support").\n'
            'judged(X, Z) :- edge(X, Z, "refute").\n'
            'judged(X, Z) :- edge(X, Z, "uncertainty").\n'
        )

        result = evaluate_with_disjunction(rules, verification_graph)

        assert result.predicate == "judged"
        assert result.as_set() == {("trace39", "trace41")}

    def test_accepts_program(self, diamond_graph):
        program = parse_query('q(X) :- node(X, "fact").\nq(X) :- node(X, "conclusion").\n')

        assert evaluate_with_disjunction(program, diamond_graph).as_set() == {("a",), ("d",)}

    def test_mixed_heads(self, diamond_graph):
        rules = parse_rules('p(X) :- node(X, "fact").\nq(X) :- node(X, "fact").\n')

        with pytest.raises(QueryError, match="different head predicates"):
            evaluate_with_disjunction(rules, diamond_graph)

    def test_arity_mismatch(self, diamond_graph):
        rules = parse_rules('p(X) :- node(X, "fact").\np(X, Y) :- edge(X, Y, "support").\n')

        with pytest.raises(QueryError, match="arity mismatch"):
            evaluate_with_disjunction(rules, diamond_graph)

    def test_no_rules(self, diamond_graph):
        with pytest.raises(QueryError):
            evaluate_with_disjunction([], diamond_graph)


class TestAgainstOracle:
    """Random graphs and queries against exhaustive assignment."""

    @QUERY_SETTINGS
    @given(documents(), conjunctive_queries())
    def test_generated_queries(self, doc, query):
        """Test random conjunctive queries with one comparison and optional negation."""
        head, body = query
        facts = DocumentFacts(doc)

        result = _run(render_rule("q", head, body), build_graph(doc))

        assert result == query_by_assignment(facts, head, [body])

    @QUERY_SETTINGS
    @given(documents(), st.sampled_from(list(EdgeLabel)), st.sampled_from(list(NodeLabel)))
    def test_edge_then_label(self, doc, edge_label, node_label):
        facts = DocumentFacts(doc)
        result = _run(
            f'q(X, Y) :- edge(X, Y, "{edge_label.value}"), node(Y, "{node_label.value}").',
            build_graph(doc),
        )

        expected = brute_force(
            facts.ids, 2,
            lambda x, y: facts.edge(x, y, edge_label.value) and facts.node(y, node_label.value),
        )
        assert result == expected

    @QUERY_SETTINGS
    @given(documents())
    def test_two_hop_connection(self, doc):
        """Test an existential middle variable."""
        facts = DocumentFacts(doc)
        result = _run("q(X, Z) :- connected(X, Y), connected(Y, Z).", build_graph(doc))

        expected = brute_force(
            facts.ids, 2,
            lambda x, z: any(facts.connected(x, y) and facts.connected(y, z) for y in facts.ids),
        )
        assert result == expected

    @QUERY_SETTINGS
    @given(documents(), st.integers(0, 3))
    def test_distance_threshold(self, doc, k):
        facts = DocumentFacts(doc)
        result = _run(f"q(X, Y) :- distance(X, Y, D), D >= {k}, X != Y.", build_graph(doc))

        def holds(x, y):
            d = facts.distance(x, y)
            return d is not None and d >= k and x != y

        assert result == brute_force(facts.ids, 2, holds)

    @QUERY_SETTINGS
    @given(documents(), st.sampled_from(list(NodeLabel)))
    def test_unreached_by_negation(self, doc, node_label):
        facts = DocumentFacts(doc)
        result = _run(
            f'q(X, Y) :- node(X, "{node_label.value}"), order(Y, J), J >= 0, '
            "not connected(X, Y), X != Y.",
            build_graph(doc),
        )

        expected = brute_force(
            facts.ids, 2,
            lambda x, y: facts.node(x, node_label.value) and not facts.connected(x, y) and x != y,
        )
        assert result == expected

    @QUERY_SETTINGS
    @given(documents())
    def test_recursive_path_equals_reachability(self, doc):
        facts = DocumentFacts(doc)
        result = _run(
            "path(X, Y) :- edge(X, Y, L).\n"
            "path(X, Y) :- path(X, Z), edge(Z, Y, L).\n",
            build_graph(doc),
            predicate="path",
        )

        assert result == brute_force(facts.ids, 2, facts.connected)

    @QUERY_SETTINGS
    @given(documents())
    def test_semi_naive_equals_naive(self, doc):
        """Test both iteration strategies reach the same fixpoint."""
        program = parse_query(
            "path(X, Y) :- edge(X, Y, L).\n"
            "path(X, Y) :- path(X, Z), path(Z, Y).\n"
            "both(X, Y) :- path(X, Y), path(Y, W), X != W.\n"
            'skip(X, Z) :- path(X, Y), path(Y, Z), not edge(X, Z, "premise-conclusion").\n'
        )
        facts = ground_facts(build_graph(doc))

        assert evaluate_facts(program, facts, semi_naive=True) == \
            evaluate_facts(program, facts, semi_naive=False)


class TestOrderIndependence:
    """Results do not depend on the order of body literals or of rules."""

    @QUERY_SETTINGS
    @given(documents(), st.data())
    def test_body_order(self, doc, data):
        head, body = data.draw(conjunctive_queries())
        shuffled = data.draw(st.permutations(body))
        graph = build_graph(doc)

        assert _run(render_rule("q", head, shuffled), graph) == \
            _run(render_rule("q", head, body), graph)

    @QUERY_SETTINGS
    @given(documents(), st.data())
    def test_rule_order(self, doc, data):
        """Test a disjunctive predicate with its rules in either order."""
        arity = data.draw(st.integers(1, 3))
        first = data.draw(conjunctive_queries(arity))
        second = data.draw(conjunctive_queries(arity))
        rules = [
            render_rule("q", *first),
            render_rule("q", *second),
            f"r({first[0][0]}) :- q({', '.join(first[0])}).",
        ]
        graph = build_graph(doc)

        forward = evaluate(parse_query("\n".join(rules)), graph)
        backward = evaluate(parse_query("\n".join(reversed(rules))), graph)

        assert {m.predicate: m.as_set() for m in forward} == \
            {m.predicate: m.as_set() for m in backward}
        assert _run("\n".join(rules[:2]), graph) == \
            query_by_assignment(DocumentFacts(doc), first[0], [first[1], second[1]])


class TestMonotonicity:
    """Adding a rule never removes tuples."""

    def test_derived_negation_rejected(self):
        """Test the program whose results would shrink under a new rule."""
        with pytest.raises(QueryError, match="negation of derived predicate"):
            parse_query(
                "q(X) :- node(X, L), not p(X).\n"
                'p(X) :- node(X, "planning").\n'
            )

    def test_negating_builtins(self, dangling_graph):
        """Test negated built-in atoms filter bound tuples."""
        result = _run(
            'q(X) :- node(X, "reasoning"), node(Y, "reflection"), '
            'not edge(X, Y, "uncertainty").',
            dangling_graph,
        )

        assert result == {("b",)}

    @QUERY_SETTINGS
    @given(documents(), st.data())
    def test_added_rule_keeps_tuples(self, doc, data):
        arity = data.draw(st.integers(1, 3))
        head, body = data.draw(conjunctive_queries(arity))
        extra = data.draw(conjunctive_queries(arity))
        base = [
            render_rule("q", head, body),
            f"r({head[0]}) :- q({', '.join(head)}).",
        ]
        graph = build_graph(doc)

        before = {m.predicate: m.as_set() for m in evaluate(parse_query("\n".join(base)), graph)}
        extended = base + [render_rule("q", *extra)]
        after = {m.predicate: m.as_set() for m in evaluate(parse_query("\n".join(extended)), graph)}

        assert before["q"] <= after["q"]
        assert before["r"] <= after["r"]
