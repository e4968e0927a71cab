"""Tests for rules, grammars, binarization and tree derivation."""
import logging

import pytest

from src.grammar.grammar import (
    Grammar,
    binarize,
    build_grammar,
    derive_tree,
    extract_rules,
    format_rules,
    infer_intermediates,
)
from src.grammar.symbols import Rule, RuleKind, SymbolKind, classify_rule, make_rule
from src.model.store import load_grammar
from src.scene.tree import GroundTruthTree
from src.utils.errors import CyclicGrammarError, NotDerivableError, SchemaError
from tests.conftest import APPENDIX_GRAMMAR
from tests.factories import chain_scene


def plane(*ids):
    node = GroundTruthTree("Plane", (ids[0],))
    for seg in ids[1:]:
        node = GroundTruthTree("Plane", (node, seg))
    return node


def part(label, *ids):
    return GroundTruthTree(label, (plane(*ids),))


def table_tree():
    table = GroundTruthTree("Table", (part("tableTop", 0), part("tableDrawer", 1), part("tableLeg", 2, 3)))
    floor = GroundTruthTree("FloorComplex", (part("Floor", 4),))
    return GroundTruthTree("S", (GroundTruthTree("FloorComplex", (floor, GroundTruthTree("TableComplex", (table,)))),))


class TestRules:
    def test_rhs_is_a_multiset(self):
        assert Rule("Chair", ("chairBase", "chairBackRest")) == Rule("Chair", ("chairBackRest", "chairBase"))
        assert len({Rule("A", ("b", "c")), Rule("A", ("c", "b"))}) == 1

    def test_listing_order_is_kept(self):
        assert make_rule("Table", ["tableLeg", "tableTop"]).rhs == ("tableLeg", "tableTop")

    def test_empty_rhs_is_rejected(self):
        with pytest.raises(ValueError):
            Rule("A", ())

    @pytest.mark.parametrize(
        "lhs, rhs, kind",
        [
            ("S", ["FloorComplex"], RuleKind.GOAL),
            ("TableComplex", ["TableComplex", "monitor"], RuleKind.OBJECT_GROUPING),
            ("Plane", ["Plane", "segment"], RuleKind.SEGMENTATION),
            ("tableTop", ["Plane"], RuleKind.SEGMENTATION),
            ("Chair", ["chairBase", "chairBackRest"], RuleKind.OBJECT_FORMATION),
        ],
    )
    def test_families(self, lhs, rhs, kind):
        assert classify_rule(lhs, rhs) == kind

    def test_str(self):
        assert str(make_rule("CPU", ["CPUSide", "CPUFront"])) == "CPU -> CPUSide CPUFront"


class TestExtraction:
    def test_one_rule_per_distinct_node(self):
        rules = extract_rules([table_tree(), table_tree()])
        assert make_rule("Table", ["tableTop", "tableDrawer", "tableLeg"]) in rules
        assert make_rule("Plane", ["Plane", "segment"]) in rules
        assert make_rule("Plane", ["segment"]) in rules
        assert len(rules) == len(set(rules))

    def test_binarize_is_left_branching(self):
        rules = binarize([make_rule("Table", ["tableTop", "tableDrawer", "tableLeg"])])
        assert rules == [
            Rule("tableTop_tableDrawer", ("tableTop", "tableDrawer"), RuleKind.OBJECT_FORMATION),
            Rule("Table", ("tableTop_tableDrawer", "tableLeg"), RuleKind.OBJECT_FORMATION),
        ]
        assert all(r.arity <= 2 for r in rules)

    def test_intermediates_follow_the_naming_contract(self):
        rules = binarize([make_rule("Chair", ["chairBase", "chairBackRest", "chairArmRest"])])
        assert infer_intermediates(rules) == {"chairBase_chairBackRest"}

    def test_build_grammar(self):
        grammar = build_grammar([table_tree()])
        assert grammar.start == "S"
        assert grammar.terminal == "segment"
        assert grammar.intermediates == frozenset({"tableTop_tableDrawer"})
        assert grammar.leaf_parts("tableTop_tableDrawer") == frozenset({"tableTop", "tableDrawer"})
        assert grammar.symbols["S"].kind == SymbolKind.START
        assert grammar.goal_symbols == frozenset({"FloorComplex"})

    def test_format_rules(self):
        text = format_rules(build_grammar([table_tree()]))
        lines = text.splitlines()
        assert "Table --> tableTop_tableDrawer , tableLeg" in lines
        assert "S --> FloorComplex" in lines
        lhs = [line.split(" --> ")[0] for line in lines]
        assert lhs == sorted(lhs)


class TestDerivation:
    def test_ternary_node_goes_through_the_intermediate(self):
        grammar = build_grammar([table_tree()])
        derived = derive_tree(table_tree(), grammar)
        table = next(n for n in derived.iter_nodes() if n.symbol == "Table")
        assert [c.symbol for c in table.children] == ["tableTop_tableDrawer", "tableLeg"]
        assert table.span == frozenset({0, 1, 2, 3})
        assert sorted(derived.leaves()) == [0, 1, 2, 3, 4]

    def test_children_order_does_not_matter(self):
        grammar = build_grammar([table_tree()])
        shuffled = GroundTruthTree("Table", (part("tableLeg", 2), part("tableTop", 0), part("tableDrawer", 1)))
        derived = derive_tree(shuffled, grammar)
        assert derived.rule == Rule("Table", ("tableTop_tableDrawer", "tableLeg"))

    def test_repeated_parts_keep_intermediate_spans_connected(self):
        table = GroundTruthTree("Table", (part("tableTop", 0), part("tableLeg", 1), part("tableLeg", 2)))
        floor = GroundTruthTree("FloorComplex", (part("Floor", 3),))
        root = GroundTruthTree("S", (GroundTruthTree("FloorComplex", (floor, GroundTruthTree("TableComplex", (table,)))),))
        grammar = build_grammar([root])
        tree = GroundTruthTree("Table", (part("tableTop", 0), part("tableLeg", 2), part("tableLeg", 1)))

        def pair_span(derived):
            return next(n.span for n in derived.iter_nodes() if n.symbol == "tableTop_tableLeg")

        assert pair_span(derive_tree(tree, grammar)) == frozenset({0, 2})
        assert pair_span(derive_tree(tree, grammar, chain_scene(3))) == frozenset({0, 1})

    def test_every_node_has_a_rule(self, example_tree, appendix_grammar):
        derived = derive_tree(example_tree, appendix_grammar)
        assert sorted(derived.leaves()) == list(range(12))
        assert all(n.rule is not None for n in derived.internal_nodes())
        assert all(n.rule in set(appendix_grammar.rules) for n in derived.internal_nodes())

    def test_unknown_structure(self):
        grammar = build_grammar([table_tree()])
        tree = GroundTruthTree("Table", (part("tableTop", 0), part("tableLeg", 1)))
        with pytest.raises(NotDerivableError, match="Table"):
            derive_tree(tree, grammar)


class TestAppendixGrammar:
    def test_contents(self, appendix_grammar):
        assert len(appendix_grammar.rules) == 75
        assert appendix_grammar.terminal == "segment"
        assert "CPUSide_CPUFront" in appendix_grammar.intermediates
        assert appendix_grammar.leaf_parts("tableTop_tableDrawer_tableLeg_keyboardTray_tableBack") == frozenset(
            {"tableTop", "tableDrawer", "tableLeg", "keyboardTray", "tableBack"}
        )

    def test_orphan_symbols_only_warn(self, caplog):
        with caplog.at_level(logging.WARNING, logger="scenegrammar"):
            load_grammar(APPENDIX_GRAMMAR)
        assert "sofaBackRest_sofaBase" in caplog.text


class TestValidation:
    def test_cyclic_intermediate(self):
        rules = [Rule("a_b", ("a_b", "c")), Rule("S", ("a_b",), RuleKind.GOAL)]
        with pytest.raises(CyclicGrammarError, match="a_b"):
            Grammar.from_rules(rules, kinds={"a_b": SymbolKind.INTERMEDIATE})

    def test_goal_rule_must_rewrite_the_start(self):
        with pytest.raises(SchemaError, match="goal rule"):
            Grammar.from_rules([Rule("Floor", ("Plane",), RuleKind.GOAL)])

    def test_start_must_be_formed_by_goal_rules(self):
        with pytest.raises(SchemaError, match="not a goal rule"):
            Grammar.from_rules([Rule("S", ("Floor",), RuleKind.OBJECT_FORMATION)])

    def test_intermediate_needs_a_rule(self):
        with pytest.raises(SchemaError, match="has no rule"):
            Grammar.from_rules([make_rule("Table", ["tableTop_tableLeg"])], kinds={"tableTop_tableLeg": SymbolKind.INTERMEDIATE})

    def test_union_rejects_kind_conflicts(self):
        g1 = Grammar.from_rules([make_rule("Floor", ["Plane"])])
        g2 = Grammar.from_rules([make_rule("Wall", ["Floor"])], kinds={"Floor": SymbolKind.TERMINAL})
        with pytest.raises(SchemaError):
            g1.union(g2)
