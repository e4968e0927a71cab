"""Tests for label extraction, label reports, DOT export and cross-validation."""
import json
import re
import warnings

import pandas as pd
import pytest

from src.evaluation.dot import export_dot
from src.evaluation.harness import cross_validate
from src.evaluation.labels import NONE_LABEL, extract_labels, is_label_symbol
from src.evaluation.metrics import MACRO, object_recovery, precision_recall, write_report
from src.grammar.grammar import derive_tree
from src.grammar.tree import ParseNode
from src.synth.corpus import gen_corpus, load_corpus
from src.synth.template import OFFICE
from src.utils.errors import LabelDomainError

NODE_LINE = re.compile(r"^\s*n\d+ \[", re.MULTILINE)


def count_statements(source):
    return len(NODE_LINE.findall(source)), source.count("->")


# ---------------------------------------------------------------------------
# Labels
# ---------------------------------------------------------------------------

class TestLabels:
    def test_lowest_named_ancestor(self, example_tree):
        labels = extract_labels(example_tree)
        assert labels[0] == labels[1] == "Floor"
        assert labels[2] == "Wall"
        assert labels[3] == "tableTop"
        assert labels[7] == "CPUSide"
        assert labels[10] == "chairBackRest"

    def test_derivations_give_the_same_labels(self, example_tree, appendix_grammar):
        derived = derive_tree(example_tree, appendix_grammar)
        assert extract_labels(derived, appendix_grammar) == extract_labels(example_tree, appendix_grammar)

    def test_unreached_segments(self):
        tree = ParseNode("S", frozenset())
        assert extract_labels(tree, terminal_ids=[0, 1]) == {0: NONE_LABEL, 1: NONE_LABEL}

    def test_structural_symbols(self, appendix_grammar):
        for symbol in ("S", "Plane", "segment", "TableComplex"):
            assert not is_label_symbol(symbol)
        assert not is_label_symbol("CPUSide_CPUFront", appendix_grammar)
        assert is_label_symbol("monitor")


# ---------------------------------------------------------------------------
# Precision and recall
# ---------------------------------------------------------------------------

GOLD = {1: "tableTop", 2: "tableTop", 3: "Wall", 4: "none"}
PRED = {1: "tableTop", 2: "none", 3: "Wall", 4: "none"}


class TestPrecisionRecall:
    def test_identical_maps(self):
        report = precision_recall(GOLD, GOLD)
        assert report.recall == {"Wall": 100.0, "tableTop": 100.0}
        assert report.macro_precision == 100.0

    def test_missed_segment(self):
        report = precision_recall(PRED, GOLD)
        assert report.recall["tableTop"] == pytest.approx(50.0)
        assert report.precision["tableTop"] == pytest.approx(100.0)
        assert report.macro_recall == pytest.approx(75.0)
        assert report.support == {"Wall": 1, "tableTop": 2}
        assert report.confusion["tableTop"] == {"tableTop": 1, "none": 1}

    def test_wrong_label_costs_precision(self):
        report = precision_recall({**GOLD, 4: "Wall"}, GOLD)
        assert report.precision["Wall"] == pytest.approx(50.0)
        assert report.recall["Wall"] == pytest.approx(100.0)

    def test_only_none(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            report = precision_recall({1: "none"}, {1: "none"})
        assert report.confusion == {"none": {"none": 1}}
        assert report.labels == []
        assert report.macro_recall == 0.0
        assert list(report.table().columns) == [MACRO]

    def test_domains_must_match(self):
        with pytest.raises(LabelDomainError):
            precision_recall({1: "Wall"}, {1: "Wall", 2: "Wall"})

    def test_table_and_sidecar(self, tmp_path):
        path = write_report(precision_recall(PRED, GOLD), tmp_path / "reports" / "labels.tsv", extra={"folds": 4})
        table = pd.read_csv(path, sep="\t", index_col=0)
        assert list(table.index) == ["recall", "precision"]
        assert list(table.columns) == ["Wall", "tableTop", MACRO]
        assert table.loc["recall"].tolist() == [100, 50, 75]
        sidecar = json.loads(path.with_suffix(".json").read_text(encoding="utf-8"))
        assert sidecar["folds"] == 4
        assert sidecar["macro_recall"] == pytest.approx(75.0)


# ---------------------------------------------------------------------------
# Object recovery and DOT
# ---------------------------------------------------------------------------

class TestRecovery:
    def test_gold_derivation_recovers_everything(self, example_tree, appendix_grammar):
        derived = derive_tree(example_tree, appendix_grammar)
        report = object_recovery(derived, example_tree, appendix_grammar)
        assert report.rate == 100.0
        assert report.total["Table"] == 1

    def test_empty_parse_recovers_nothing(self, example_tree):
        report = object_recovery(ParseNode("S", frozenset()), example_tree)
        assert report.rate == 0.0
        assert sum(report.total.values()) > 0

    def test_reports_add_up(self, example_tree, appendix_grammar):
        derived = derive_tree(example_tree, appendix_grammar)
        one = object_recovery(derived, example_tree, appendix_grammar)
        assert (one + one).total["Floor"] == 2


class TestDot:
    def test_single_node(self, tmp_path):
        source = export_dot(ParseNode("S", frozenset(), cost=12.0), tmp_path / "tree.dot")
        assert count_statements(source) == (1, 0)
        assert (tmp_path / "tree.dot").read_text(encoding="utf-8") == source

    def test_derivation(self, example_tree, appendix_grammar):
        derived = derive_tree(example_tree, appendix_grammar)
        size = len(list(derived.iter_nodes()))
        assert count_statements(export_dot(derived)) == (size, size - 1)

    def test_ground_truth_tree(self, example_tree):
        internal = len(list(example_tree.iter_nodes()))
        nodes, edges = count_statements(export_dot(example_tree))
        assert nodes == internal + 12
        assert edges == nodes - 1


# ---------------------------------------------------------------------------
# Cross-validation
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def office_corpus(tmp_path_factory):
    """Eighty-four office scenes in four folds."""
    out = tmp_path_factory.mktemp("office")
    gen_corpus(OFFICE, 84, seed=7, out=out, folds=4)
    return load_corpus(out)


class TestCrossValidation:
    def test_gold_derivations_score_perfectly(self, small_corpus):
        result = cross_validate(small_corpus, from_gold=True)
        assert result.report.macro_recall == 100.0
        assert result.report.macro_precision == 100.0
        assert result.recovery.rate == 100.0
        assert len(result.scenes) == len(small_corpus)
        assert len(result.folds) == 2

    def test_one_fold(self, small_corpus):
        result = cross_validate(small_corpus, fold=0, seed=1)
        _, test = small_corpus.split(0)
        assert len(result.scenes) == len(test)
        assert {s.fold for s in result.scenes} == {0}
        assert 0.0 <= result.report.macro_recall <= 100.0
        assert all(s.algorithm in ("kld", "beam") for s in result.scenes)
        sidecar = result.sidecar()
        assert sidecar["exhausted"] == result.exhausted == 0

    def test_fold_out_of_range(self, small_corpus):
        with pytest.raises(ValueError, match="fold 5"):
            cross_validate(small_corpus, fold=5)

    @pytest.mark.slow
    @pytest.mark.parametrize("fold", range(4))
    def test_office_labeling_accuracy(self, office_corpus, fold, record_property):
        result = cross_validate(office_corpus, fold=fold, seed=7)
        record_property("macro_recall", result.report.macro_recall)
        record_property("macro_precision", result.report.macro_precision)
        assert result.report.macro_recall >= 90.0
        assert result.report.macro_precision >= 90.0
