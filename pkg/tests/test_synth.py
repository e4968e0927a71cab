"""Tests for scene templates, the scene generator and corpora."""
from collections import Counter

import pytest
from pydantic import ValidationError

from src.grammar.grammar import build_grammar, derive_tree
from src.scene.io import scene_to_dict, write_json
from src.synth.corpus import assign_folds, gen_corpus, load_corpus, scene_seeds
from src.synth.generator import gen_scene
from src.synth.template import OFFICE, TABLE_ONLY, SceneTemplate, load_template
from src.utils.errors import SchemaError


@pytest.fixture(scope="module")
def office_samples():
    return [gen_scene(OFFICE, seed, name=f"office_{seed}") for seed in range(6)]


class TestGenerator:
    def test_same_seed_same_scene(self):
        a_scene, a_tree = gen_scene(OFFICE, 7)
        b_scene, b_tree = gen_scene(OFFICE, 7)
        assert scene_to_dict(a_scene) == scene_to_dict(b_scene)
        assert a_tree == b_tree

    def test_different_seeds_differ(self):
        assert scene_to_dict(gen_scene(OFFICE, 1)[0]) != scene_to_dict(gen_scene(OFFICE, 2)[0])

    def test_leaves_cover_every_segment(self, office_samples):
        for scene, tree in office_samples:
            assert sorted(tree.leaves()) == list(scene.terminal_ids)

    def test_labelled_spans_are_connected(self, office_samples):
        for scene, tree in office_samples:
            for node in tree.iter_nodes():
                assert scene.is_connected(node.leaves()), (scene.name, node.label)

    def test_trees_follow_the_office_grammar(self, office_samples, appendix_grammar):
        for _, tree in office_samples:
            derivation = derive_tree(tree, appendix_grammar)
            assert derivation.symbol == "S"

    def test_trees_follow_their_own_grammar(self, office_samples):
        grammar = build_grammar([t for _, t in office_samples])
        for _, tree in office_samples:
            assert sorted(derive_tree(tree, grammar).leaves()) == sorted(tree.leaves())

    def test_table_only_template(self):
        scene, tree = gen_scene(TABLE_ONLY, 0)
        labels = {node.label for node in tree.iter_nodes()}
        assert {"Floor", "Table", "tableTop", "tableLeg"} <= labels
        assert "monitor" not in labels
        assert len(scene) == 3


class TestTemplates:
    def test_bundled_names(self):
        assert load_template("office") is OFFICE
        assert load_template("table") is TABLE_ONLY

    def test_unknown_object(self):
        with pytest.raises(ValidationError, match="Sofa"):
            SceneTemplate(include={"Sofa": 1.0})

    def test_bad_probability(self):
        with pytest.raises(ValidationError):
            SceneTemplate(include={"Chair": 1.5})

    def test_bad_oversegmentation(self):
        with pytest.raises(ValidationError, match="oversegmentation"):
            SceneTemplate(oversegmentation=(0, 2))

    def test_inverted_range(self):
        with pytest.raises(ValidationError, match="lower bound"):
            SceneTemplate(table_width=(1.3, 1.0))

    def test_file(self, tmp_path):
        path = write_json({"name": "mine", "include": {"Chair": 1.0}}, tmp_path / "t.json")
        template = load_template(path)
        assert template.name == "mine"
        assert template.probability("Chair") == 1.0
        assert template.probability("monitor") == 0.0

    def test_invalid_file(self, tmp_path):
        path = write_json({"room_size": 0.5}, tmp_path / "t.json")
        with pytest.raises(SchemaError, match="room_size"):
            load_template(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_template(tmp_path / "nope.json")


class TestCorpus:
    def test_manifest(self, small_corpus):
        assert len(small_corpus) == 8
        assert small_corpus.folds == 2
        assert small_corpus.manifest.template == "small"
        assert all(0 <= e.fold < 2 for e in small_corpus.manifest.entries)
        scene, tree = small_corpus.load(0)
        assert scene.name == "scene_000"
        assert sorted(tree.leaves()) == list(scene.terminal_ids)

    def test_split(self, small_corpus):
        train, test = small_corpus.split(0)
        assert sorted(train + test) == list(range(8))
        assert all(small_corpus.manifest.entries[i].fold == 0 for i in test)

    def test_same_seed_same_corpus(self, tmp_path, small_template):
        gen_corpus(small_template, 3, seed=9, out=tmp_path / "a", folds=2)
        gen_corpus(small_template, 3, seed=9, out=tmp_path / "b", folds=2)
        a, b = load_corpus(tmp_path / "a"), load_corpus(tmp_path / "b")
        assert a.manifest == b.manifest
        assert scene_to_dict(a.load(2)[0]) == scene_to_dict(b.load(2)[0])

    def test_seeds_are_independent_of_corpus_size(self):
        assert scene_seeds(3, 5) == scene_seeds(10, 5)[:3]

    def test_fold_sizes(self):
        assert Counter(assign_folds(84, 4, 0)) == {0: 21, 1: 21, 2: 21, 3: 21}
        assert assign_folds(3, 4, 0) == [0, 1, 2]

    def test_invalid_manifest(self, tmp_path):
        write_json({"folds": 0, "entries": []}, tmp_path / "manifest.json")
        with pytest.raises(SchemaError, match="folds"):
            load_corpus(tmp_path)
