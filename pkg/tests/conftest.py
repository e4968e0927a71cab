"""Shared fixtures: tiny scenes, a small generated forest and a grammar trained on it."""
from pathlib import Path

import pytest

from src.grammar.grammar import build_grammar
from src.model.store import load_grammar
from src.model.training import train
from src.scene.io import load_scene, load_tree
from src.synth.corpus import gen_corpus, load_corpus
from src.synth.generator import gen_scene
from src.synth.template import OFFICE, SceneTemplate

REPO_ROOT = Path(__file__).resolve().parent.parent
EXAMPLE_SCENE = REPO_ROOT / "data" / "scenes" / "office_example.json"
EXAMPLE_TREE = REPO_ROOT / "data" / "scenes" / "office_example_tree.json"
APPENDIX_GRAMMAR = REPO_ROOT / "grammars" / "office_appendix.json"

# Floor and table always, monitor and keyboard sometimes, one segment per part: 3 to 5 terminals
SMALL = SceneTemplate(
    name="small",
    include={"monitor": 0.5, "keyboard": 0.5},
    oversegmentation=(1, 1),
    occluded=[],
)


@pytest.fixture(scope="session")
def small_template() -> SceneTemplate:
    return SMALL


@pytest.fixture(scope="session")
def small_samples():
    """Sixteen generated (scene, tree) pairs."""
    return [gen_scene(SMALL, seed, name=f"small_{seed:03d}") for seed in range(16)]


@pytest.fixture(scope="session")
def small_grammar(small_samples):
    return build_grammar([t for _, t in small_samples])


@pytest.fixture(scope="session")
def small_tg(small_samples, small_grammar):
    return train([t for _, t in small_samples], [s for s, _ in small_samples], small_grammar)


@pytest.fixture(scope="session")
def test_scenes():
    """Held-out scenes drawn with seeds the grammar was not trained on."""
    return [gen_scene(SMALL, seed, name=f"held_{seed:03d}")[0] for seed in range(100, 112)]


@pytest.fixture(scope="session")
def office_tg():
    """Grammar trained on forty full office scenes (seeds 0 to 39)."""
    samples = [gen_scene(OFFICE, seed) for seed in range(40)]
    trees = [t for _, t in samples]
    return train(trees, [s for s, _ in samples], build_grammar(trees))


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus")
    gen_corpus(SMALL, 8, seed=3, out=out, folds=2)
    return load_corpus(out)


@pytest.fixture
def example_scene():
    return load_scene(EXAMPLE_SCENE)


@pytest.fixture
def example_tree():
    return load_tree(EXAMPLE_TREE)


@pytest.fixture
def appendix_grammar():
    return load_grammar(APPENDIX_GRAMMAR)
