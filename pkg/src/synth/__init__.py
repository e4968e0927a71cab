"""Synthetic labelled office scenes."""
from src.synth.corpus import Corpus, assign_folds, gen_corpus, load_corpus
from src.synth.generator import gen_scene
from src.synth.template import OFFICE, TABLE_ONLY, TEMPLATES, SceneTemplate, load_template

__all__ = [
    "Corpus",
    "OFFICE",
    "SceneTemplate",
    "TABLE_ONLY",
    "TEMPLATES",
    "assign_folds",
    "gen_corpus",
    "gen_scene",
    "load_corpus",
    "load_template",
]
