"""
Corpora of generated scenes: scene/tree file pairs plus a manifest with fold assignments.
"""
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from sklearn.model_selection import KFold

from src.scene.io import describe_validation_error, load_scene, load_tree, read_json, save_scene, save_tree, write_json
from src.scene.model import Scene
from src.scene.tree import GroundTruthTree
from src.synth.generator import gen_scene
from src.synth.template import SceneTemplate
from src.utils.config import settings
from src.utils.errors import SchemaError
from src.utils.logging import get_logger

logger = get_logger("synth.corpus")

MANIFEST_NAME = "manifest.json"


class CorpusEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scene: str
    tree: str
    fold: int = Field(ge=0)
    seed: Optional[int] = None


class CorpusManifest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    template: str = ""
    seed: Optional[int] = None
    folds: int = Field(default=4, ge=1)
    entries: List[CorpusEntry] = Field(default_factory=list)


def assign_folds(n: int, folds: int, seed: int) -> List[int]:
    """Fold index of every item; shuffled KFold when there are enough items, round robin otherwise."""
    if n < folds or folds < 2:
        return [i % max(folds, 1) for i in range(n)]
    assignment = [0] * n
    splitter = KFold(n_splits=folds, shuffle=True, random_state=seed)
    for fold, (_, test) in enumerate(splitter.split(np.arange(n))):
        for i in test:
            assignment[i] = fold
    return assignment


def scene_seeds(n: int, seed: int) -> List[int]:
    """Independent per-index seeds derived from one corpus seed."""
    return [int(child.generate_state(1)[0]) for child in np.random.SeedSequence(seed).spawn(n)]


def gen_corpus(
    template: SceneTemplate,
    n: int,
    seed: int,
    out: Union[str, Path],
    folds: Optional[int] = None,
) -> Path:
    """
    Write ``n`` generated scenes and their trees plus a manifest.

    Args:
        template: Scene template
        n: Number of scenes
        seed: Corpus seed; scene ``i`` uses the ``i``-th spawned seed
        out: Output directory
        folds: Number of cross-validation folds (defaults to the configured one)

    Returns:
        Path of the manifest

    Raises:
        OSError: The output directory cannot be written.
    """
    folds = settings.folds if folds is None else folds
    out = Path(out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        logger.error(f"Cannot create corpus directory {out}: {e}")
        raise

    entries = []
    fold_of = assign_folds(n, folds, seed)
    for i, scene_seed in enumerate(scene_seeds(n, seed)):
        name = f"scene_{i:03d}"
        scene, tree = gen_scene(template, scene_seed, name=name)
        save_scene(scene, out / f"{name}.json")
        save_tree(tree, out / f"{name}_tree.json")
        entries.append({"scene": f"{name}.json", "tree": f"{name}_tree.json", "fold": fold_of[i], "seed": scene_seed})

    manifest = {"template": template.name, "seed": seed, "folds": folds, "entries": entries}
    path = write_json(manifest, out / MANIFEST_NAME)
    logger.info(f"Generated {n} scenes from template '{template.name}' into {out}")
    return path


@dataclass(frozen=True)
class Corpus:
    """A loaded manifest; scenes are read lazily."""

    root: Path
    manifest: CorpusManifest

    def __len__(self) -> int:
        return len(self.manifest.entries)

    @property
    def folds(self) -> int:
        return self.manifest.folds

    def load(self, index: int) -> Tuple[Scene, GroundTruthTree]:
        entry = self.manifest.entries[index]
        return load_scene(self.root / entry.scene), load_tree(self.root / entry.tree)

    def load_all(self) -> Tuple[List[Scene], List[GroundTruthTree]]:
        pairs = [self.load(i) for i in range(len(self))]
        return [s for s, _ in pairs], [t for _, t in pairs]

    def split(self, fold: int) -> Tuple[List[int], List[int]]:
        """Train and test indices when ``fold`` is held out."""
        train = [i for i, e in enumerate(self.manifest.entries) if e.fold != fold]
        test = [i for i, e in enumerate(self.manifest.entries) if e.fold == fold]
        return train, test


def load_corpus(path: Union[str, Path]) -> Corpus:
    """
    Load a corpus manifest.

    Args:
        path: Corpus directory or manifest file

    Returns:
        Corpus
    """
    path = Path(path)
    manifest_path = path / MANIFEST_NAME if path.is_dir() else path
    try:
        manifest = CorpusManifest.model_validate(read_json(manifest_path))
    except ValidationError as e:
        logger.error(f"Invalid corpus manifest {manifest_path}: {e}")
        raise SchemaError(describe_validation_error(e)) from e
    logger.info(f"Loaded corpus {manifest_path}: {len(manifest.entries)} scenes, {manifest.folds} folds")
    return Corpus(root=manifest_path.parent, manifest=manifest)
