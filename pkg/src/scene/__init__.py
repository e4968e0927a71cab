"""Segmented scenes, point statistics and ground-truth trees."""
from src.scene.io import load_scene, load_tree, save_scene, save_tree
from src.scene.model import Scene, Segment, build_adjacency, pair
from src.scene.stats import SegmentStats, merge_stats, plane_fit
from src.scene.tree import GroundTruthTree

__all__ = [
    "GroundTruthTree",
    "Scene",
    "Segment",
    "SegmentStats",
    "build_adjacency",
    "load_scene",
    "load_tree",
    "merge_stats",
    "pair",
    "plane_fit",
    "save_scene",
    "save_tree",
]
