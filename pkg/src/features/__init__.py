"""Feature function over grammar entities."""
from src.features.entity import Entity, make_entity
from src.features.extractor import FeatureVector, expand_parts, f
from src.features.schema import GEOM_V1, GEOM_V2, FeatureSchema, get_schema, node_features, pair_features

__all__ = [
    "Entity",
    "FeatureSchema",
    "FeatureVector",
    "GEOM_V1",
    "GEOM_V2",
    "expand_parts",
    "f",
    "get_schema",
    "make_entity",
    "node_features",
    "pair_features",
]
