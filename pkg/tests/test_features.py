"""Tests for node and pair features and the feature function over rule applicands."""
import math

import numpy as np
import pytest

from src.features.entity import make_entity
from src.features.extractor import f
from src.features.schema import GEOM_V1, GEOM_V2, NODE_FEATURES, PAIR_FEATURES, get_schema, node_features, pair_features
from src.scene.model import Segment
from src.scene.stats import SegmentStats
from src.utils.errors import FeatureSchemaError
from tests.factories import chain_scene, entity, rect_points, rect_segment


def floor_square(seg_id=0, z=0.0, x=0.0):
    return rect_segment(seg_id, (x, 0.0, z), (0.5, 0.0, 0.0), (0.0, 0.5, 0.0))


def wall_square(seg_id=1):
    return rect_segment(seg_id, (0.0, 0.5, 0.0), (0.5, 0.0, 0.0), (0.0, 0.0, 0.5))


class TestNodeFeatures:
    def test_horizontal_square(self):
        values = node_features(floor_square(z=0.7).stats)
        named = dict(zip(NODE_FEATURES, values))
        spread = float(np.var(np.linspace(0.0, 0.5, 6)))
        assert named["centroid_z"] == pytest.approx(0.7)
        assert named["normal_z"] == pytest.approx(1.0)
        assert named["hull_area"] == pytest.approx(0.25)
        assert named["linearness"] == pytest.approx(0.0, abs=1e-12)
        assert named["planarness"] == pytest.approx(spread)
        assert named["scatter"] == pytest.approx(spread)
        assert named["vertical_extent"] == pytest.approx(0.0)
        assert named["horizontal_extent"] == pytest.approx(math.sqrt(12.0 * spread))

    def test_a_line_is_linear(self):
        points = np.column_stack([np.linspace(0.0, 1.0, 20), np.zeros(20), np.zeros(20)])
        points[::2, 1] = 1e-3
        values = dict(zip(NODE_FEATURES, node_features(SegmentStats.from_points(points))))
        assert values["linearness"] > 100 * values["planarness"]


class TestPairFeatures:
    def test_identical_entities(self):
        a = entity("Floor", floor_square())
        values = dict(zip(PAIR_FEATURES, pair_features(a, a)))
        assert values["horiz_centroid_dist"] == 0.0
        assert values["vert_centroid_disp"] == 0.0
        assert values["normal_dot"] == pytest.approx(1.0)
        assert values["coplanarity"] == pytest.approx(1.0)

    def test_stacked_planes(self):
        top = entity("tableTop", floor_square(0, z=0.5))
        floor = entity("Floor", floor_square(1, z=0.0))
        values = dict(zip(PAIR_FEATURES, pair_features(top, floor)))
        assert values["vert_centroid_disp"] == pytest.approx(0.5)
        assert values["horiz_centroid_dist"] == pytest.approx(0.0)
        assert values["z_gap_signed"] == pytest.approx(0.5)
        assert values["coplanarity"] == pytest.approx(math.exp(-0.5))
        assert values["min_dist"] == 0.0

    def test_argument_order_matters(self):
        top = entity("tableTop", floor_square(0, z=0.5))
        floor = entity("Floor", floor_square(1, z=0.0))
        assert pair_features(floor, top)[1] == pytest.approx(-0.5)

    def test_coplanarity(self):
        a = entity("Floor", floor_square(0))
        b = entity("Floor", floor_square(1, x=0.5))
        wall = entity("Wall", wall_square(2))
        assert pair_features(a, b)[4] == pytest.approx(1.0)
        assert pair_features(a, wall)[4] == 0.0

    def test_min_dist_comes_from_the_scene(self):
        scene = chain_scene(3)
        a, c = (entity("x", scene.by_id[0]), entity("y", scene.by_id[2]))
        assert pair_features(a, c, scene)[3] == pytest.approx(scene.min_distance([0], [2]))

    def test_vertical_angle_difference(self):
        floor = entity("Floor", floor_square(0))
        wall = entity("Wall", wall_square(1))
        values = GEOM_V2.pair(wall, floor)
        assert len(values) == len(GEOM_V2.pair_names)
        assert values[-1] == pytest.approx(math.pi / 2)


class TestFeatureFunction:
    def setup_method(self):
        self.a = entity("tableTop", floor_square(0, z=0.7))
        self.b = entity("tableLeg", wall_square(1))
        self.c = entity("tableDrawer", floor_square(2, z=0.5, x=0.1))

    def test_lengths(self):
        assert GEOM_V1.length(1) == 8
        assert GEOM_V1.length(3) == 42
        assert GEOM_V2.length(2) == 23
        assert len(f([self.a, self.b, self.c], schema=GEOM_V1)) == 42

    def test_permutation_invariance(self):
        first = f([self.a, self.b, self.c]).values
        for order in ([self.c, self.a, self.b], [self.b, self.c, self.a], [self.c, self.b, self.a]):
            assert np.array_equal(f(order).values, first)

    def test_intermediates_expand_to_their_parts(self):
        ab = make_entity("tableTop_tableLeg", [self.a, self.b], intermediate=True)
        assert [p.name for p in ab.leaf_parts()] == ["tableLeg", "tableTop"]
        assert np.array_equal(f([ab, self.c]).values, f([self.a, self.b, self.c]).values)

    def test_length_mismatch(self):
        with pytest.raises(FeatureSchemaError, match="does not match"):
            f([self.a, self.b], schema=GEOM_V1, expected_length=42)

    def test_no_applicands(self):
        with pytest.raises(FeatureSchemaError):
            f([])

    def test_unknown_schema(self):
        with pytest.raises(FeatureSchemaError, match="geom-v9"):
            get_schema("geom-v9")

    def test_rigid_motion_about_the_vertical(self):
        specs = [
            (0, (0.0, 0.0, 0.7), (0.5, 0.0, 0.0), (0.0, 0.4, 0.0)),
            (1, (0.0, 0.4, 0.0), (0.5, 0.0, 0.0), (0.0, 0.0, 0.7)),
            (2, (0.2, 0.1, 0.3), (0.3, 0.1, 0.0), (0.0, 0.0, 0.2)),
        ]
        theta = 0.7
        rotation = np.array([[math.cos(theta), -math.sin(theta), 0.0], [math.sin(theta), math.cos(theta), 0.0], [0, 0, 1]])
        shift = np.array([2.0, -1.0, 0.0])
        names = ["tableTop", "tableLeg", "tableDrawer"]

        def entities(transform):
            out = []
            for name, (seg_id, origin, u, v) in zip(names, specs):
                points = transform(rect_points(origin, u, v))
                out.append(entity(name, Segment(seg_id, SegmentStats.from_points(points))))
            return out

        before = f(entities(lambda p: p)).values
        after = f(entities(lambda p: p @ rotation.T + shift)).values
        np.testing.assert_allclose(after, before, atol=1e-9)
