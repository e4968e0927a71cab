"""
Scene templates: the object roster and placement ranges of synthetic office scenes.
"""
from pathlib import Path
from typing import Dict, List, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.scene.io import describe_validation_error, read_json
from src.utils.errors import SchemaError

Range = Tuple[float, float]

# Objects and parts whose presence a template can randomize
OPTIONAL_OBJECTS = ("Wall", "Chair", "monitor", "keyboard", "CPU", "tableDrawer")


class SceneTemplate(BaseModel):
    """
    Roster and geometry of a desk-scale office.

    Every scene has a floor and a table (top plus one side leg). The objects in
    ``include`` appear with the given probability. Ranges are sampled uniformly;
    lengths are meters.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = "office"
    room_size: float = Field(default=2.0, ge=1.8)
    wall_height: float = Field(default=1.2, gt=0.0)
    include: Dict[str, float] = Field(
        default_factory=lambda: {
            "Wall": 1.0,
            "Chair": 0.8,
            "monitor": 1.0,
            "keyboard": 0.9,
            "CPU": 0.7,
            "tableDrawer": 0.5,
        }
    )
    table_height: Range = (0.6, 0.8)
    table_width: Range = (1.0, 1.3)
    table_depth: Range = (0.6, 0.75)
    monitor_width: Range = (0.4, 0.55)
    monitor_height: Range = (0.3, 0.4)
    keyboard_size: Range = (0.42, 0.46)
    cpu_height: Range = (0.35, 0.42)
    seat_height: Range = (0.42, 0.48)
    oversegmentation: Tuple[int, int] = (1, 3)
    noise_sigma: float = Field(default=0.002, ge=0.0)
    point_spacing: float = Field(default=0.035, gt=0.0, lt=0.05)
    occluded: List[Tuple[str, str]] = Field(default_factory=lambda: [("Floor", "chairBase")])

    @field_validator("include")
    @classmethod
    def _known_objects(cls, value: Dict[str, float]) -> Dict[str, float]:
        for name, p in value.items():
            if name not in OPTIONAL_OBJECTS:
                raise ValueError(f"unknown object '{name}', expected one of {', '.join(OPTIONAL_OBJECTS)}")
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability of '{name}' must lie in [0, 1]")
        return value

    @model_validator(mode="after")
    def _ordered_ranges(self) -> "SceneTemplate":
        for field_name, value in self:
            if field_name.endswith(("_height", "_width", "_depth", "_size")) and isinstance(value, tuple):
                if value[0] > value[1]:
                    raise ValueError(f"{field_name}: lower bound exceeds upper bound")
        low, high = self.oversegmentation
        if not 1 <= low <= high <= 3:
            raise ValueError("oversegmentation must satisfy 1 <= low <= high <= 3")
        if self.table_height[0] < 0.55:
            raise ValueError("table_height: tables lower than 0.55 m collide with chair seats")
        return self

    def probability(self, name: str) -> float:
        return self.include.get(name, 0.0)


OFFICE = SceneTemplate()

TABLE_ONLY = SceneTemplate(name="table", include={}, oversegmentation=(1, 1), occluded=[])

TEMPLATES: Dict[str, SceneTemplate] = {t.name: t for t in (OFFICE, TABLE_ONLY)}


def load_template(source: Union[str, Path]) -> SceneTemplate:
    """
    Resolve a template by bundled name or JSON file path.

    Raises:
        SchemaError: The file does not validate.
        FileNotFoundError: Neither a bundled name nor an existing file.
    """
    if str(source) in TEMPLATES:
        return TEMPLATES[str(source)]
    try:
        return SceneTemplate.model_validate(read_json(source))
    except ValidationError as e:
        raise SchemaError(describe_validation_error(e)) from e
