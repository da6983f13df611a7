"""Static scene catalog: the shapes trials are recorded against.

Six training shapes and three held-out test shapes. Each shape has a grasp
axis (horizontal grasp touches left/right edges, vertical grasp touches
top/bottom edges); the grasp points sit on the outline at ``half_extent``
pixels from the centroid along that axis, index finger on the +axis side.
Outlines are polygons in a local frame where the grasp half-extent is 1,
scaled by ``half_extent`` for rendering.
"""
from __future__ import annotations

from .core import ObjectContext

TRAIN_SHAPES = ("square", "cross", "t-up", "t-down", "t-left", "t-right")
TEST_SHAPES = ("triangle", "bar-h", "bar-v")
ALL_SHAPES = TRAIN_SHAPES + TEST_SHAPES

#: grasp axis per shape: "h" = left/right edges, "v" = top/bottom edges
GRASP_AXIS = {
    "square": "h",
    "cross": "v",
    "t-up": "v",
    "t-down": "v",
    "t-left": "h",
    "t-right": "h",
    "triangle": "h",
    "bar-h": "v",
    "bar-v": "h",
}

# Unit-frame outlines (grasp half-extent = 1). y grows downward (scene pixels).
_T_UP = [(-1.0, 1.0), (1.0, 1.0), (1.0, 0.33), (0.33, 0.33), (0.33, -1.0),
         (-0.33, -1.0), (-0.33, 0.33), (-1.0, 0.33)]
_UNIT_OUTLINES = {
    "square": [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)],
    "cross": [(-0.33, -1.0), (0.33, -1.0), (0.33, -0.33), (1.0, -0.33), (1.0, 0.33),
              (0.33, 0.33), (0.33, 1.0), (-0.33, 1.0), (-0.33, 0.33), (-1.0, 0.33),
              (-1.0, -0.33), (-0.33, -0.33)],
    "t-up": _T_UP,
    "t-down": [(-x, -y) for x, y in _T_UP],
    "t-left": [(y, x) for x, y in _T_UP],
    "t-right": [(-y, -x) for x, y in _T_UP],
    "triangle": [(-1.0, 0.75), (1.0, 0.75), (0.0, -1.0)],
    "bar-h": [(-2.4, -1.0), (2.4, -1.0), (2.4, 1.0), (-2.4, 1.0)],
    "bar-v": [(-1.0, -2.4), (1.0, -2.4), (1.0, 2.4), (-1.0, 2.4)],
}


def grasp_axis_vector(shape_id: str) -> tuple[float, float]:
    axis = GRASP_AXIS[shape_id]
    return (1.0, 0.0) if axis == "h" else (0.0, 1.0)


def outline(shape_id: str, half_extent: float) -> list[tuple[float, float]]:
    return [(x * half_extent, y * half_extent) for x, y in _UNIT_OUTLINES[shape_id]]


def object_context(
    shape_id: str, centroid: tuple[float, float], half_extent: float
) -> ObjectContext:
    """Context for a shape at a scene position: index at +axis, thumb at -axis."""
    ux, uy = grasp_axis_vector(shape_id)
    cx, cy = centroid
    return ObjectContext(
        centroid=(cx, cy),
        grasp_thumb=(cx - half_extent * ux, cy - half_extent * uy),
        grasp_index=(cx + half_extent * ux, cy + half_extent * uy),
        shape_id=shape_id,
    )


def scene_catalog(half_extent: float) -> dict:
    """JSON-ready catalog of all shapes, used by the service and the demo UI."""
    shapes = {}
    for sid in ALL_SHAPES:
        ux, uy = grasp_axis_vector(sid)
        shapes[sid] = {
            "shape_id": sid,
            "role": "train" if sid in TRAIN_SHAPES else "test",
            "grasp_axis": GRASP_AXIS[sid],
            "outline": [[x, y] for x, y in outline(sid, half_extent)],
            "grasp_thumb": [-half_extent * ux, -half_extent * uy],
            "grasp_index": [half_extent * ux, half_extent * uy],
            "half_extent": half_extent,
        }
    return {"shapes": shapes, "train_shapes": list(TRAIN_SHAPES), "test_shapes": list(TEST_SHAPES)}
