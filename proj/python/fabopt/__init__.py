"""Fabrication-constrained inverse design with always-feasible designs."""

import json

from ._core import (
    Brush,
    InvariantViolation,
    brush_width_for_rule,
    evaluate,
    generate,
    is_feasible,
    minimum_length_scale,
    optimize,
    problem_names,
    problem_shape,
    random_reward,
    transform,
)
from ._core import outline as _outline


def outline(design, pitch_nm=10.0):
    """Solid-region polygon loops (nm) as a dict."""
    return json.loads(_outline(design, pitch_nm))


__all__ = [
    "Brush",
    "InvariantViolation",
    "brush_width_for_rule",
    "evaluate",
    "generate",
    "is_feasible",
    "minimum_length_scale",
    "optimize",
    "outline",
    "problem_names",
    "problem_shape",
    "random_reward",
    "transform",
]
