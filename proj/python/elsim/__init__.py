"""Skill-tree reinforcement learning on gridworlds."""

from elsim._core import (
    DensityGrid,
    GridSpec,
    GridWorld,
    Mlp,
    Trainer,
    histogram_intersection,
    mbie_eb,
    scale_return,
    soft_max_value,
    softmax,
)

__all__ = [
    "DensityGrid",
    "GridSpec",
    "GridWorld",
    "Mlp",
    "Trainer",
    "histogram_intersection",
    "mbie_eb",
    "scale_return",
    "soft_max_value",
    "softmax",
]
