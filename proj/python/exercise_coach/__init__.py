"""Exercise coach: synthetic traces, replay through the coaching pipeline, and
perception helpers.

    >>> import exercise_coach as ec
    >>> ec.generate("a.trace", exercises=["shoulder_press"], reps=5, seed=7)
    >>> report = ec.evaluate("a.trace", policy="turn-based")
    >>> report["reps.shoulder_press.detected_correct"]
    5.0
"""

from ._core import (
    CoachError,
    default_config,
    estimate_head_pose,
    evaluate,
    eye_aspect_ratio,
    generate,
    joint_angles,
    project_face,
    retarget,
    simulate,
)

__all__ = [
    "CoachError",
    "default_config",
    "estimate_head_pose",
    "evaluate",
    "eye_aspect_ratio",
    "generate",
    "joint_angles",
    "project_face",
    "retarget",
    "simulate",
]
