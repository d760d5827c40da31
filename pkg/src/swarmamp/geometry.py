"""2-D vector helpers on plain float tuples.

Positions and velocities are (x, y) tuples throughout the simulator; at
swarm sizes of a few dozen agents this is faster than array wrappers and
keeps every operation exactly reproducible.
"""

from __future__ import annotations

import math

Vec = tuple[float, float]

ZERO: Vec = (0.0, 0.0)


def add(a: Vec, b: Vec) -> Vec:
    return (a[0] + b[0], a[1] + b[1])


def sub(a: Vec, b: Vec) -> Vec:
    return (a[0] - b[0], a[1] - b[1])


def scale(a: Vec, k: float) -> Vec:
    return (a[0] * k, a[1] * k)


def norm(a: Vec) -> float:
    return math.hypot(a[0], a[1])


def dist(a: Vec, b: Vec) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def unit(a: Vec) -> Vec:
    """Unit vector along a; (0, 0) stays (0, 0)."""
    n = math.hypot(a[0], a[1])
    if n == 0.0:
        return ZERO
    return (a[0] / n, a[1] / n)


def clamp_norm(a: Vec, limit: float) -> Vec:
    """Scale a down so its norm does not exceed limit."""
    n = math.hypot(a[0], a[1])
    if n <= limit or n == 0.0:
        return a
    k = limit / n
    return (a[0] * k, a[1] * k)


def is_finite(a: Vec) -> bool:
    return math.isfinite(a[0]) and math.isfinite(a[1])
