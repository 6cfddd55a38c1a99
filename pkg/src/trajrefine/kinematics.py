"""Orientation updates keeping consecutive poses on constant-curvature arcs."""

from __future__ import annotations

import math

from .trajectory import Pose, normalize_angle, shortest_angle


def arc_residual(p_a: Pose, p_b: Pose) -> float:
    """Non-holonomic residual ``(cos ta + cos tb, sin ta + sin tb) x (xb - xa, yb - ya)``.

    Zero exactly when both headings make equal angles with the chord.
    """
    dx = p_b.x - p_a.x
    dy = p_b.y - p_a.y
    cx = math.cos(p_a.theta) + math.cos(p_b.theta)
    cy = math.sin(p_a.theta) + math.sin(p_b.theta)
    return cx * dy - cy * dx


def _chord_angle(p_a: Pose, p_b: Pose) -> float | None:
    dx = p_b.x - p_a.x
    dy = p_b.y - p_a.y
    if dx == 0.0 and dy == 0.0:
        return None
    return math.atan2(dy, dx)


def update_orientations(
    p_prev: Pose,
    p_mid: Pose,
    p_next: Pose,
    *,
    pin_prev: bool = False,
    pin_next: bool = False,
) -> tuple[Pose, Pose, Pose]:
    """Reassign headings of a pose triple so both pairs satisfy the arc condition.

    With chord angles ``g1`` (prev -> mid) and ``g2`` (mid -> next) the middle
    heading becomes the chord bisector and the outer headings are mirrored
    through their chords: ``theta_prev = 2 g1 - theta_mid``,
    ``theta_next = 2 g2 - theta_mid``.  A zero-length chord leaves its pair
    untouched.  Positions are never modified.

    ``pin_prev`` / ``pin_next`` hold an outer heading fixed; the middle
    heading is then solved from the pinned side.  With both pinned only the
    first pair can be satisfied.
    """
    g1 = _chord_angle(p_prev, p_mid)
    g2 = _chord_angle(p_mid, p_next)
    if g1 is None and g2 is None:
        return p_prev, p_mid, p_next

    if pin_prev and g1 is not None:
        th_mid = 2 * g1 - p_prev.theta
    elif pin_next and g2 is not None:
        th_mid = 2 * g2 - p_next.theta
    elif g1 is None:
        th_mid = g2
    elif g2 is None:
        th_mid = g1
    else:
        th_mid = g1 + shortest_angle(g1, g2) / 2
    th_mid = normalize_angle(th_mid)

    new_prev = p_prev
    new_next = p_next
    if g1 is not None and not pin_prev:
        new_prev = p_prev.with_theta(2 * g1 - th_mid)
    if g2 is not None and not pin_next:
        new_next = p_next.with_theta(2 * g2 - th_mid)
    return new_prev, p_mid.with_theta(th_mid), new_next
