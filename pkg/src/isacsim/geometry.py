"""Shared geometry: angles, segments and Fresnel-zone tests.

Conventions used everywhere in this package:

- Right-handed coordinates, z up; the floor plan is the x-y plane, meters.
- Azimuth is measured in the x-y plane from the +x axis, counterclockwise
  positive, in radians. "Clockwise" (used for body orientations, floor-plan
  view) therefore means decreasing azimuth.
- Elevation is the angle above the horizontal plane.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

SPEED_OF_LIGHT = 299_792_458.0  # m/s

TWO_PI = 2.0 * math.pi


def wrap_angle(angle):
    """Wrap an angle (scalar or array) to [-pi, pi)."""
    return (np.asarray(angle) + math.pi) % TWO_PI - math.pi


def as_point(p) -> np.ndarray:
    """Coerce to a float (3,) vector."""
    a = np.asarray(p, dtype=float)
    if a.shape != (3,):
        raise DomainError(f"expected a 3-vector, got shape {a.shape}")
    return a


def azimuth_of(vec) -> float:
    """Azimuth of a direction vector (uses x, y components only)."""
    v = np.asarray(vec, dtype=float)
    return math.atan2(v[1], v[0])


def elevation_of(vec) -> float:
    """Elevation of a direction vector above the horizontal plane."""
    v = np.asarray(vec, dtype=float)
    return math.atan2(v[2], math.hypot(v[0], v[1]))


def unit(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=float)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise DomainError("cannot normalize a zero vector")
    return v / n


def first_fresnel_radius(d1: float, d2: float, wavelength: float) -> float:
    """Radius of the first Fresnel zone at the (d1, d2) split of a link.

    All arguments in meters; raises DomainError for non-positive input.
    """
    if d1 <= 0.0 or d2 <= 0.0 or wavelength <= 0.0:
        raise DomainError(
            f"first_fresnel_radius needs positive arguments, got "
            f"d1={d1}, d2={d2}, wavelength={wavelength}"
        )
    return math.sqrt(wavelength * d1 * d2 / (d1 + d2))


def segment_split(a, b, p) -> tuple[float, float]:
    """Foot-of-perpendicular of point p on segment a-b.

    Returns (t, lateral) where t is the normalized position of the foot
    along a->b (t=0 at a, t=1 at b, unclamped) and lateral is the
    perpendicular distance of p from the infinite line through a and b.
    """
    a = as_point(a)
    b = as_point(b)
    p = as_point(p)
    ab = b - a
    ab2 = float(np.dot(ab, ab))
    if ab2 == 0.0:
        raise DomainError("segment endpoints coincide")
    t = float(np.dot(p - a, ab)) / ab2
    foot = a + t * ab
    lateral = float(np.linalg.norm(p - foot))
    return t, lateral


def point_in_first_fresnel(tx, rx, p, wavelength: float) -> bool:
    """True iff p lies inside the first Fresnel zone of the tx-rx link.

    Membership requires the foot of perpendicular to fall strictly between
    the endpoints; a point at (or beyond) an array face is never "inside".
    """
    t, lateral = segment_split(tx, rx, p)
    if t <= 0.0 or t >= 1.0:
        return False
    length = float(np.linalg.norm(as_point(rx) - as_point(tx)))
    d1 = t * length
    d2 = (1.0 - t) * length
    return lateral < first_fresnel_radius(d1, d2, wavelength)
