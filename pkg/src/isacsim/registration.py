"""Rigid registration of camera point clouds via marker correspondences.

Each depth camera sees three marker spheres on a calibration square; the
least-squares rigid transform (centroid alignment plus SVD rotation with
reflection correction) maps its local frame onto the global frame the
square defines. Correspondence is by index; there is no automatic
matching. The estimator accepts any number >= 3 of corresponding points,
so noisy or redundant marker sets work unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateConfiguration, DomainError


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise DomainError(f"expected an (N, 3) point array, got shape {pts.shape}")
    return pts


@dataclass(frozen=True, eq=False)
class MarkerTriple:
    """Three non-collinear marker centers, meters."""

    points: np.ndarray  # (3, 3), one marker per row

    def __post_init__(self):
        pts = _as_points(self.points)
        if pts.shape[0] != 3:
            raise DomainError("a marker triple holds exactly three points")
        area = 0.5 * np.linalg.norm(
            np.cross(pts[1] - pts[0], pts[2] - pts[0])
        )
        if area <= 1e-9:
            raise DegenerateConfiguration(
                f"markers are collinear (triangle area {area:.3e} m^2)"
            )
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True, eq=False)
class RigidTransform:
    """Proper rigid transform p' = R p + t."""

    rotation: np.ndarray  # (3, 3)
    translation: np.ndarray  # (3,)

    def __post_init__(self):
        r = np.asarray(self.rotation, dtype=float)
        t = np.asarray(self.translation, dtype=float)
        if r.shape != (3, 3) or t.shape != (3,):
            raise DomainError("rotation must be (3,3) and translation (3,)")
        if np.linalg.norm(r.T @ r - np.eye(3)) > 1e-6:
            raise DomainError("rotation matrix is not orthonormal")
        if np.linalg.det(r) < 0.0:
            raise DomainError("rotation matrix is a reflection")
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls(np.eye(3), np.zeros(3))

    def compose(self, inner: "RigidTransform") -> "RigidTransform":
        """Transform equivalent to applying `inner` first, then `self`."""
        return RigidTransform(
            self.rotation @ inner.rotation,
            self.rotation @ inner.translation + self.translation,
        )


def fit_rigid_transform(local, global_ref) -> tuple[RigidTransform, float]:
    """Least-squares rigid transform mapping local points onto global ones.

    Accepts MarkerTriple or (N, 3) arrays with N >= 3 corresponding points.
    Returns (transform, residual RMS in meters). The SVD solution is
    reflection-corrected by flipping the smallest singular direction, so
    the rotation is always proper.
    """
    src = local.points if isinstance(local, MarkerTriple) else _as_points(local)
    dst = (
        global_ref.points
        if isinstance(global_ref, MarkerTriple)
        else _as_points(global_ref)
    )
    if src.shape != dst.shape:
        raise DomainError("local and global point sets differ in size")
    if src.shape[0] < 3:
        raise DomainError("need at least three corresponding points")
    for pts, name in ((src, "local"), (dst, "global")):
        area = 0.5 * np.linalg.norm(np.cross(pts[1] - pts[0], pts[2] - pts[0]))
        if pts.shape[0] == 3 and area <= 1e-9:
            raise DegenerateConfiguration(f"{name} markers are collinear")

    centroid_src = src.mean(axis=0)
    centroid_dst = dst.mean(axis=0)
    h = (src - centroid_src).T @ (dst - centroid_dst)
    u, _, vt = np.linalg.svd(h)
    v = vt.T
    d = np.sign(np.linalg.det(v @ u.T))
    rotation = v @ np.diag([1.0, 1.0, d]) @ u.T
    translation = centroid_dst - rotation @ centroid_src
    transform = RigidTransform(rotation, translation)

    residuals = apply_transform(transform, src) - dst
    rms = float(np.sqrt(np.mean(np.sum(residuals**2, axis=1))))
    return transform, rms


def apply_transform(transform: RigidTransform, cloud) -> np.ndarray:
    """Apply p' = R p + t to every point; an isometry on the cloud."""
    pts = _as_points(cloud) if len(cloud) else np.zeros((0, 3))
    return pts @ transform.rotation.T + transform.translation


def merge_clouds(clouds) -> np.ndarray:
    """Concatenate transformed clouds, preserving input order."""
    parts = [apply_transform(t, pts) for t, pts in clouds]
    if not parts:
        raise DomainError("merge_clouds needs at least one cloud")
    return np.concatenate(parts, axis=0)


# ---------------------------------------------------------------------------
# File formats: ASCII XYZ clouds and 12-number transform records.


def read_xyz(path) -> np.ndarray:
    """Read an ASCII point cloud, one 'x y z' triple per line (meters)."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split()
        if len(fields) != 3:
            raise DomainError(f"{path}:{lineno}: expected three coordinates")
        rows.append([float(f) for f in fields])
    return np.array(rows, dtype=float).reshape(-1, 3)


def write_xyz(path, cloud) -> None:
    pts = _as_points(cloud) if len(cloud) else np.zeros((0, 3))
    lines = [" ".join(repr(float(v)) for v in p) for p in pts]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def write_transform(path, transform: RigidTransform) -> None:
    """Write 12 numbers: the rotation rows, then the translation."""
    numbers = list(transform.rotation.reshape(-1)) + list(transform.translation)
    Path(path).write_text(" ".join(repr(float(v)) for v in numbers) + "\n")


def read_transform(path) -> RigidTransform:
    fields = Path(path).read_text().split()
    if len(fields) != 12:
        raise DomainError(f"{path}: transform record needs 12 numbers")
    values = np.array([float(f) for f in fields])
    return RigidTransform(values[:9].reshape(3, 3), values[9:])
