"""Spherical and pinhole camera geometry on unit direction vectors.

Conventions used throughout the package:

Camera frame (right-handed, standard computer vision):
  +x right, +y down, +z forward (optical axis). A pixel (i, j) is
  (column, row) in continuous coordinates where integer values are texel
  centres.

World frame:
  Identical to the camera frame at identity rotation. Rotations are stored
  camera-to-world: the columns of R are the camera axes expressed in world
  coordinates, so world = R @ camera and camera = R.T @ world.

Equirectangular mapping:
  Horizontal = longitude lam in [-pi, pi), vertical = latitude phi in
  [-pi/2, pi/2], image centre maps to +z, top row to the -y pole.
  Pixel centres sit at (u + 0.5) / W of the full turn, so integral
  resolutions tile the sphere without double-counting the seam.

Directions are plain numpy arrays of shape (..., 3); rotations are (3, 3)
float arrays. All angles in public signatures are degrees.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class InvalidIntrinsicsError(ValueError):
    """Raised for pinhole parameters that do not define an invertible K."""


class DegenerateInputError(ValueError):
    """Raised when an input admits no unique answer (e.g. rank < 2 Procrustes)."""


@dataclass(frozen=True)
class Intrinsics:
    """Pinhole matrix parameters: focal lengths and principal point in pixels."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if not (np.isfinite(self.fx) and np.isfinite(self.fy)) or self.fx <= 0 or self.fy <= 0:
            raise InvalidIntrinsicsError(f"focal lengths must be positive finite, got fx={self.fx}, fy={self.fy}")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise InvalidIntrinsicsError(
                f"principal point ({self.cx}, {self.cy}) outside image {self.width}x{self.height}"
            )

    @classmethod
    def from_hfov(cls, width, height, hfov_deg):
        """Square-pixel intrinsics with the given full horizontal FOV in degrees."""
        if not 0.0 < hfov_deg < 179.0:
            raise InvalidIntrinsicsError(f"horizontal FOV must be in (0, 179) degrees, got {hfov_deg}")
        f = (width / 2.0) / np.tan(np.radians(hfov_deg) / 2.0)
        return cls(fx=f, fy=f, cx=(width - 1) / 2.0, cy=(height - 1) / 2.0, width=width, height=height)

    def matrix(self):
        return np.array(
            [[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]], dtype=np.float64
        )

    def to_dict(self):
        return {"fx": self.fx, "fy": self.fy, "cx": self.cx, "cy": self.cy,
                "width": self.width, "height": self.height}

    @classmethod
    def from_dict(cls, d):
        return cls(fx=d["fx"], fy=d["fy"], cx=d["cx"], cy=d["cy"],
                   width=int(d["width"]), height=int(d["height"]))


@dataclass(frozen=True)
class EquirectGrid:
    """Size of an equirectangular image; width spans the full turn."""

    width: int
    height: int

    def __post_init__(self):
        if self.width < 2 or self.height < 1:
            raise ValueError(f"grid must be at least 2x1, got {self.width}x{self.height}")
        if self.width % 2 != 0:
            raise ValueError(f"equirect width must be even, got {self.width}")


def normalize(v):
    """Scale vectors in the last axis to unit norm."""
    v = np.asarray(v, dtype=np.float64)
    n = np.sqrt(np.sum(v * v, axis=-1, keepdims=True))
    return v / n


def pixel_to_direction(p, intr):
    """Lift pixel coordinates to unit directions in the camera frame.

    p: (..., 2) array of (i, j) = (column, row). Points may lie outside the
    image bounds; the result always has z > 0 (forward hemisphere).
    Returns (..., 3) unit vectors, normalize(K^-1 @ (i, j, 1)).
    """
    p = np.asarray(p, dtype=np.float64)
    x = (p[..., 0] - intr.cx) / intr.fx
    y = (p[..., 1] - intr.cy) / intr.fy
    z = np.ones_like(x)
    return normalize(np.stack([x, y, z], axis=-1))


def direction_to_pixel(d, intr):
    """Project camera-frame directions to pixel coordinates.

    Returns (pixels, in_front) where pixels is (..., 2) and in_front is a
    boolean array. Coordinates are NaN wherever d.z <= 0 (behind or on the
    camera plane); callers must gate on in_front.
    """
    d = np.asarray(d, dtype=np.float64)
    z = d[..., 2]
    in_front = z > 0
    safe_z = np.where(in_front, z, 1.0)
    i = intr.fx * d[..., 0] / safe_z + intr.cx
    j = intr.fy * d[..., 1] / safe_z + intr.cy
    pix = np.stack([i, j], axis=-1)
    pix = np.where(in_front[..., None], pix, np.nan)
    return pix, in_front


def pixel_in_bounds(p, intr):
    """Half-open in-image test 0 <= i < W, 0 <= j < H. NaN coords are out."""
    p = np.asarray(p, dtype=np.float64)
    i, j = p[..., 0], p[..., 1]
    return (i >= 0) & (i < intr.width) & (j >= 0) & (j < intr.height)


def equirect_to_direction(u, v, grid):
    """Unit world directions for continuous equirect pixel coordinates.

    u wraps modulo width; v reaching past the poles still produces a valid
    (clamped-latitude) direction via sin/cos. Pixel centres carry the +0.5
    offset described in the module docstring.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    lam = (u + 0.5) / grid.width * (2.0 * np.pi) - np.pi
    phi = np.pi / 2.0 - (v + 0.5) / grid.height * np.pi
    cos_phi = np.cos(phi)
    return np.stack([cos_phi * np.sin(lam), -np.sin(phi), cos_phi * np.cos(lam)], axis=-1)


def direction_to_equirect(d, grid):
    """Continuous equirect pixel coordinates (u, v) for unit directions.

    Exact inverse of equirect_to_direction away from the poles. u is not
    wrapped: the backward direction (0, 0, -1) has longitude +pi and maps
    to u = W - 0.5, the same sphere point as u = -0.5. At the exact poles
    u = 0 by convention.
    """
    d = np.asarray(d, dtype=np.float64)
    x, y, z = d[..., 0], d[..., 1], d[..., 2]
    lam = np.arctan2(x, z)
    phi = np.arcsin(np.clip(-y, -1.0, 1.0))
    u = (lam + np.pi) / (2.0 * np.pi) * grid.width - 0.5
    u = np.where((x == 0.0) & (z == 0.0), 0.0, u)
    v = (np.pi / 2.0 - phi) / np.pi * grid.height - 0.5
    return u, v


def rotate_world_to_camera(d_world, rotation):
    """Express world directions in the camera frame: R.T @ d, renormalized."""
    d = np.asarray(d_world, dtype=np.float64)
    return normalize(d @ rotation)  # d @ R == (R.T @ d.T).T row-wise


def rotate_camera_to_world(d_cam, rotation):
    """Express camera directions in the world frame: R @ d, renormalized."""
    d = np.asarray(d_cam, dtype=np.float64)
    return normalize(d @ rotation.T)


def angular_distance(d1, d2):
    """Angle between unit directions in degrees, in [0, 180].

    Uses atan2(|d1 x d2|, d1 . d2); unlike acos(dot) this stays accurate
    near 0 and 180 degrees.
    """
    d1 = np.asarray(d1, dtype=np.float64)
    d2 = np.asarray(d2, dtype=np.float64)
    cross = np.cross(d1, d2)
    cross_norm = np.sqrt(np.sum(cross * cross, axis=-1))
    dot = np.sum(d1 * d2, axis=-1)
    return np.degrees(np.arctan2(cross_norm, dot))


def rotation_about_axis(axis, degrees):
    """Right-handed rotation matrix about a coordinate axis ('x', 'y' or 'z')."""
    t = np.radians(degrees)
    c, s = np.cos(t), np.sin(t)
    if axis == "x":
        return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
    if axis == "y":
        return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
    if axis == "z":
        return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    raise ValueError(f"axis must be 'x', 'y' or 'z', got {axis!r}")


def euler_to_rotation(pitch_deg, roll_deg, yaw_deg):
    """Rotation from (pitch, roll, yaw) degrees in the fixed order X then Y then Z.

    R = Rx(pitch) @ Ry(yaw) @ Rz(roll): pitch about x, yaw about y, roll
    about z. With the y-down camera convention a +90 degree pitch carries
    +z onto -y.
    """
    return (
        rotation_about_axis("x", pitch_deg)
        @ rotation_about_axis("y", yaw_deg)
        @ rotation_about_axis("z", roll_deg)
    )


def is_rotation(r, tol=1e-9):
    """True when r is special orthogonal: R.T R = I and det R = +1 within tol."""
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (3, 3) or not np.all(np.isfinite(r)):
        return False
    if not np.allclose(r.T @ r, np.eye(3), atol=tol, rtol=0.0):
        return False
    return abs(np.linalg.det(r) - 1.0) <= tol


def procrustes_so3(m):
    """Nearest rotation to an arbitrary 3x3 matrix in Frobenius norm.

    Computed from the singular decomposition M = U S V^T as
    U diag(1, 1, det(U V^T)) V^T, which restricts the classic orthogonal
    Procrustes solution to det +1.

    Raises DegenerateInputError when fewer than two singular values are
    nonzero (second s.v. below 1e-12 of the largest): the nearest rotation
    is then not unique.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.shape != (3, 3) or not np.all(np.isfinite(m)):
        raise ValueError(f"expected a finite 3x3 matrix, got shape {m.shape}")
    u, s, vt = np.linalg.svd(m)
    if s[0] == 0.0 or s[1] <= 1e-12 * s[0]:
        raise DegenerateInputError(f"input has rank < 2 (singular values {s}); nearest rotation is not unique")
    d = np.sign(np.linalg.det(u @ vt))
    return (u * np.array([1.0, 1.0, d])) @ vt


def minimal_roll_rotation(forward_world, up_source=None):
    """Camera-to-world rotation pointing +z at forward_world with minimal roll.

    The camera's down axis (+y) is the world down (0, 1, 0) projected
    orthogonal to the view direction. When the view direction is within
    1e-6 of the poles that projection vanishes and up_source (a previous
    frame's camera +y column, or world +z when None) is used instead.
    """
    fwd = normalize(np.asarray(forward_world, dtype=np.float64))
    down = np.array([0.0, 1.0, 0.0])
    if np.linalg.norm(np.cross(fwd, down)) < 1e-6:
        down = np.array([0.0, 0.0, 1.0]) if up_source is None else np.asarray(up_source, dtype=np.float64)
    col_y = normalize(down - np.dot(down, fwd) * fwd)
    col_x = np.cross(col_y, fwd)
    return np.stack([col_x, col_y, fwd], axis=1)


def shortest_arc_rotation(d_from, d_to):
    """Minimal rotation carrying unit vector d_from onto d_to.

    Rodrigues form about d_from x d_to. Identity for coincident inputs;
    raises DegenerateInputError for antipodal inputs (axis undefined).
    """
    a = normalize(np.asarray(d_from, dtype=np.float64))
    b = normalize(np.asarray(d_to, dtype=np.float64))
    v = np.cross(a, b)
    c = float(np.dot(a, b))
    s2 = float(np.dot(v, v))
    if s2 < 1e-24:
        if c > 0:
            return np.eye(3)
        raise DegenerateInputError("antipodal directions: shortest-arc rotation is not unique")
    vx = np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])
    return np.eye(3) + vx + vx @ vx * ((1.0 - c) / s2)
