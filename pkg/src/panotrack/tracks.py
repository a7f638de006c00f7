"""2D point tracks, their lift to unit directions, and retargeting.

A 2D track is a (T, 2) float array of (i, j) = (column, row) pixel
coordinates, either on a perspective image (lifted through the intrinsics)
or on the equirectangular grid (lifted through the sphere mapping). World
directions are retargeted onto new camera trajectories purely geometrically
— in-frame flags say whether the ground-truth direction projects inside the
viewport, not whether the point is unoccluded.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.random import Generator, Philox

from .geometry import (
    direction_to_pixel,
    equirect_to_direction,
    pixel_in_bounds,
    pixel_to_direction,
    rotate_world_to_camera,
    shortest_arc_rotation,
)
from .motion import mask_centroid_direction


@dataclass
class PointTrack2D:
    """One query point's per-frame pixel positions."""

    track_id: str
    points: np.ndarray  # (T, 2) float (i, j)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        if self.points.ndim != 2 or self.points.shape[1] != 2:
            raise ValueError(f"track points must be (T, 2), got {self.points.shape}")
        if not np.all(np.isfinite(self.points)):
            raise ValueError(f"track {self.track_id} has non-finite coordinates")


@dataclass
class DirectionTrack:
    """Ground truth for one query: camera-frame directions and in-frame flags."""

    track_id: str
    query: tuple            # (u, v) pixel in frame 0 of the perspective clip
    directions: np.ndarray  # (T, 3) unit vectors, camera frame
    in_frame: np.ndarray    # (T,) bool

    def __post_init__(self):
        self.directions = np.asarray(self.directions, dtype=np.float64)
        self.in_frame = np.asarray(self.in_frame, dtype=bool)
        if self.directions.ndim != 2 or self.directions.shape[1] != 3:
            raise ValueError(f"directions must be (T, 3), got {self.directions.shape}")
        if self.in_frame.shape != (len(self.directions),):
            raise ValueError("in_frame length must match directions length")
        norms = np.linalg.norm(self.directions, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-6):
            raise ValueError(f"track {self.track_id}: directions are not unit length")


@dataclass
class DirectionTrackSet:
    """All ground-truth tracks of one clip plus its metadata."""

    clip_id: str
    tracks: list            # DirectionTrack
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(t.directions) for t in self.tracks}
        if len(lengths) > 1:
            raise ValueError(f"tracks have inconsistent lengths: {sorted(lengths)}")

    @property
    def n_frames(self):
        return len(self.tracks[0].directions) if self.tracks else 0

    def to_dict(self, intrinsics=None, trajectory_ref=None):
        d = {
            "clip_id": self.clip_id,
            "frames": self.n_frames,
            "tracks": [
                {
                    "id": t.track_id,
                    "query": [float(t.query[0]), float(t.query[1])],
                    "directions": t.directions.tolist(),
                    "in_frame": t.in_frame.tolist(),
                }
                for t in self.tracks
            ],
            "meta": dict(self.meta),
        }
        if intrinsics is not None:
            d["width"] = intrinsics.width
            d["height"] = intrinsics.height
            d["intrinsics"] = intrinsics.to_dict()
        if trajectory_ref is not None:
            d["trajectory_ref"] = trajectory_ref
        return d

    @classmethod
    def from_dict(cls, d):
        tracks = [
            DirectionTrack(
                track_id=str(t["id"]),
                query=tuple(t["query"]),
                directions=np.asarray(t["directions"], dtype=np.float64),
                in_frame=np.asarray(t["in_frame"], dtype=bool),
            )
            for t in d["tracks"]
        ]
        return cls(clip_id=str(d["clip_id"]), tracks=tracks, meta=dict(d.get("meta", {})))


def sample_queries(mask, n_q, seed):
    """Sample query pixels uniformly without replacement from a mask.

    Returns (points, shortfall): points is (m, 2) int (u, v) = (column,
    row); when the mask has fewer than n_q true pixels all of them are
    returned and shortfall is True. Deterministic for a given seed.
    """
    mask = np.asarray(mask).astype(bool)
    vs, us = np.nonzero(mask)
    if len(us) == 0:
        raise ValueError("cannot sample queries from an empty mask")
    rng = Generator(Philox(key=int(seed) & (2**64 - 1)))
    if len(us) <= n_q:
        order = rng.permutation(len(us))
        return np.stack([us[order], vs[order]], axis=1), len(us) < n_q
    idx = rng.choice(len(us), size=int(n_q), replace=False)
    return np.stack([us[idx], vs[idx]], axis=1), False


def track_to_directions(track, intrinsics_seq):
    """Lift a perspective-pixel track to camera-frame unit directions.

    intrinsics_seq is a single Intrinsics (shared by all frames) or a
    per-frame sequence of the track's length.
    """
    points = track.points if isinstance(track, PointTrack2D) else np.asarray(track, dtype=np.float64)
    if hasattr(intrinsics_seq, "fx"):
        return pixel_to_direction(points, intrinsics_seq)
    intrinsics_seq = list(intrinsics_seq)
    if len(intrinsics_seq) != len(points):
        raise ValueError(f"{len(intrinsics_seq)} intrinsics for {len(points)} frames")
    return np.stack([pixel_to_direction(p, k) for p, k in zip(points, intrinsics_seq)], axis=0)


def cumulative_length(track):
    """Total 2D path length: sum of Euclidean distances of consecutive points.

    Seam-crossing equirect tracks are measured raw (no wrap unfolding),
    which can only overcount and therefore only retain more tracks.
    """
    points = track.points if isinstance(track, PointTrack2D) else np.asarray(track, dtype=np.float64)
    if len(points) < 2:
        raise ValueError(f"cumulative length needs >= 2 frames, got {len(points)}")
    steps = np.diff(points, axis=0)
    return float(np.sqrt(np.sum(steps * steps, axis=1)).sum())


def filter_tracks(tracks, l_thresh):
    """Keep tracks whose cumulative length strictly exceeds l_thresh (stable order)."""
    return [t for t in tracks if cumulative_length(t) > l_thresh]


def lift_equirect_track(track, grid):
    """World unit directions for a track on the equirectangular grid."""
    points = track.points if isinstance(track, PointTrack2D) else np.asarray(track, dtype=np.float64)
    return equirect_to_direction(points[..., 0], points[..., 1], grid)


def retarget(world_dirs, trajectory):
    """Express world directions in each frame's camera and flag visibility.

    Returns (cam_dirs (T, 3), in_frame (T,) bool): in_frame is true iff the
    direction is in front of the camera and projects inside the viewport.
    """
    world_dirs = np.asarray(world_dirs, dtype=np.float64)
    if len(world_dirs) != len(trajectory):
        raise ValueError(f"{len(world_dirs)} directions for {len(trajectory)} trajectory frames")
    cam = np.empty_like(world_dirs)
    flags = np.empty(len(world_dirs), dtype=bool)
    for t in range(len(world_dirs)):
        cam[t] = rotate_world_to_camera(world_dirs[t], trajectory.rotations[t])
        pix, in_front = direction_to_pixel(cam[t], trajectory.intrinsics[t])
        flags[t] = bool(in_front) and bool(pixel_in_bounds(pix, trajectory.intrinsics[t]))
    return cam, flags


def transport_tracks_from_masks(mask_seq, grid, queries):
    """Per-query world-direction tracks from an instance's mask sequence.

    The instance's motion is summarised by its per-frame mask centroid;
    each query's frame-0 direction is carried along by the shortest-arc
    rotation from centroid[0] to centroid[t]. Exact when the centroid moves
    on a great circle (rigid single-axis motion), an approximation
    otherwise.
    """
    centroids = np.stack([mask_centroid_direction(m, grid) for m in mask_seq], axis=0)
    q = np.asarray(queries, dtype=np.float64)
    q_dirs = equirect_to_direction(q[:, 0], q[:, 1], grid)
    out = np.empty((len(q), len(centroids), 3), dtype=np.float64)
    out[:, 0] = q_dirs
    for t in range(1, len(centroids)):
        r = shortest_arc_rotation(centroids[0], centroids[t])
        out[:, t] = q_dirs @ r.T
    return out
