"""End-to-end sample assembly: tracks + trajectory + rendered viewport clip.

A dataset sample couples a rendered perspective clip with the camera
trajectory that produced it and the ground-truth direction tracks,
retargeted into each frame's camera. Geometry is computed from world
directions only — two renders at different resolutions carry identical
ground truth.

On disk a sample is a directory::

    sample_00000/
        frames/frame_%05d.png   rendered perspective clip
        trajectory.json         rotations + per-frame intrinsics + motion echo
        tracks.json             ground-truth DirectionTrackSet

Track sources: imported 2D tracks (equirect or perspective grid), replacing
the neural segmentation/tracking stages, or per-instance mask sequences
from which query tracks are derived geometrically.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import io
from .config import Config
from .geometry import EquirectGrid, direction_to_equirect, direction_to_pixel, \
    minimal_roll_rotation, normalize, rotate_camera_to_world
from .motion import MotionSpec, Trajectory, apply_btf, generate
from .resample import render_perspective
from .tracks import DirectionTrack, DirectionTrackSet, cumulative_length, \
    lift_equirect_track, retarget, sample_queries, track_to_directions, transport_tracks_from_masks


@dataclass
class DatasetSample:
    clip_id: str
    frames_dir: Path | None
    trajectory: Trajectory
    gt: DirectionTrackSet
    source: str = ""


class PipelineError(RuntimeError):
    """Sub-operation failure, labelled with the pipeline stage."""

    def __init__(self, stage, error):
        super().__init__(f"[{stage}] {error}")
        self.stage = stage


def _world_tracks_from_imports(surface, tracks, recording_trajectory=None):
    """World directions and filter-space 2D points for imported tracks.

    surface is an EquirectGrid (tracks lift directly; the equirect frame is
    the world frame at identity) or an Intrinsics (perspective pixels; the
    recording trajectory composes the per-frame centering rotation,
    world = R_t @ d_cam).
    """
    out = []
    for tr in tracks:
        if isinstance(surface, EquirectGrid):
            world = lift_equirect_track(tr, surface)
        else:
            cam = track_to_directions(tr, surface)
            if recording_trajectory is None:
                raise ValueError("perspective track files need the recording trajectory")
            if len(recording_trajectory) != len(cam):
                raise ValueError(f"track {tr.track_id}: {len(cam)} frames vs trajectory "
                                 f"{len(recording_trajectory)}")
            world = np.stack(
                [rotate_camera_to_world(cam[t], recording_trajectory.rotations[t])
                 for t in range(len(cam))]
            )
        out.append((tr.track_id, world, tr.points))
    return out


def _world_tracks_from_masks(mask_seqs, grid, n_queries, seed):
    """Per-query world tracks via centroid transport (see tracks module)."""
    out = []
    for inst_idx, mask_seq in enumerate(mask_seqs):
        queries, _short = sample_queries(mask_seq[0], n_queries, seed + inst_idx)
        world = transport_tracks_from_masks(mask_seq, grid, queries)
        for q_idx in range(len(queries)):
            track_id = f"i{inst_idx:02d}_q{q_idx:04d}"
            u, v = direction_to_equirect(world[q_idx], grid)
            out.append((track_id, world[q_idx], np.stack([u, v], axis=-1)))
    return out


def build_trajectory(motion_spec, n_frames, r0, intrinsics):
    """Motion trajectory; the btf flag edits a static base with the inner motion."""
    if motion_spec.btf:
        base = generate(MotionSpec(kind="static", seed=motion_spec.seed), n_frames, r0, intrinsics)
        return apply_btf(base, replace(motion_spec, btf=False), seed=motion_spec.seed)
    return generate(motion_spec, n_frames, r0, intrinsics)


def assemble_sample(frames, grid, motion_spec, config=None, *, clip_id,
                    tracks=None, track_surface=None, recording_trajectory=None,
                    masks=None, out_dir=None, category="uncategorized",
                    recenter=True, n_threads=1, source=""):
    """Run the full pipeline for one clip and optionally write the sample.

    frames: equirect frames (T', H, W, 3 uint8); the first config.frames of
    them are used. Exactly one of tracks (list of PointTrack2D on
    track_surface, an EquirectGrid — default the source grid — or an
    Intrinsics with its recording_trajectory) or masks (list of
    per-instance mask sequences) must be given. Errors from sub-operations
    surface as PipelineError with the stage name.
    """
    config = config or Config()
    n = config.frames
    if len(frames) < n:
        raise PipelineError("input", f"clip has {len(frames)} frames, config wants {n}")
    frames = list(frames)[:n]
    if (tracks is None) == (masks is None):
        raise PipelineError("input", "provide exactly one of tracks= or masks=")

    try:
        if tracks is not None:
            world_tracks = _world_tracks_from_imports(track_surface if track_surface is not None
                                                      else grid, tracks, recording_trajectory)
        else:
            world_tracks = _world_tracks_from_masks(masks, grid, config.n_queries, config.seed)
    except (ValueError, KeyError) as e:
        raise PipelineError("tracks", e) from e

    world_tracks = [(tid, np.asarray(w, dtype=np.float64)[:n], np.asarray(p)[:n])
                    for tid, w, p in world_tracks]
    for tid, w, _p in world_tracks:
        if len(w) != n:
            raise PipelineError("tracks", f"track {tid} has {len(w)} frames, clip has {n}")

    if config.l_thresh >= 0:
        world_tracks = [t for t in world_tracks if cumulative_length(t[2]) > config.l_thresh]
        if not world_tracks:
            raise PipelineError("filter", f"no track exceeds l_thresh={config.l_thresh}")

    try:
        intr = config.intrinsics()
        r0 = np.eye(3)
        if recenter:
            first = normalize(np.mean([w[0] for _tid, w, _p in world_tracks], axis=0))
            r0 = minimal_roll_rotation(first)
        trajectory = build_trajectory(motion_spec, n, r0, intr)
    except ValueError as e:
        raise PipelineError("trajectory", e) from e

    gt_tracks = []
    for tid, world, _pts in world_tracks:
        cam, flags = retarget(world, trajectory)
        pix, in_front = direction_to_pixel(cam[0], trajectory.intrinsics[0])
        query = tuple(pix.tolist()) if in_front else (-1.0, -1.0)
        gt_tracks.append(DirectionTrack(track_id=tid, query=query, directions=cam, in_frame=flags))
    # btf is its own rotation-type category regardless of the inner motion
    gt = DirectionTrackSet(
        clip_id=clip_id,
        tracks=gt_tracks,
        meta={"motion_kind": "btf" if motion_spec.btf else motion_spec.kind,
              "category": category, "clip_id": clip_id},
    )

    frames_dir = None
    if out_dir is not None:
        out_dir = Path(out_dir)
        try:
            frames_dir = out_dir / "frames"
            for t in range(n):
                rendered = render_perspective(frames[t], trajectory.rotations[t],
                                              trajectory.intrinsics[t], n_threads=n_threads)
                io.write_png(frames_dir / (io.FRAME_PATTERN % t), rendered)
            io.save_trajectory(out_dir / "trajectory.json", trajectory, motion=motion_spec)
            io.write_json(out_dir / "tracks.json",
                          gt.to_dict(intrinsics=intr, trajectory_ref="trajectory.json"))
        except OSError as e:
            raise PipelineError("write", e) from e

    return DatasetSample(clip_id=clip_id, frames_dir=frames_dir, trajectory=trajectory,
                         gt=gt, source=source)


def load_sample_gt(path):
    """DirectionTrackSet from a sample's tracks.json (or a sample directory)."""
    path = Path(path)
    if path.is_dir():
        path = path / "tracks.json"
    return DirectionTrackSet.from_dict(io.read_json(path))
