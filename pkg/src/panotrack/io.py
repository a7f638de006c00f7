"""On-disk formats: PNG frame directories, mask PNGs and JSON schemas.

Clips are directories of frame_%05d.png (8-bit RGB); masks are 8-bit
grayscale PNGs with 0 = false and 255 = true. Rotations serialize as 9
row-major reals, directions as 3 reals, and every angle in a file is in
degrees. JSON is written with sorted keys so identical data produces
identical bytes.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np
from PIL import Image

from .geometry import EquirectGrid, Intrinsics
from .motion import MotionSpec, Trajectory
from .tracks import PointTrack2D

FRAME_PATTERN = "frame_%05d.png"
_FRAME_RE = re.compile(r"frame_(\d{5})\.png$")


def write_json(path, data):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(data, f, sort_keys=True, separators=(",", ":"))
        f.write("\n")


def read_json(path):
    with open(path) as f:
        return json.load(f)


def write_png(path, array):
    """8-bit PNG: (H, W, 3) uint8 as RGB, 2-D bool/uint8 as grayscale."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    array = np.asarray(array)
    if array.dtype == bool:
        array = array.astype(np.uint8) * 255
    if array.ndim == 2:
        Image.fromarray(array, mode="L").save(path, format="PNG")
    elif array.ndim == 3 and array.shape[2] == 3:
        Image.fromarray(array, mode="RGB").save(path, format="PNG")
    else:
        raise ValueError(f"cannot encode array of shape {array.shape} as PNG")


def read_png(path):
    with Image.open(path) as img:
        if img.mode == "L":
            return np.asarray(img, dtype=np.uint8)
        return np.asarray(img.convert("RGB"), dtype=np.uint8)


def read_mask_png(path):
    """Grayscale mask PNG to bool; any value >= 128 counts as true."""
    return read_png(path) >= 128


def list_frame_files(clip_dir):
    clip_dir = Path(clip_dir)
    if not clip_dir.is_dir():
        raise FileNotFoundError(f"clip directory not found: {clip_dir}")
    files = sorted(p for p in clip_dir.iterdir() if _FRAME_RE.search(p.name))
    if not files:
        raise FileNotFoundError(f"no frame_%05d.png files in {clip_dir}")
    return files


def read_clip(clip_dir):
    return [read_png(p) for p in list_frame_files(clip_dir)]


def write_clip(clip_dir, frames):
    clip_dir = Path(clip_dir)
    clip_dir.mkdir(parents=True, exist_ok=True)
    for t, frame in enumerate(frames):
        write_png(clip_dir / (FRAME_PATTERN % t), frame)
    return clip_dir


def write_mask_sequence(mask_dir, masks):
    mask_dir = Path(mask_dir)
    mask_dir.mkdir(parents=True, exist_ok=True)
    for t, mask in enumerate(masks):
        write_png(mask_dir / (FRAME_PATTERN % t), np.asarray(mask, dtype=bool))
    return mask_dir


def read_mask_sequence(mask_dir):
    return [read_mask_png(p) for p in list_frame_files(mask_dir)]


def save_trajectory(path, trajectory, motion=None, seed=None):
    write_json(path, trajectory.to_dict(motion=motion, seed=seed))


def load_trajectory(path):
    return Trajectory.from_dict(read_json(path))


def load_motion_spec(d):
    return MotionSpec.from_dict(d)


def write_track_file(path, tracks, grid=None, intrinsics=None):
    """Imported-2D-track format: {grid, tracks: [{id, points: [[i, j] x T]}]}.

    The grid declaration says which surface the pixels live on: an
    equirect grid or a perspective camera (with intrinsics).
    """
    if (grid is None) == (intrinsics is None):
        raise ValueError("declare exactly one of grid= (equirect) or intrinsics= (perspective)")
    if grid is not None:
        decl = {"kind": "equirect", "width": grid.width, "height": grid.height}
    else:
        decl = {"kind": "perspective", "intrinsics": intrinsics.to_dict()}
    data = {
        "grid": decl,
        "tracks": [{"id": t.track_id, "points": np.asarray(t.points).tolist()} for t in tracks],
    }
    write_json(path, data)


def read_track_file(path):
    """Returns (kind, grid_or_intrinsics, [PointTrack2D])."""
    data = read_json(path)
    try:
        decl = data["grid"]
        kind = decl["kind"]
        if kind == "equirect":
            surface = EquirectGrid(int(decl["width"]), int(decl["height"]))
        elif kind == "perspective":
            surface = Intrinsics.from_dict(decl["intrinsics"])
        else:
            raise KeyError(f"unknown grid kind {kind!r}")
        tracks = [PointTrack2D(track_id=str(t["id"]), points=np.asarray(t["points"], dtype=np.float64))
                  for t in data["tracks"]]
    except (KeyError, TypeError) as e:
        raise ValueError(f"{path}: malformed track file ({e})") from e
    return kind, surface, tracks
