"""Non-neural quality checks for candidate 360 clips.

Three heuristics, each scored per frame and averaged over ten evenly spaced
frames of the clip: seam continuity (normalized cross-correlation between
the left and right edge strips — a panorama wraps, a repackaged flat video
does not), scene dynamics (mean temporal pixel variance — static clips
carry no tracking signal) and poster detection (bright content box
surrounded by black borders — a flat image projected into the 360 format).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from . import io
from .config import Config

_LUMA = np.array([0.299, 0.587, 0.114])


def _grayscale(frame):
    frame = np.asarray(frame)
    if frame.ndim == 2:
        return frame.astype(np.float64)
    return frame.astype(np.float64) @ _LUMA


def seam_check(frame, strip_px=8):
    """Zero-mean normalized cross-correlation of the wrap-seam edge strips.

    Compares columns [0, strip) against [W-strip, W) of the grayscale
    frame; a continuous panorama scores near +1. Returns a value in
    [-1, 1]; constant (zero-variance) strips score 1.0 by convention so the
    check never penalizes featureless content.
    """
    gray = _grayscale(frame)
    w = gray.shape[1]
    if not 1 <= strip_px <= w // 4:
        raise ValueError(f"strip_px must be in [1, W/4], got {strip_px} for width {w}")
    left = gray[:, :strip_px]
    right = gray[:, w - strip_px:]
    lz = left - left.mean()
    rz = right - right.mean()
    denom = np.sqrt(np.sum(lz * lz) * np.sum(rz * rz))
    if denom == 0.0:
        return 1.0
    return float(np.clip(np.sum(lz * rz) / denom, -1.0, 1.0))


def dynamics_check(frames):
    """Mean over pixels of temporal grayscale variance (population).

    Zero for identical frames; 127.5**2 for frames alternating 0/255.
    Invariant to frame order.
    """
    if len(frames) < 2:
        raise ValueError(f"dynamics check needs >= 2 frames, got {len(frames)}")
    stack = np.stack([_grayscale(f) for f in frames], axis=0)
    return float(np.mean(np.var(stack, axis=0)))


def poster_check(frame, window=32, offset=8.0, rho=0.6, tau_black=16.0 / 255.0):
    """Detect a flat image packed into the frame with black borders.

    Grayscale, binarize (above the local window mean minus offset AND above
    the absolute dark floor tau_black — a pure adaptive threshold marks
    constant black borders as foreground), take the largest 8-connected
    component's bounding box. Poster iff the box covers less than rho of
    the frame and the region outside it is dark; an all-dark frame (no
    content at all) is a degenerate poster.

    Returns (flagged, box) with box = (x0, y0, x1, y1) exclusive, or None
    when nothing binarizes.
    """
    gray = _grayscale(frame)
    h, w = gray.shape
    dark_floor = tau_black * 255.0
    local_mean = ndimage.uniform_filter(gray, size=window, mode="nearest")
    binary = (gray > local_mean - offset) & (gray > dark_floor)
    if not binary.any():
        return True, None
    labels, n_labels = ndimage.label(binary, structure=np.ones((3, 3), dtype=int))
    sizes = ndimage.sum_labels(np.ones_like(labels), labels, index=np.arange(1, n_labels + 1))
    largest = int(np.argmax(sizes)) + 1
    rows, cols = np.nonzero(labels == largest)
    box = (int(cols.min()), int(rows.min()), int(cols.max()) + 1, int(rows.max()) + 1)
    box_area = (box[2] - box[0]) * (box[3] - box[1])
    if box_area >= rho * h * w:
        return False, box
    border = np.ones((h, w), dtype=bool)
    border[box[1]:box[3], box[0]:box[2]] = False
    border_mean = float(gray[border].mean()) if border.any() else 255.0
    return border_mean < dark_floor, box


def sample_frame_indices(n_frames, n_samples=10):
    """Deterministic evenly spaced frame indices (all frames when short)."""
    if n_frames <= n_samples:
        return list(range(n_frames))
    return sorted(set(np.linspace(0, n_frames - 1, n_samples).astype(int).tolist()))


@dataclass
class CurationReport:
    checks: dict
    verdict: bool
    frames_used: list = field(default_factory=list)

    def to_dict(self):
        return {"checks": self.checks, "verdict": self.verdict, "frames_used": self.frames_used}


def curate(clip_dir, config=None, checks=("seam", "dynamics", "poster")):
    """Run the enabled checks over ten evenly spaced frames of a clip.

    Per-check mean scores are compared against the config thresholds; the
    verdict is the AND of the enabled pass flags. Unreadable frames raise,
    naming the file.
    """
    config = config or Config()
    files = io.list_frame_files(clip_dir)
    idx = sample_frame_indices(len(files))
    frames = []
    for i in idx:
        try:
            frames.append(io.read_png(files[i]))
        except OSError as e:
            raise OSError(f"unreadable frame {files[i]}: {e}") from e

    results = {}
    if "seam" in checks:
        per_frame = [seam_check(f, config.seam_strip_px) for f in frames]
        score = float(np.mean(per_frame))
        results["seam"] = {"score": score, "pass": bool(score >= config.seam_min),
                           "per_frame": per_frame}
    if "dynamics" in checks:
        score = dynamics_check(frames)
        results["dynamics"] = {"score": score, "pass": bool(score >= config.dynamics_min),
                               "per_frame": None}
    if "poster" in checks:
        flags = []
        boxes = []
        for f in frames:
            flagged, box = poster_check(f, window=config.poster_window, offset=config.poster_offset,
                                        rho=config.poster_rho, tau_black=config.poster_tau_black)
            flags.append(bool(flagged))
            boxes.append(list(box) if box is not None else None)
        score = float(np.mean(flags))
        results["poster"] = {"score": score, "pass": bool(score < config.poster_max_fraction),
                             "per_frame": flags, "boxes": boxes}

    verdict = all(r["pass"] for r in results.values())
    return CurationReport(checks=results, verdict=verdict, frames_used=idx)
