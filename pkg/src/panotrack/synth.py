"""Procedural equirectangular test scenes with analytically known motion.

Markers are filled spherical caps (exact per-pixel angular tests, so masks
stay correct at the poles and across the seam) moving along closed-form
paths; the per-frame centre directions are recorded exactly. Backgrounds
are low frequency and wrap-continuous in longitude, so seam checks pass by
construction. The emitted clip directory, mask PNGs and track JSON use the
same formats the main pipeline consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

from .geometry import EquirectGrid, direction_to_equirect, equirect_to_direction, \
    rotation_about_axis
from .motion import mask_centroid_direction

MARKER_KINDS = ("static", "great_circle", "small_circle", "lissajous")
BACKGROUND_KINDS = ("gradient", "checker")


@dataclass(frozen=True)
class MarkerSpec:
    """One moving cap: path kind, speed (deg/frame), start (lon, lat) degrees,
    cap radius degrees and paint colour.

    lissajous paths ignore speed and use the amp/freq/phase fields
    (amplitudes in degrees, frequencies in cycles per frame); keep
    amplitude + |lat0| under 90 degrees so the path stays off the poles.
    """

    kind: str = "great_circle"
    speed: float = 3.0
    lon0: float = 0.0
    lat0: float = 0.0
    radius: float = 5.0
    color: tuple = (255, 64, 32)
    amp_lon: float = 30.0
    amp_lat: float = 15.0
    freq_lon: float = 1.0 / 32.0
    freq_lat: float = 2.0 / 32.0
    phase: float = 0.0

    def __post_init__(self):
        if self.kind not in MARKER_KINDS:
            raise ValueError(f"unknown marker kind {self.kind!r}")
        if self.radius <= 0 or not np.isfinite(self.speed):
            raise ValueError("marker radius must be > 0 and speed finite")


@dataclass(frozen=True)
class SceneSpec:
    frames: int = 32
    markers: tuple = (MarkerSpec(),)
    background: str = "gradient"
    checker_cells: tuple = (8, 4)
    grid: EquirectGrid = EquirectGrid(1024, 512)
    seed: int = 0

    def __post_init__(self):
        if self.frames < 2:
            raise ValueError("scene needs at least 2 frames")
        if self.background not in BACKGROUND_KINDS:
            raise ValueError(f"unknown background {self.background!r}")


@dataclass
class SynthOutput:
    frames: list          # T arrays (H, W, 3) uint8
    directions: np.ndarray  # (M, T, 3) exact marker centre directions
    masks: list           # M lists of T (H, W) bool cap masks
    spec: SceneSpec


def _lonlat_direction(lon_deg, lat_deg):
    lam = np.radians(lon_deg)
    phi = np.radians(lat_deg)
    return np.stack(
        [np.cos(phi) * np.sin(lam), -np.sin(phi), np.cos(phi) * np.cos(lam)], axis=-1
    )


def marker_direction(marker, t):
    """Closed-form centre direction of a marker at frame t (scalar or array)."""
    t = np.asarray(t, dtype=np.float64)
    d0 = _lonlat_direction(marker.lon0, marker.lat0)
    if marker.kind == "static":
        return np.broadcast_to(d0, t.shape + (3,)).copy()
    if marker.kind == "small_circle":
        return _lonlat_direction(marker.lon0 + marker.speed * t, np.full_like(t, marker.lat0))
    if marker.kind == "lissajous":
        lon = marker.lon0 + marker.amp_lon * np.sin(2 * np.pi * marker.freq_lon * t + marker.phase)
        lat = marker.lat0 + marker.amp_lat * np.sin(2 * np.pi * marker.freq_lat * t)
        return _lonlat_direction(lon, lat)
    # great_circle: rotate the start direction about a fixed world axis
    axis = "y" if abs(d0[1]) < 1.0 - 1e-9 else "x"
    if t.ndim == 0:
        return rotation_about_axis(axis, marker.speed * float(t)) @ d0
    return np.stack([rotation_about_axis(axis, marker.speed * float(ti)) @ d0 for ti in t], axis=0)


def _gradient_background(grid):
    """Smooth wrap-continuous pattern whose vertical phase varies with longitude.

    Adjacent longitude strips stay strongly correlated (the seam phase is
    shared), while distant longitudes decorrelate — exactly what the seam
    check needs from a well-formed vs a broken panorama.
    """
    u = np.arange(grid.width, dtype=np.float64)[None, :]
    v = np.arange(grid.height, dtype=np.float64)[:, None]
    lam = (u + 0.5) / grid.width * 2.0 * np.pi - np.pi
    tv = (v + 0.5) / grid.height
    psi = 0.9 * np.pi * np.cos(lam)
    img = np.empty((grid.height, grid.width, 3), dtype=np.float64)
    for c in range(3):
        img[..., c] = 128.0 + 90.0 * np.sin(2.0 * np.pi * tv + psi + c * 2.0 * np.pi / 3.0)
    return np.rint(np.clip(img, 0, 255)).astype(np.uint8)


def _checker_background(grid, cells):
    n_lon, n_lat = cells
    u = np.arange(grid.width)[None, :]
    v = np.arange(grid.height)[:, None]
    ci = (u * n_lon) // grid.width
    cj = (v * n_lat) // grid.height
    dark = (ci + cj) % 2 == 0
    img = np.where(dark[..., None], np.array([60, 70, 90]), np.array([200, 190, 170]))
    return img.astype(np.uint8)


def render_scene(spec):
    """Rasterize a scene; returns frames, exact directions and cap masks.

    Deterministic for a fixed spec. Later markers paint over earlier ones,
    but masks are geometric (cap membership) and ignore paint order.
    """
    grid = spec.grid
    u = np.broadcast_to(np.arange(grid.width, dtype=np.float64)[None, :], (grid.height, grid.width))
    v = np.broadcast_to(np.arange(grid.height, dtype=np.float64)[:, None], (grid.height, grid.width))
    pixel_dirs = equirect_to_direction(u, v, grid)

    background = (_gradient_background(grid) if spec.background == "gradient"
                  else _checker_background(grid, spec.checker_cells))

    m = len(spec.markers)
    t_all = np.arange(spec.frames, dtype=np.float64)
    directions = (np.stack([marker_direction(mk, t_all) for mk in spec.markers], axis=0)
                  if m else np.empty((0, spec.frames, 3)))

    frames = []
    masks = [[] for _ in range(m)]
    for t in range(spec.frames):
        frame = background.copy()
        for k, mk in enumerate(spec.markers):
            cos_r = np.cos(np.radians(mk.radius))
            cap = pixel_dirs @ directions[k, t] >= cos_r
            frame[cap] = np.array(mk.color, dtype=np.uint8)
            masks[k].append(cap)
        frames.append(frame)
    return SynthOutput(frames=frames, directions=directions, masks=masks, spec=spec)


def centroid_tracks(output):
    """Equirect 2D tracks of each marker's rasterized mask centroid.

    This is what the pipeline sees (rasterization-bounded), as opposed to
    the exact directions the oracle records; per-marker arrays of (T, 2)
    continuous (u, v).
    """
    grid = output.spec.grid
    tracks = []
    for mask_seq in output.masks:
        pts = np.empty((len(mask_seq), 2), dtype=np.float64)
        for t, mask in enumerate(mask_seq):
            c = mask_centroid_direction(mask, grid)
            cu, cv = direction_to_equirect(c, grid)
            pts[t] = (float(cu), float(cv))
        tracks.append(pts)
    return tracks


def preset_scene(name, frames=32, grid=None, seed=0):
    """Named scenes used by the CLI; 'single-marker' is the canonical oracle."""
    grid = grid or EquirectGrid(1024, 512)
    if name == "single-marker":
        markers = (MarkerSpec(kind="great_circle", speed=3.0, lon0=0.0, lat0=0.0, radius=5.0),)
    elif name == "two-markers":
        markers = (
            MarkerSpec(kind="great_circle", speed=3.0, lon0=0.0, lat0=0.0, radius=5.0),
            MarkerSpec(kind="small_circle", speed=-4.0, lon0=90.0, lat0=25.0, radius=4.0,
                       color=(40, 200, 255)),
        )
    elif name == "static-marker":
        markers = (MarkerSpec(kind="static", speed=0.0, lon0=0.0, lat0=0.0, radius=5.0),)
    else:
        raise ValueError(f"unknown scene preset {name!r}")
    return SceneSpec(frames=frames, markers=markers, grid=grid, seed=seed)


def scene_spec_to_dict(spec):
    d = asdict(spec)
    d["grid"] = {"width": spec.grid.width, "height": spec.grid.height}
    d["markers"] = [asdict(m) for m in spec.markers]
    return d


def scene_spec_from_dict(d):
    grid = EquirectGrid(int(d["grid"]["width"]), int(d["grid"]["height"]))
    markers = tuple(MarkerSpec(**{**m, "color": tuple(m["color"])}) for m in d.get("markers", []))
    return SceneSpec(
        frames=int(d.get("frames", 32)),
        markers=markers or (MarkerSpec(),),
        background=d.get("background", "gradient"),
        checker_cells=tuple(d.get("checker_cells", (8, 4))),
        grid=grid,
        seed=int(d.get("seed", 0)),
    )
