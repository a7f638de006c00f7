"""Perspective viewport rendering from equirectangular frames.

Inverse mapping: each output pixel is lifted to a camera ray, rotated into
the world frame and sampled from the source panorama — bilinear for colour,
nearest-neighbour for binary masks. Longitude wraps, latitude rows clamp at
the poles, and there is no mip/anti-alias filtering (single-tap sampling;
extreme minification aliases, which is accepted).

Determinism contract: output bytes are identical regardless of how many
worker threads the caller requests. The mapping arithmetic is written as
explicit elementwise expressions (no matmul reductions) so per-row results
never depend on the partitioning.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .geometry import EquirectGrid, pixel_in_bounds, rotate_world_to_camera

__all__ = ["render_perspective", "project_mask", "frustum_on_equirect", "grey_outside_frustum"]


def _equirect_coords_for_rows(rotation, intr, grid, row_start, row_stop):
    """Continuous source (u, v) for output rows [row_start, row_stop).

    Output pixel (i, j) -> camera ray normalize(K^-1 (i, j, 1)) -> world ray
    R @ ray -> equirect coordinates. All steps are elementwise with fixed
    evaluation order so results are independent of the row block shape.
    """
    i = np.arange(intr.width, dtype=np.float64)[None, :]
    j = np.arange(row_start, row_stop, dtype=np.float64)[:, None]
    x = (i - intr.cx) / intr.fx
    y = (j - intr.cy) / intr.fy
    y = np.broadcast_to(y, (row_stop - row_start, intr.width))
    x = np.broadcast_to(x, (row_stop - row_start, intr.width))
    n = np.sqrt(x * x + y * y + 1.0)
    x, y, z = x / n, y / n, 1.0 / n

    r = rotation
    wx = r[0, 0] * x + r[0, 1] * y + r[0, 2] * z
    wy = r[1, 0] * x + r[1, 1] * y + r[1, 2] * z
    wz = r[2, 0] * x + r[2, 1] * y + r[2, 2] * z

    lam = np.arctan2(wx, wz)
    phi = np.arcsin(np.clip(-wy, -1.0, 1.0))
    u = (lam + np.pi) / (2.0 * np.pi) * grid.width - 0.5
    v = (np.pi / 2.0 - phi) / np.pi * grid.height - 0.5
    return u, v


def _bilinear_sample(src, u, v):
    """Bilinear lookup with longitude wrap and latitude clamp.

    src is (H, W) or (H, W, C); u, v are continuous coordinates with integer
    values at texel centres. Returns float64 samples.
    """
    h, w = src.shape[:2]
    v = np.clip(v, 0.0, float(h - 1))
    u0 = np.floor(u)
    v0 = np.floor(v)
    fu = u - u0
    fv = v - v0
    # mod after floor: float mod alone can return exactly w for tiny negatives
    iu0 = np.mod(u0, w).astype(np.intp)
    iu1 = np.mod(u0 + 1.0, w).astype(np.intp)
    iv0 = v0.astype(np.intp)
    iv1 = np.minimum(iv0 + 1, h - 1)

    tl = src[iv0, iu0].astype(np.float64)
    tr = src[iv0, iu1].astype(np.float64)
    bl = src[iv1, iu0].astype(np.float64)
    br = src[iv1, iu1].astype(np.float64)
    if src.ndim == 3:
        fu = fu[..., None]
        fv = fv[..., None]
    top = tl * (1.0 - fu) + tr * fu
    bot = bl * (1.0 - fu) + br * fu
    return top * (1.0 - fv) + bot * fv


def _nearest_sample(src, u, v):
    """Nearest-neighbour lookup (round half up) with wrap/clamp semantics."""
    h, w = src.shape[:2]
    # floor yields exact integer floats, so the mod result is exact in [0, w)
    iu = np.mod(np.floor(u + 0.5), w).astype(np.intp)
    iv = np.clip(np.floor(v + 0.5), 0, h - 1).astype(np.intp)
    return src[iv, iu]


def _row_blocks(height, n_threads):
    n = max(1, int(n_threads))
    step = -(-height // n)
    return [(lo, min(lo + step, height)) for lo in range(0, height, step)]


def _render_rows(src, rotation, intr, grid, lo, hi):
    u, v = _equirect_coords_for_rows(rotation, intr, grid, lo, hi)
    vals = _bilinear_sample(src, u, v)
    return np.rint(vals).astype(np.uint8)


def render_perspective(src, rotation, intr, n_threads=1):
    """Render a perspective frame from an equirectangular source.

    src: (H_eq, W_eq, 3) uint8. The output size comes from intr. Sample
    values are rounded half-to-even to uint8. Bit-identical for any
    n_threads.
    """
    src = np.asarray(src)
    if src.ndim != 3 or src.shape[2] != 3 or src.dtype != np.uint8:
        raise ValueError(f"source frame must be (H, W, 3) uint8, got {src.shape} {src.dtype}")
    grid = EquirectGrid(src.shape[1], src.shape[0])
    blocks = _row_blocks(intr.height, n_threads)
    if len(blocks) == 1:
        return _render_rows(src, rotation, intr, grid, 0, intr.height)
    with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
        parts = list(pool.map(lambda b: _render_rows(src, rotation, intr, grid, b[0], b[1]), blocks))
    return np.concatenate(parts, axis=0)


def project_mask(src_mask, rotation, intr, n_threads=1):
    """Project an equirect binary mask into the perspective view.

    Nearest-neighbour sampling: masks are binary and bilinear would need an
    arbitrary threshold. Returns an (H, W) bool array.
    """
    src_mask = np.asarray(src_mask)
    if src_mask.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {src_mask.shape}")
    grid = EquirectGrid(src_mask.shape[1], src_mask.shape[0])
    mask = src_mask.astype(bool)

    def rows(b):
        u, v = _equirect_coords_for_rows(rotation, intr, grid, b[0], b[1])
        return _nearest_sample(mask, u, v)

    blocks = _row_blocks(intr.height, n_threads)
    if len(blocks) == 1:
        return rows((0, intr.height))
    with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
        parts = list(pool.map(rows, blocks))
    return np.concatenate(parts, axis=0)


def frustum_on_equirect(rotation, intr, grid):
    """Mask of equirect pixels whose direction falls inside the viewport.

    True at (u, v) iff the world direction of that pixel, expressed in the
    camera frame, is in front and projects inside [0, W) x [0, H).
    """
    from .geometry import direction_to_pixel, equirect_to_direction

    u = np.arange(grid.width, dtype=np.float64)[None, :]
    v = np.arange(grid.height, dtype=np.float64)[:, None]
    dirs = equirect_to_direction(np.broadcast_to(u, (grid.height, grid.width)),
                                 np.broadcast_to(v, (grid.height, grid.width)), grid)
    cam = rotate_world_to_camera(dirs, rotation)
    pix, in_front = direction_to_pixel(cam, intr)
    return in_front & pixel_in_bounds(pix, intr)


def grey_outside_frustum(src, rotation, intr, factor=0.35):
    """Copy of an equirect frame with outside-viewport regions darkened."""
    src = np.asarray(src)
    grid = EquirectGrid(src.shape[1], src.shape[0])
    inside = frustum_on_equirect(rotation, intr, grid)
    out = src.astype(np.float64)
    out[~inside] *= factor
    return np.rint(out).astype(np.uint8)
