"""Independent reference implementations used as test oracles.

reference_render is a deliberately plain per-pixel scalar loop following
the documented mapping conventions (numpy scalar transcendentals: glibc's
math.atan2/asin differ from numpy's kernels by 1 ULP on ~8% of inputs,
which would defeat bit-identity checks; numpy scalar calls are verified
bit-identical to its array kernels). It shares no code with the library's
vectorized renderer.
"""

import numpy as np


def reference_render(src, rotation, intr):
    """Single-threaded per-pixel perspective render; returns uint8 (H, W, 3)."""
    h_eq, w_eq = src.shape[:2]
    r = rotation
    out = np.empty((intr.height, intr.width, 3), dtype=np.uint8)
    for j in range(intr.height):
        for i in range(intr.width):
            x = (i - intr.cx) / intr.fx
            y = (j - intr.cy) / intr.fy
            n = np.sqrt(x * x + y * y + 1.0)
            x, y, z = x / n, y / n, 1.0 / n
            wx = r[0, 0] * x + r[0, 1] * y + r[0, 2] * z
            wy = r[1, 0] * x + r[1, 1] * y + r[1, 2] * z
            wz = r[2, 0] * x + r[2, 1] * y + r[2, 2] * z
            lam = np.arctan2(wx, wz)
            phi = np.arcsin(min(max(-wy, -1.0), 1.0))
            u = (lam + np.pi) / (2.0 * np.pi) * w_eq - 0.5
            v = (np.pi / 2.0 - phi) / np.pi * h_eq - 0.5
            v = min(max(v, 0.0), float(h_eq - 1))
            u0 = np.floor(u)
            v0 = np.floor(v)
            fu = u - u0
            fv = v - v0
            iu0 = int(u0 % w_eq)
            iu1 = int((u0 + 1.0) % w_eq)
            iv0 = int(v0)
            iv1 = min(iv0 + 1, h_eq - 1)
            for c in range(3):
                tl = float(src[iv0, iu0, c])
                tr = float(src[iv0, iu1, c])
                bl = float(src[iv1, iu0, c])
                br = float(src[iv1, iu1, c])
                top = tl * (1.0 - fu) + tr * fu
                bot = bl * (1.0 - fu) + br * fu
                out[j, i, c] = np.uint8(np.rint(top * (1.0 - fv) + bot * fv))
    return out


def reference_project_mask(mask, rotation, intr):
    """Per-pixel nearest-neighbour mask projection."""
    h_eq, w_eq = mask.shape[:2]
    r = rotation
    out = np.empty((intr.height, intr.width), dtype=bool)
    for j in range(intr.height):
        for i in range(intr.width):
            x = (i - intr.cx) / intr.fx
            y = (j - intr.cy) / intr.fy
            n = np.sqrt(x * x + y * y + 1.0)
            x, y, z = x / n, y / n, 1.0 / n
            wx = r[0, 0] * x + r[0, 1] * y + r[0, 2] * z
            wy = r[1, 0] * x + r[1, 1] * y + r[1, 2] * z
            wz = r[2, 0] * x + r[2, 1] * y + r[2, 2] * z
            lam = np.arctan2(wx, wz)
            phi = np.arcsin(min(max(-wy, -1.0), 1.0))
            u = (lam + np.pi) / (2.0 * np.pi) * w_eq - 0.5
            v = (np.pi / 2.0 - phi) / np.pi * h_eq - 0.5
            iu = int(np.floor(u + 0.5) % w_eq)
            iv = int(min(max(np.floor(v + 0.5), 0.0), float(h_eq - 1)))
            out[j, i] = mask[iv, iu]
    return out
