"""Render pinhole viewports out of an equirectangular panorama.

Writes a synthetic panorama, three perspective crops and a Figure-style
visualization with everything outside the viewport greyed out.

Run: python demos/02_perspective_resampling.py [out_dir]
"""

import sys
from pathlib import Path

import numpy as np

from panotrack import EquirectGrid, Intrinsics, MarkerSpec, SceneSpec, render_perspective, render_scene
from panotrack import io
from panotrack.geometry import euler_to_rotation
from panotrack.resample import frustum_on_equirect, grey_outside_frustum

out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out/resampling")

scene = SceneSpec(
    frames=2,
    grid=EquirectGrid(1024, 512),
    markers=(
        MarkerSpec(kind="static", lon0=0.0, lat0=0.0, radius=8.0, color=(255, 60, 40)),
        MarkerSpec(kind="static", lon0=135.0, lat0=30.0, radius=10.0, color=(40, 220, 255)),
    ),
)
pano = render_scene(scene).frames[0]
io.write_png(out_dir / "panorama.png", pano)

K = Intrinsics.from_hfov(256, 256, 70.528)
for name, (pitch, yaw) in {"ahead": (0, 0), "left": (0, -60), "up_right": (-25, 135)}.items():
    R = euler_to_rotation(pitch, 0.0, yaw)
    crop = render_perspective(pano, R, K, n_threads=4)
    io.write_png(out_dir / f"crop_{name}.png", crop)
    inside = frustum_on_equirect(R, K, scene.grid)
    print(f"crop '{name}': viewport covers {inside.mean() * 100:.1f}% of panorama pixels")

io.write_png(out_dir / "frustum_viz.png", grey_outside_frustum(pano, np.eye(3), K))
print(f"wrote panorama, crops and frustum visualization to {out_dir}/")
