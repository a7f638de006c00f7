"""Clip quality checks: seam continuity, scene dynamics, poster detection.

Constructs one good clip and three characteristic rejects, and shows what
each check reports.

Run: python demos/06_curation.py
"""

import numpy as np

from panotrack import MarkerSpec, SceneSpec, dynamics_check, poster_check, render_scene, seam_check
from panotrack.geometry import EquirectGrid

scene = SceneSpec(frames=10, grid=EquirectGrid(512, 256),
                  markers=(MarkerSpec(kind="great_circle", speed=11.0, radius=20.0,
                                      color=(255, 255, 255)),))
frames = render_scene(scene).frames

print("well-formed 360 clip:")
print(f"  seam NCC        {seam_check(frames[0]):+.4f}  (continuous across the wrap)")
print(f"  dynamics        {dynamics_check(frames):8.2f}  (moving content)")
print(f"  poster flagged  {poster_check(frames[0])[0]}")

# Reject 1: a broken seam — the right half of the panorama is longitude-shifted,
# as happens when a flat video is repackaged with 360 metadata.
broken = frames[0].copy()
w = broken.shape[1]
broken[:, w // 2 :] = np.roll(frames[0][:, w // 2 :], w // 4, axis=1)
print(f"\nbroken seam:      seam NCC {seam_check(broken):+.4f}")

# Reject 2: a static clip — nothing to track.
print(f"static clip:      dynamics {dynamics_check([frames[0]] * 10):8.2f}")

# Reject 3: a poster — a flat image floating on black borders.
poster = np.zeros((256, 512, 3), dtype=np.uint8)
poster[64:192, 128:384] = 210
flagged, box = poster_check(poster)
print(f"poster frame:     flagged {flagged}, content box {box}")
