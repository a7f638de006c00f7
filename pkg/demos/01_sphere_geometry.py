"""Direction math walkthrough: pixels, the sphere, rotations, Procrustes.

Run: python demos/01_sphere_geometry.py
"""

import numpy as np

from panotrack import (
    EquirectGrid,
    Intrinsics,
    angular_distance,
    direction_to_equirect,
    direction_to_pixel,
    equirect_to_direction,
    euler_to_rotation,
    pixel_to_direction,
    procrustes_so3,
    rotate_world_to_camera,
)

# A 256x256 pinhole camera with a 70.528-degree horizontal field of view.
# That FOV is chosen so one pixel spans exactly 0.2755 degrees.
K = Intrinsics.from_hfov(256, 256, 70.528)
print(f"focal length: {K.fx:.3f} px   degrees per pixel: {70.528 / 256}")

# Pixels lift to unit rays in the camera frame (+x right, +y down, +z forward).
centre = pixel_to_direction(np.array([K.cx, K.cy]), K)
corner = pixel_to_direction(np.array([0.0, 0.0]), K)
print(f"principal point ray: {centre}")
print(f"corner ray:          {np.round(corner, 4)}  ({angular_distance(centre, corner):.2f} deg off-axis)")

# The projection is invertible for anything in front of the camera.
pix, in_front = direction_to_pixel(corner, K)
print(f"corner ray projects back to {np.round(pix, 9)} (in front: {bool(in_front)})")

# The same rays live on the equirectangular sphere: the image centre of a
# panorama is the world +z direction, longitude wraps.
grid = EquirectGrid(1024, 512)
fwd = equirect_to_direction(grid.width / 2 - 0.5, grid.height / 2 - 0.5, grid)
u, v = direction_to_equirect(np.array([0.0, 0.0, -1.0]), grid)
print(f"panorama centre direction: {fwd}")
print(f"the backward direction lands on the wrap column: u={float(u):.1f}")

# A camera rotation moves world directions into the camera frame.
yaw90 = euler_to_rotation(0.0, 0.0, 90.0)
ahead = rotate_world_to_camera(np.array([1.0, 0.0, 0.0]), yaw90)
print(f"after a 90-degree yaw the world +x point sits straight ahead: {np.round(ahead, 12)}")

# Procrustes snaps noisy matrices back onto the rotation manifold — the
# operation a direction-regressing network uses on its raw 9-value output.
rng = np.random.default_rng(0)
noisy = yaw90 + 0.05 * rng.normal(size=(3, 3))
snapped = procrustes_so3(noisy)
print(f"Procrustes residual from the true rotation: {np.linalg.norm(snapped - yaw90):.4f}")
print(f"orthonormality defect: {np.abs(snapped.T @ snapped - np.eye(3)).max():.2e}")
