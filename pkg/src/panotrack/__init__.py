"""panotrack: 360 video resampling, directional point tracks and angular metrics.

Library layout mirrors the pipeline: geometry (directions, rotations,
projections), resample (equirect -> perspective rendering), motion (camera
trajectories), tracks (2D tracks -> direction tracks -> retargeting), synth
(analytic test scenes), curation (clip quality checks), metrics (benchmark
evaluation), dataset (end-to-end sample assembly) and cli.
"""

from .geometry import (
    DegenerateInputError,
    EquirectGrid,
    Intrinsics,
    InvalidIntrinsicsError,
    angular_distance,
    direction_to_equirect,
    direction_to_pixel,
    equirect_to_direction,
    euler_to_rotation,
    is_rotation,
    normalize,
    pixel_to_direction,
    procrustes_so3,
    rotate_camera_to_world,
    rotate_world_to_camera,
    rotation_about_axis,
)
from .config import Config
from .motion import MotionSpec, Trajectory, apply_btf, generate, motion_angles, object_centered
from .resample import frustum_on_equirect, project_mask, render_perspective
from .tracks import (
    DirectionTrack,
    DirectionTrackSet,
    PointTrack2D,
    cumulative_length,
    filter_tracks,
    lift_equirect_track,
    retarget,
    sample_queries,
    track_to_directions,
)
from .metrics import ThresholdConfig, delta_accuracy, evaluate, mean_angular_distance
from .synth import MarkerSpec, SceneSpec, marker_direction, render_scene
from .curation import curate, dynamics_check, poster_check, seam_check
from .dataset import DatasetSample, assemble_sample

__version__ = "0.1.0"
