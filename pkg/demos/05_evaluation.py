"""Score synthetic predictions with the angular benchmark metrics.

Builds a ground-truth sample, degrades it into three mock "trackers" of
different quality, and prints the benchmark table: threshold accuracy and
mean angular distance, split into in-frame and out-of-frame points.

Run: python demos/05_evaluation.py
"""

import numpy as np

from panotrack import Config, MarkerSpec, MotionSpec, SceneSpec, ThresholdConfig, \
    assemble_sample, render_scene
from panotrack.geometry import EquirectGrid, normalize
from panotrack.metrics import evaluate_clip
from panotrack.synth import centroid_tracks
from panotrack.tracks import DirectionTrack, DirectionTrackSet, PointTrack2D

scene = SceneSpec(frames=32, grid=EquirectGrid(1024, 512),
                  markers=(MarkerSpec(kind="great_circle", speed=3.0, radius=5.0),))
output = render_scene(scene)
tracks = [PointTrack2D("m0", centroid_tracks(output)[0])]
sample = assemble_sample(output.frames, scene.grid, MotionSpec(kind="spin_y", eta=0.0, seed=2),
                         Config(seed=2), clip_id="demo", tracks=tracks)
gt = sample.gt


def degraded(noise_deg, seed):
    rng = np.random.default_rng(seed)
    preds = []
    for t in gt.tracks:
        jitter = normalize(t.directions + np.radians(noise_deg) * rng.normal(size=t.directions.shape))
        preds.append(DirectionTrack(t.track_id, t.query, jitter, t.in_frame))
    return DirectionTrackSet(gt.clip_id, preds, meta=gt.meta)


cfg = ThresholdConfig()
print(f"thresholds: {[f'{t:.4f}' for t in cfg.thresholds_deg]} degrees\n")
header = ["d_avg all", "d_avg if", "d_avg oof", "AD all", "AD if", "AD oof"]
print(f"{'tracker':>18s} " + " ".join(f"{h:>9s}" for h in header))
for name, noise in (("oracle", 0.0), ("good (0.5 deg)", 0.5), ("sloppy (5 deg)", 5.0)):
    out = evaluate_clip(degraded(noise, seed=9), gt, cfg)
    cells = []
    for field in ("delta_avg", "ad"):
        for split in ("all", "if", "oof"):
            s = out["splits"][split]
            cells.append("       --" if s is None else f"{s[field]:9.4f}")
    print(f"{name:>18s} " + " ".join(cells))
