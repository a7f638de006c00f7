"""Command-line interface: curate, gen-traj, resample, make-dataset, eval, synth.

Every subcommand is a deterministic function of its inputs, the seed and the
config file; reruns produce byte-identical outputs regardless of --threads
(PANO_TRACK_THREADS is the fallback when the flag is absent). Exit codes:
0 success / check passed, 1 quality check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np
from numpy.random import Generator, Philox

from . import io
from .config import Config, load_config
from .curation import curate
from .dataset import PipelineError, assemble_sample, build_trajectory
from .geometry import EquirectGrid
from .metrics import AlignmentError, ThresholdConfig, evaluate, render_table
from .motion import MOTION_KINDS, MotionSpec
from .resample import grey_outside_frustum, render_perspective
from .synth import MarkerSpec, SceneSpec, centroid_tracks, preset_scene, render_scene, \
    scene_spec_from_dict, scene_spec_to_dict
from .tracks import PointTrack2D


def _threads(args):
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("PANO_TRACK_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as e:
            raise ValueError(f"PANO_TRACK_THREADS={env!r} is not an integer") from e
    return os.cpu_count() or 1


def _config(args, **overrides):
    path = getattr(args, "config", None)
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    return load_config(path, overrides=overrides)


def _motion_spec(args, config):
    kwargs = dict(config.motion)
    if getattr(args, "motion", None):
        kwargs["kind"] = args.motion
    for flag, key in (("theta_min", "theta_min"), ("theta_max", "theta_max"), ("eta", "eta")):
        value = getattr(args, flag, None)
        if value is not None:
            kwargs[key] = value
    if getattr(args, "btf", False):
        kwargs["btf"] = True
    if getattr(args, "seed", None) is not None:
        kwargs["seed"] = config.seed  # an explicit --seed beats a file's motion.seed
    else:
        kwargs.setdefault("seed", config.seed)
    valid = {f.name for f in fields(MotionSpec)}
    unknown = set(kwargs) - valid
    if unknown:
        raise ValueError(f"unknown motion parameters: {sorted(unknown)}")
    return MotionSpec(**kwargs)


def _load_scene(name_or_path, frames, seed):
    if Path(name_or_path).is_file():
        return scene_spec_from_dict(io.read_json(name_or_path))
    return preset_scene(name_or_path, frames=frames, seed=seed)


def _vary_scene(spec, sample_index):
    """Per-sample scene variation: rotate starts, scale speeds (seeded)."""
    if sample_index == 0:
        return spec
    g = Generator(Philox(key=spec.seed & (2**64 - 1), counter=[0, sample_index, 7, 0]))
    markers = tuple(
        MarkerSpec(kind=m.kind, speed=m.speed * g.uniform(0.75, 1.25),
                   lon0=m.lon0 + g.uniform(0.0, 360.0), lat0=m.lat0,
                   radius=m.radius, color=m.color, amp_lon=m.amp_lon, amp_lat=m.amp_lat,
                   freq_lon=m.freq_lon, freq_lat=m.freq_lat, phase=m.phase)
        for m in spec.markers
    )
    return SceneSpec(frames=spec.frames, markers=markers, background=spec.background,
                     checker_cells=spec.checker_cells, grid=spec.grid, seed=spec.seed)


def cmd_curate(args):
    config = _config(args)
    checks = tuple(c.strip() for c in args.checks.split(",") if c.strip())
    unknown = set(checks) - {"seam", "dynamics", "poster"}
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    report = curate(args.clip, config=config, checks=checks)
    if args.report:
        io.write_json(args.report, report.to_dict())
    for name, r in report.checks.items():
        print(f"{name}: score={r['score']:.4f} {'pass' if r['pass'] else 'FAIL'}")
    print(f"verdict: {'pass' if report.verdict else 'FAIL'}")
    return 0 if report.verdict else 1


def cmd_gen_traj(args):
    config = _config(args)
    spec = _motion_spec(args, config)
    n = args.frames if args.frames is not None else config.frames
    trajectory = build_trajectory(spec, n, np.eye(3), config.intrinsics())
    io.save_trajectory(args.out, trajectory, motion=spec)
    print(f"wrote {n}-frame {spec.kind}{' btf' if spec.btf else ''} trajectory to {args.out}")
    return 0


def cmd_resample(args):
    n_threads = _threads(args)
    frames = io.read_clip(args.input)
    trajectory = io.load_trajectory(args.trajectory)
    if len(frames) < len(trajectory):
        raise ValueError(f"clip has {len(frames)} frames but trajectory wants {len(trajectory)}")
    out = Path(args.out)
    for t in range(len(trajectory)):
        rendered = render_perspective(frames[t], trajectory.rotations[t],
                                      trajectory.intrinsics[t], n_threads=n_threads)
        io.write_png(out / "frames" / (io.FRAME_PATTERN % t), rendered)
        if args.viz_equirect:
            viz = grey_outside_frustum(frames[t], trajectory.rotations[t], trajectory.intrinsics[t])
            io.write_png(out / "viz" / (io.FRAME_PATTERN % t), viz)
    print(f"rendered {len(trajectory)} frames to {out / 'frames'}")
    return 0


def _make_synth_samples(args, config, n_threads):
    base_scene = _load_scene(args.synth, frames=config.frames, seed=config.seed)
    samples = []
    for i in range(args.count):
        scene = _vary_scene(base_scene, i)
        output = render_scene(scene)
        tracks = [PointTrack2D(track_id=f"marker_{k:02d}", points=pts)
                  for k, pts in enumerate(centroid_tracks(output))]
        spec = _motion_spec(args, config)
        spec = MotionSpec(**{**spec.to_dict(), "seed": (config.seed + 0x51AB1 * i) & (2**63 - 1)})
        clip_id = f"synth_{i:05d}"
        sample = assemble_sample(
            output.frames, scene.grid, spec, config, clip_id=clip_id,
            tracks=tracks, out_dir=Path(args.out) / f"sample_{i:05d}",
            category="synthetic", n_threads=n_threads, source=f"synth:{args.synth}",
        )
        samples.append(sample)
    return samples


def _make_imported_samples(args, config, n_threads):
    frames = io.read_clip(args.source)
    grid = EquirectGrid(frames[0].shape[1], frames[0].shape[0])
    kind, surface, tracks = io.read_track_file(args.tracks)
    recording = io.load_trajectory(args.source_trajectory) if args.source_trajectory else None
    samples = []
    for i in range(args.count):
        spec = _motion_spec(args, config)
        spec = MotionSpec(**{**spec.to_dict(), "seed": (config.seed + 0x51AB1 * i) & (2**63 - 1)})
        clip_id = f"{Path(args.source).name}_{i:05d}"
        sample = assemble_sample(
            frames, grid, spec, config, clip_id=clip_id,
            tracks=tracks, track_surface=surface,  # the surface the file declares
            recording_trajectory=recording,
            out_dir=Path(args.out) / f"sample_{i:05d}",
            category=args.category, n_threads=n_threads, source=str(args.source),
        )
        samples.append(sample)
    return samples


def cmd_make_dataset(args):
    config = _config(args)
    n_threads = _threads(args)
    if (args.synth is None) == (args.source is None):
        raise ValueError("provide exactly one of --synth or --source")
    if args.source is not None and args.tracks is None:
        raise ValueError("--source needs --tracks (imported 2D track file)")
    if args.synth is not None:
        samples = _make_synth_samples(args, config, n_threads)
    else:
        samples = _make_imported_samples(args, config, n_threads)
    total = sum(len(s.gt.tracks) for s in samples)
    print(f"wrote {len(samples)} samples ({total} tracks) to {args.out}")
    return 0


def cmd_eval(args):
    cfg = _config(args)
    thresholds = ThresholdConfig(degrees_per_pixel=cfg.degrees_per_pixel)
    report = evaluate(args.pred, args.gt, thresholds)
    if args.report:
        io.write_json(args.report, report)
    print(render_table(report))
    if args.by_motion:
        print()
        print(render_table(report, group_by="motion"))
    if args.by_category:
        print()
        print(render_table(report, group_by="category"))
    return 0


def cmd_synth(args):
    config = _config(args)
    scene = _load_scene(args.scene, frames=args.frames or config.frames, seed=config.seed)
    output = render_scene(scene)
    out = Path(args.out)
    io.write_clip(out / "frames", output.frames)
    for k, mask_seq in enumerate(output.masks):
        io.write_mask_sequence(out / "masks" / f"marker_{k:02d}", mask_seq)
    tracks = [PointTrack2D(track_id=f"marker_{k:02d}", points=pts)
              for k, pts in enumerate(centroid_tracks(output))]
    io.write_track_file(out / "tracks.json", tracks, grid=scene.grid)
    io.write_json(out / "scene.json", scene_spec_to_dict(scene))
    io.write_json(out / "directions.json", {
        "markers": [{"id": f"marker_{k:02d}", "directions": output.directions[k].tolist()}
                    for k in range(len(output.masks))],
    })
    print(f"wrote {scene.frames}-frame scene with {len(output.masks)} markers to {out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="panotrack",
                                     description="360 video resampling, direction tracks and metrics")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--config", help="TOML-style config file")
        p.add_argument("--threads", type=int, help="worker threads (env PANO_TRACK_THREADS)")
        if seed:
            p.add_argument("--seed", type=int, help="override config seed")

    p = sub.add_parser("curate", help="quality checks on an equirect clip directory")
    p.add_argument("clip", help="clip directory of frame_%%05d.png")
    p.add_argument("--checks", default="seam,dynamics,poster")
    p.add_argument("--report", help="write report JSON here")
    common(p)
    p.set_defaults(func=cmd_curate)

    p = sub.add_parser("gen-traj", help="generate a camera trajectory file")
    p.add_argument("--motion", required=True, choices=MOTION_KINDS)
    p.add_argument("--frames", type=int)
    p.add_argument("--btf", action="store_true")
    p.add_argument("--theta-min", dest="theta_min", type=float)
    p.add_argument("--theta-max", dest="theta_max", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_gen_traj)

    p = sub.add_parser("resample", help="render a perspective clip from an equirect clip")
    p.add_argument("--input", required=True, help="equirect clip directory")
    p.add_argument("--trajectory", required=True, help="trajectory JSON")
    p.add_argument("--out", required=True)
    p.add_argument("--viz-equirect", action="store_true",
                   help="also write equirect frames with outside-view regions greyed")
    common(p)
    p.set_defaults(func=cmd_resample)

    p = sub.add_parser("make-dataset", help="assemble dataset samples")
    p.add_argument("--source", help="equirect clip directory")
    p.add_argument("--tracks", help="imported 2D track file for --source")
    p.add_argument("--source-trajectory", help="recording trajectory for perspective track files")
    p.add_argument("--synth", help="scene preset name or scene JSON file")
    p.add_argument("--motion", choices=MOTION_KINDS, default="static")
    p.add_argument("--btf", action="store_true")
    p.add_argument("--theta-min", dest="theta_min", type=float)
    p.add_argument("--theta-max", dest="theta_max", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--category", default="uncategorized")
    common(p)
    p.set_defaults(func=cmd_make_dataset)

    p = sub.add_parser("eval", help="evaluate predictions against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--report", help="write report JSON here")
    p.add_argument("--by-motion", action="store_true")
    p.add_argument("--by-category", action="store_true")
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="write a synthetic scene (clip + masks + tracks)")
    p.add_argument("--scene", default="single-marker", help="preset name or scene JSON")
    p.add_argument("--frames", type=int)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PipelineError, AlignmentError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
