"""Angular tracking metrics with in-frame / out-of-frame splits.

Two headline numbers per split: the threshold accuracy (fraction of
prediction/ground-truth pairs within an angular threshold, averaged over a
ladder of thresholds expressed in the constant degrees-per-pixel unit) and
the mean angular distance in degrees. Splits are selected by the ground
truth's in-frame flags; empty splits report as absent (None), never as 0.

All-split values are derived from the per-split integer counts and sums, so
they equal the count-weighted combination of the in-frame and out-of-frame
values to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io
from .geometry import angular_distance
from .tracks import DirectionTrackSet

SPLITS = ("all", "if", "oof")


@dataclass(frozen=True)
class ThresholdConfig:
    """Angular threshold ladder: multipliers times a degrees-per-pixel unit."""

    degrees_per_pixel: float = 0.2755
    multipliers: tuple = (1, 2, 4, 8, 16)

    def __post_init__(self):
        if self.degrees_per_pixel <= 0:
            raise ValueError("degrees_per_pixel must be > 0")
        m = self.multipliers
        if any(a <= 0 for a in m) or any(b <= a for a, b in zip(m, m[1:])):
            raise ValueError(f"multipliers must be positive and strictly increasing, got {m}")

    @property
    def thresholds_deg(self):
        return tuple(m * self.degrees_per_pixel for m in self.multipliers)


class AlignmentError(ValueError):
    """Prediction and ground-truth sets do not describe the same tracks/clips."""


def align_track_sets(pred, gt):
    """Stack aligned (N, T, 3) direction arrays and the gt in-frame flags.

    Tracks are matched by id; any id present on one side only is an error
    listing the missing ids.
    """
    pred_by_id = {t.track_id: t for t in pred.tracks}
    gt_by_id = {t.track_id: t for t in gt.tracks}
    missing_in_pred = sorted(set(gt_by_id) - set(pred_by_id))
    missing_in_gt = sorted(set(pred_by_id) - set(gt_by_id))
    if missing_in_pred or missing_in_gt:
        raise AlignmentError(
            f"clip {gt.clip_id}: tracks missing in predictions: {missing_in_pred}; "
            f"tracks missing in ground truth: {missing_in_gt}"
        )
    ids = sorted(gt_by_id)
    p = np.stack([pred_by_id[i].directions for i in ids], axis=0)
    g = np.stack([gt_by_id[i].directions for i in ids], axis=0)
    if p.shape != g.shape:
        raise AlignmentError(f"clip {gt.clip_id}: prediction shape {p.shape} vs gt {g.shape}")
    flags = np.stack([gt_by_id[i].in_frame for i in ids], axis=0)
    return p, g, flags


def _split_mask(in_frame, split):
    if split == "all":
        return np.ones_like(in_frame, dtype=bool)
    if split == "if":
        return in_frame
    if split == "oof":
        return ~in_frame
    raise ValueError(f"split must be one of {SPLITS}, got {split!r}")


def delta_accuracy(pred, gt, cfg=None, split="all"):
    """Per-threshold accuracy fractions and their average for one split.

    pred/gt: aligned DirectionTrackSets. Returns
    {"fractions": [...], "average": float, "count": n} or None when the
    split is empty. Comparison is strict: distance < threshold.
    """
    cfg = cfg or ThresholdConfig()
    p, g, flags = align_track_sets(pred, gt)
    mask = _split_mask(flags, split)
    n = int(mask.sum())
    if n == 0:
        return None
    d = angular_distance(p[mask], g[mask])
    fractions = [int((d < th).sum()) / n for th in cfg.thresholds_deg]
    return {"fractions": fractions, "average": float(np.mean(fractions)), "count": n}


def mean_angular_distance(pred, gt, split="all"):
    """Mean angular distance in degrees over one split, or None when empty."""
    p, g, flags = align_track_sets(pred, gt)
    mask = _split_mask(flags, split)
    n = int(mask.sum())
    if n == 0:
        return None
    return float(np.sum(angular_distance(p[mask], g[mask])) / n)


def evaluate_clip(pred, gt, cfg=None):
    """All three splits for one clip, with exact all = if + oof composition."""
    cfg = cfg or ThresholdConfig()
    p, g, flags = align_track_sets(pred, gt)
    d = angular_distance(p, g)
    thresholds = cfg.thresholds_deg

    out = {"clip_id": gt.clip_id, "meta": dict(gt.meta), "splits": {}}
    counts, hit_counts, sums = {}, {}, {}
    for split in ("if", "oof"):
        mask = _split_mask(flags, split)
        counts[split] = int(mask.sum())
        hit_counts[split] = [int((d[mask] < th).sum()) for th in thresholds]
        sums[split] = float(np.sum(d[mask]))
    counts["all"] = counts["if"] + counts["oof"]
    hit_counts["all"] = [a + b for a, b in zip(hit_counts["if"], hit_counts["oof"])]
    sums["all"] = sums["if"] + sums["oof"]

    for split in SPLITS:
        n = counts[split]
        if n == 0:
            out["splits"][split] = None
            continue
        fractions = [c / n for c in hit_counts[split]]
        out["splits"][split] = {
            "count": n,
            "fractions": fractions,
            "delta_avg": float(np.mean(fractions)),
            "ad": sums[split] / n,
        }
    return out


def _aggregate(per_clip, split):
    """Mean and population std over clips where the split is present."""
    deltas = [c["splits"][split]["delta_avg"] for c in per_clip if c["splits"][split] is not None]
    ads = [c["splits"][split]["ad"] for c in per_clip if c["splits"][split] is not None]
    if not deltas:
        return None
    return {
        "clips": len(deltas),
        "count": int(sum(c["splits"][split]["count"] for c in per_clip
                         if c["splits"][split] is not None)),
        "delta_avg_mean": float(np.mean(deltas)),
        "delta_avg_std": float(np.std(deltas)),
        "ad_mean": float(np.mean(ads)),
        "ad_std": float(np.std(ads)),
    }


def _pooled(per_clip, split):
    """Per-point pooled metrics over every pair in every clip."""
    rows = [c["splits"][split] for c in per_clip if c["splits"][split] is not None]
    if not rows:
        return None
    n = sum(r["count"] for r in rows)
    fractions = [sum(r["fractions"][k] * r["count"] for r in rows) / n
                 for k in range(len(rows[0]["fractions"]))]
    return {
        "count": n,
        "fractions": fractions,
        "delta_avg": float(np.mean(fractions)),
        "ad": sum(r["ad"] * r["count"] for r in rows) / n,
    }


def _load_clips(path):
    """Clips from a sample tracks.json, a {"clips": [...]} file, or a dataset dir."""
    path = Path(path)
    if path.is_dir():
        files = sorted(path.glob("sample_*/tracks.json"))
        if not files:
            raise ValueError(f"{path}: no sample_*/tracks.json files found")
        return [DirectionTrackSet.from_dict(io.read_json(f)) for f in files]
    data = io.read_json(path)
    if "clips" in data:
        return [DirectionTrackSet.from_dict(c) for c in data["clips"]]
    if "tracks" in data:
        return [DirectionTrackSet.from_dict(data)]
    raise ValueError(f"{path}: not a track-set file (expected 'tracks' or 'clips')")


def evaluate(pred_path, gt_path, cfg=None):
    """Full evaluation report for prediction and ground-truth files.

    Per-clip values, the per-clip mean +/- population std headline,
    per-point pooled values, and groupby tables over the motion kind and
    category metadata. Clips are matched by clip_id.
    """
    cfg = cfg or ThresholdConfig()
    preds = {c.clip_id: c for c in _load_clips(pred_path)}
    gts = {c.clip_id: c for c in _load_clips(gt_path)}
    missing_pred = sorted(set(gts) - set(preds))
    missing_gt = sorted(set(preds) - set(gts))
    if missing_pred or missing_gt:
        raise AlignmentError(f"clips missing in predictions: {missing_pred}; "
                             f"clips missing in ground truth: {missing_gt}")

    per_clip = [evaluate_clip(preds[cid], gts[cid], cfg) for cid in sorted(gts)]

    def group_table(key):
        groups = {}
        for clip in per_clip:
            groups.setdefault(str(clip["meta"].get(key, "unknown")), []).append(clip)
        return {name: {"n_clips": len(clips),
                       "splits": {s: _aggregate(clips, s) for s in SPLITS}}
                for name, clips in sorted(groups.items())}

    return {
        "config": {
            "degrees_per_pixel": cfg.degrees_per_pixel,
            "multipliers": list(cfg.multipliers),
            "thresholds_deg": list(cfg.thresholds_deg),
        },
        "n_clips": len(per_clip),
        "splits": {s: _aggregate(per_clip, s) for s in SPLITS},
        "per_point": {s: _pooled(per_clip, s) for s in SPLITS},
        "per_clip": per_clip,
        "by_motion": group_table("motion_kind"),
        "by_category": group_table("category"),
    }


def _fmt_cell(agg, field):
    if agg is None:
        return "      --      "
    mean = agg[f"{field}_mean"]
    std = agg[f"{field}_std"]
    return f"{mean:7.4f}±{std:6.4f}"


def render_table(report, group_by=None):
    """Plain-text table: delta columns then AD columns, all/if/oof with ±.

    group_by picks one of the report's groupby tables ('motion' or
    'category'); default is the single overall row.
    """
    header = (f"{'':24s} {'<δavg_all':>14s} {'<δavg_if':>14s} {'<δavg_oof':>14s}"
              f" {'AD_all':>14s} {'AD_if':>14s} {'AD_oof':>14s}")
    lines = [header, "-" * len(header)]

    def row(name, splits):
        cells = [_fmt_cell(splits[s], "delta_avg") for s in SPLITS]
        cells += [_fmt_cell(splits[s], "ad") for s in SPLITS]
        return f"{name:24s} " + " ".join(f"{c:>14s}" for c in cells)

    if group_by is None:
        lines.append(row(f"all clips (n={report['n_clips']})", report["splits"]))
    else:
        table = report["by_motion"] if group_by == "motion" else report["by_category"]
        for name, entry in table.items():
            lines.append(row(f"{name} (n={entry['n_clips']})", entry["splits"]))
    return "\n".join(lines)
