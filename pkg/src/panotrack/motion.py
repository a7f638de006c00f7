"""Per-frame camera rotation sequences for viewport resampling.

A motion strategy produces one (pitch, roll, yaw) delta per frame index;
the trajectory composes them right-multiplicatively,

    R[i+1] = R[i] @ euler_to_rotation(pitch_i, roll_i, yaw_i)

so each delta acts in the current camera frame. Strategies: static, spiral,
random (integer-degree steps), simulated human (sinusoid + drift + noise)
and spin about a single axis with optional mean-centred noise. A back-to-
front edit mirrors the middle of an existing trajectory into an exact
palindrome.

Randomness is counter-based (Philox) keyed by (seed, frame, stream): every
frame's draws are independent of evaluation order, so trajectories are
reproducible bit-for-bit and frames may be generated in parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict, replace

import numpy as np
from numpy.random import Generator, Philox

from .geometry import Intrinsics, euler_to_rotation, is_rotation, procrustes_so3, \
    equirect_to_direction, minimal_roll_rotation

MOTION_KINDS = ("static", "spiral", "random", "human", "spin_x", "spin_y", "spin_z")

# Philox stream tags so distinct draw sites never collide on a counter.
_STREAM_FRAME_NOISE = 1
_STREAM_SEQUENCE_PARAMS = 2
_STREAM_BTF = 3

_REORTHONORMALIZE_EVERY = 64  # bound SO(3) drift over long compositions


def _rng(seed, stream, frame=0):
    return Generator(Philox(key=int(seed) & (2**64 - 1), counter=[0, int(frame), int(stream), 0]))


@dataclass(frozen=True)
class MotionSpec:
    """Parameters of one motion strategy.

    theta_min/theta_max default per kind when None: (0, 360) for spiral,
    (-2, 2) for random. Human-motion amplitudes/drifts/noise are the
    per-axis maxima the per-sequence draws are taken from; omega bounds are
    rad/frame. eta is the spin noise ratio in [0, 1].
    """

    kind: str = "static"
    theta_min: float | None = None
    theta_max: float | None = None
    eta: float = 0.25
    amp_max_roll: float = 1.5
    amp_max_pitch: float = 1.5
    amp_max_yaw: float = 1.5
    drift_max_pitch: float = 0.2
    drift_max_yaw: float = 0.2
    omega_min: float = 0.1
    omega_max: float = 0.5
    sigma_roll: float = 0.1
    sigma_pitch: float = 0.1
    sigma_yaw: float = 0.1
    btf: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.kind not in MOTION_KINDS:
            raise ValueError(f"unknown motion kind {self.kind!r}, expected one of {MOTION_KINDS}")
        lo, hi = self.theta_bounds()
        if lo > hi:
            raise ValueError(f"theta_min {lo} > theta_max {hi}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must be in [0, 1], got {self.eta}")
        if self.omega_min > self.omega_max:
            raise ValueError(f"omega_min {self.omega_min} > omega_max {self.omega_max}")
        for name in ("amp_max_roll", "amp_max_pitch", "amp_max_yaw",
                     "drift_max_pitch", "drift_max_yaw", "sigma_roll", "sigma_pitch", "sigma_yaw"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    def theta_bounds(self):
        default_lo, default_hi = (0.0, 360.0) if self.kind == "spiral" else (-2.0, 2.0)
        lo = default_lo if self.theta_min is None else float(self.theta_min)
        hi = default_hi if self.theta_max is None else float(self.theta_max)
        return lo, hi

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass
class Trajectory:
    """Per-frame camera-to-world rotations with matching intrinsics."""

    rotations: np.ndarray            # (T, 3, 3)
    intrinsics: list                 # T Intrinsics

    def __post_init__(self):
        self.rotations = np.asarray(self.rotations, dtype=np.float64)
        if self.rotations.ndim != 3 or self.rotations.shape[1:] != (3, 3) or len(self.rotations) < 1:
            raise ValueError(f"rotations must be (T>=1, 3, 3), got {self.rotations.shape}")
        if len(self.intrinsics) != len(self.rotations):
            raise ValueError(
                f"{len(self.intrinsics)} intrinsics for {len(self.rotations)} rotations")
        for t, r in enumerate(self.rotations):
            if not is_rotation(r, tol=1e-7):
                raise ValueError(f"rotation at frame {t} is not in SO(3)")

    def __len__(self):
        return len(self.rotations)

    def to_dict(self, motion=None, seed=None):
        d = {
            "frames": len(self),
            "rotations": [r.reshape(9).tolist() for r in self.rotations],
            "intrinsics": [k.to_dict() for k in self.intrinsics],
        }
        if motion is not None:
            d["motion"] = motion.to_dict()
            d["seed"] = motion.seed if seed is None else seed
        elif seed is not None:
            d["seed"] = seed
        return d

    @classmethod
    def from_dict(cls, d):
        rots = np.array([np.asarray(r, dtype=np.float64).reshape(3, 3) for r in d["rotations"]])
        intr = [Intrinsics.from_dict(k) for k in d["intrinsics"]]
        return cls(rotations=rots, intrinsics=intr)


def default_intrinsics():
    """256x256 viewport at 70.528 degrees: 0.2755 degrees per pixel."""
    return Intrinsics.from_hfov(256, 256, 70.528)


def motion_angles(spec, n_frames):
    """Per-frame rotation deltas (pitch, roll, yaw) in degrees, shape (n, 3).

    One delta is defined for every frame index 0..n-1; a trajectory of n
    rotations consumes the first n-1, while properties of the full sweep
    (e.g. a spin composing to 360 degrees) are stated over all n.
    """
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")
    n = int(n_frames)
    out = np.zeros((n, 3), dtype=np.float64)
    kind = spec.kind

    if kind == "static":
        return out

    if kind == "spiral":
        lo, hi = spec.theta_bounds()
        ang = np.mod(np.arange(n, dtype=np.float64) * (hi - lo) / n, 360.0)
        out[:, 0] = ang   # pitch
        out[:, 2] = ang   # yaw; roll stays 0
        return out

    if kind == "random":
        lo, hi = spec.theta_bounds()
        lo_i, hi_i = math.ceil(lo), math.floor(hi)
        if lo_i > hi_i:
            raise ValueError(f"no integers in [{lo}, {hi}] for random motion")
        for i in range(n):
            g = _rng(spec.seed, _STREAM_FRAME_NOISE, frame=i)
            out[i] = g.integers(lo_i, hi_i + 1, size=3).astype(np.float64)
        return out

    if kind == "human":
        g = _rng(spec.seed, _STREAM_SEQUENCE_PARAMS)
        amp_r = g.uniform(0.0, spec.amp_max_roll)
        amp_p = g.uniform(0.0, spec.amp_max_pitch)
        amp_y = g.uniform(0.0, spec.amp_max_yaw)
        drift_p = g.uniform(-spec.drift_max_pitch, spec.drift_max_pitch)
        drift_y = g.uniform(-spec.drift_max_yaw, spec.drift_max_yaw)
        omega = g.uniform(spec.omega_min, spec.omega_max)
        for i in range(n):
            gn = _rng(spec.seed, _STREAM_FRAME_NOISE, frame=i)
            eps = gn.normal(0.0, 1.0, size=3)
            s = math.sin(omega * i)
            out[i, 0] = amp_p * s + drift_p * i + eps[0] * spec.sigma_pitch
            out[i, 1] = amp_r * s + eps[1] * spec.sigma_roll
            out[i, 2] = amp_y * s + drift_y * i + eps[2] * spec.sigma_yaw
        return out

    # spin_x / spin_y / spin_z
    axis = {"spin_x": 0, "spin_y": 2, "spin_z": 1}[kind]  # column in (pitch, roll, yaw)
    step = 360.0 / n
    if spec.eta > 0.0:
        eps = np.empty(n, dtype=np.float64)
        for i in range(n):
            g = _rng(spec.seed, _STREAM_FRAME_NOISE, frame=i)
            eps[i] = g.uniform(-spec.eta * step, spec.eta * step)
        eps -= eps.mean()
    else:
        eps = np.zeros(n, dtype=np.float64)
    out[:, axis] = step + eps
    return out


def _compose(r0, deltas):
    """Compose delta rotations onto r0, re-orthonormalizing periodically."""
    rots = np.empty((len(deltas) + 1, 3, 3), dtype=np.float64)
    rots[0] = r0
    cur = np.array(r0, dtype=np.float64)
    for i, (pitch, roll, yaw) in enumerate(deltas):
        cur = cur @ euler_to_rotation(pitch, roll, yaw)
        if (i + 1) % _REORTHONORMALIZE_EVERY == 0:
            cur = procrustes_so3(cur)
        rots[i + 1] = cur
    return rots


def _as_intrinsics_list(intrinsics, n):
    if intrinsics is None:
        intrinsics = default_intrinsics()
    if isinstance(intrinsics, Intrinsics):
        return [intrinsics] * n
    intrinsics = list(intrinsics)
    if len(intrinsics) != n:
        raise ValueError(f"{len(intrinsics)} intrinsics for {n} frames")
    return intrinsics


def generate(spec, n_frames, r0=None, intrinsics=None):
    """Trajectory of n_frames rotations driven by the motion strategy.

    rotations[0] = r0 (identity when None); each subsequent frame applies
    that frame's delta. Pure function of (spec, n_frames, r0): two calls
    agree bitwise.
    """
    if n_frames < 2:
        raise ValueError(f"need at least 2 frames, got {n_frames}")
    r0 = np.eye(3) if r0 is None else np.asarray(r0, dtype=np.float64)
    deltas = motion_angles(spec, n_frames)
    rots = _compose(r0, deltas[: n_frames - 1])
    return Trajectory(rotations=rots, intrinsics=_as_intrinsics_list(intrinsics, n_frames))


def btf_segment_bounds(n_frames, seed):
    """Draw the (i_s, i_e) window of the symmetric segment.

    k is even in [N_min, N_max] with N_min = floor(N/2) rounded up to even
    and N_max = N - 2s (s = 2 buffer frames at each end); the window is
    centred on the temporal midpoint m = floor(N/2).
    """
    s = 2
    m = n_frames // 2
    n_min = m + (m % 2)
    n_max = n_frames - 2 * s
    if n_max < n_min:
        raise ValueError(f"trajectory too short for btf: need N >= 2*{s} + floor(N/2), got {n_frames}")
    choices = np.arange(n_min, n_max + 1, 2)
    g = _rng(seed, _STREAM_BTF)
    k = int(choices[g.integers(0, len(choices))])
    i_s = m - k // 2
    return i_s, i_s + k


def apply_btf(base, inner, seed):
    """Replace the middle of a trajectory with a palindromic motion segment.

    Forward rotations are generated by the inner strategy from base[i_s];
    the segment is forward + reversed(forward) (absolute poses mirrored, so
    the camera literally revisits its earlier orientations) and frames
    outside [i_s, i_e-1] are untouched.
    """
    n = len(base)
    i_s, i_e = btf_segment_bounds(n, seed)
    k_f = (i_e - i_s) // 2
    fwd_spec = replace(inner, seed=(int(seed) * 0x9E3779B97F4A7C15 + inner.seed) & (2**63 - 1))
    if k_f < 2:
        fwd = np.repeat(base.rotations[i_s][None, :, :], k_f, axis=0)
    else:
        fwd = generate(fwd_spec, k_f, r0=base.rotations[i_s]).rotations
    segment = np.concatenate([fwd, fwd[::-1]], axis=0)
    rots = base.rotations.copy()
    rots[i_s:i_e] = segment
    return Trajectory(rotations=rots, intrinsics=list(base.intrinsics))


def mask_centroid_direction(mask, grid):
    """Spherical centroid of a binary equirect mask (plain per-pixel sum).

    Raises ValueError for an empty mask or a centroid with vanishing norm
    (antipodally balanced masks have no meaningful centre).
    """
    mask = np.asarray(mask).astype(bool)
    vs, us = np.nonzero(mask)
    if len(us) == 0:
        raise ValueError("empty mask has no centroid")
    dirs = equirect_to_direction(us.astype(np.float64), vs.astype(np.float64), grid)
    total = dirs.sum(axis=0)
    norm = np.linalg.norm(total)
    if norm < 1e-6 * len(us):
        raise ValueError("mask centroid is degenerate (antipodally balanced)")
    return total / norm


def object_centered(mask_seq, grid, k_template):
    """Trajectory keeping a masked instance centred in the viewport.

    Per frame, camera +z points at the mask's spherical centroid with
    minimal roll; when the centroid is within 1e-6 of a pole the previous
    frame's up vector is reused. An empty mask raises, naming the frame.
    """
    rots = []
    prev_up = None
    for t, mask in enumerate(mask_seq):
        try:
            c = mask_centroid_direction(mask, grid)
        except ValueError as e:
            raise ValueError(f"frame {t}: {e}") from e
        r = minimal_roll_rotation(c, up_source=prev_up)
        prev_up = r[:, 1]
        rots.append(r)
    rots = np.stack(rots, axis=0)
    return Trajectory(rotations=rots, intrinsics=_as_intrinsics_list(k_template, len(rots)))
