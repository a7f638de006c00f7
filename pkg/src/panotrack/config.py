"""Run configuration shared by the CLI subcommands.

Defaults reproduce the benchmark's angular unit by construction: a
70.528-degree horizontal FOV over 256 columns is exactly 0.2755 degrees
per pixel. Config files are flat TOML-style "key = value" text; a
[section] header prefixes the keys that follow ("motion.kind" and the like)
and command-line flags override file values.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

from .geometry import Intrinsics


@dataclass(frozen=True)
class Config:
    width: int = 256
    height: int = 256
    hfov_deg: float = 70.528
    frames: int = 32
    n_queries: int = 256
    l_thresh: float = 20.0          # negative disables the track-length filter
    seed: int = 0
    # curation thresholds
    seam_strip_px: int = 8
    seam_min: float = 0.5
    dynamics_min: float = 25.0
    poster_rho: float = 0.6
    poster_tau_black: float = 16.0 / 255.0
    poster_window: int = 32
    poster_offset: float = 8.0
    poster_max_fraction: float = 0.5
    # default motion spec fields (overridable per subcommand)
    motion: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 < self.hfov_deg < 179.0:
            raise ValueError(f"hfov_deg must be in (0, 179), got {self.hfov_deg}")
        if self.width < 16 or self.height < 16:
            raise ValueError(f"perspective size must be >= 16, got {self.width}x{self.height}")
        if self.frames < 2:
            raise ValueError(f"frames must be >= 2, got {self.frames}")

    @property
    def degrees_per_pixel(self):
        return self.hfov_deg / self.width

    def intrinsics(self):
        return Intrinsics.from_hfov(self.width, self.height, self.hfov_deg)


_BOOL_WORDS = {"true": True, "false": False}


def _coerce(text):
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    if text.lower() in _BOOL_WORDS:
        return _BOOL_WORDS[text.lower()]
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def parse_config_text(text):
    """Flat key = value pairs into a dict; [section] prefixes what follows."""
    out = {}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if section:
            key = f"{section}.{key}"
        out[key] = _coerce(value)
    return out


def load_config(path=None, overrides=None):
    """Build a Config from an optional file plus explicit overrides.

    Keys under 'motion.' collect into the motion dict; any other unknown
    key is an error so typos fail loudly.
    """
    values = {}
    if path is not None:
        with open(path) as f:
            values.update(parse_config_text(f.read()))
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})

    known = {f.name for f in fields(Config)} - {"motion"}
    kwargs = {}
    motion = {}
    for key, value in values.items():
        if key.startswith("motion."):
            motion[key.split(".", 1)[1]] = value
        elif key in known:
            kwargs[key] = value
        else:
            raise ValueError(f"unknown config key {key!r}")
    if motion:
        kwargs["motion"] = motion
    return Config(**kwargs)
