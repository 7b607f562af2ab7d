"""Flat ``key = value`` run configuration.

Grammar: one ``key = value`` per line, ``#`` starts a comment, blank lines are
ignored, list values are whitespace separated (``mesh.counts = 2 2 2``).
Unknown or repeated keys are errors.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import ParseError, ValidationError
from .solver import FORMS

SYSTEMS = ("advection", "acoustics")
VELOCITIES = ("constant", "cellular")
INITIALS = ("zero", "constant", "gaussian", "sine", "random")
BOUNDARIES = ("zero", "exact")
METRICS = ("curl", "cross")


@dataclass
class RunConfig:
    N: int
    system: str
    T: float
    velocity: str = "constant"
    a: tuple = (1.0, 0.0, 0.0)
    amplitude: float = 1.0
    weights: tuple = (1.0, 1.0, 1.0)
    c: float = 1.0
    lo: tuple = (0.0, 0.0, 0.0)
    hi: tuple = (1.0, 1.0, 1.0)
    counts: tuple = (2, 2, 2)
    warp: float = 0.0
    metric: str = "curl"
    initial: str = "gaussian"
    value: tuple = (1.0,)
    center: Optional[tuple] = None
    width: float = 0.1
    init_amplitude: float = 1.0
    wavenumber: tuple = (1.0, 1.0, 1.0)
    boundary: str = "zero"
    form: str = "DS"
    sigma: float = 1.0
    cfl: float = 0.5
    dt: Optional[float] = None
    output_interval: float = 0.1
    output_dir: str = "."
    output_name: str = "run"
    seed: int = 0
    threads: int = 1

    def to_dict(self):
        out = {}
        for key, (attr, _) in KEYS.items():
            v = getattr(self, attr)
            out[key] = list(v) if isinstance(v, tuple) else v
        return out


def _floats(n=None):
    def parse(text):
        vals = tuple(float(t) for t in text.split())
        if not vals or (n is not None and len(vals) != n):
            raise ValueError(f"expected {n} numbers")
        return vals
    return parse


def _ints(n):
    def parse(text):
        vals = tuple(int(t) for t in text.split())
        if len(vals) != n:
            raise ValueError(f"expected {n} integers")
        return vals
    return parse


def _choice(options):
    def parse(text):
        if text not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return text
    return parse


def _optional_float(text):
    return None if text.lower() in ("none", "") else float(text)


KEYS = {
    "N": ("N", int),
    "system": ("system", _choice(SYSTEMS)),
    "T": ("T", float),
    "system.velocity": ("velocity", _choice(VELOCITIES)),
    "system.a": ("a", _floats(3)),
    "system.amplitude": ("amplitude", float),
    "system.weights": ("weights", _floats(3)),
    "system.c": ("c", float),
    "mesh.lo": ("lo", _floats(3)),
    "mesh.hi": ("hi", _floats(3)),
    "mesh.counts": ("counts", _ints(3)),
    "mesh.warp": ("warp", float),
    "mesh.metric": ("metric", _choice(METRICS)),
    "initial": ("initial", _choice(INITIALS)),
    "initial.value": ("value", _floats()),
    "initial.center": ("center", _floats(3)),
    "initial.width": ("width", float),
    "initial.amplitude": ("init_amplitude", float),
    "initial.wavenumber": ("wavenumber", _floats(3)),
    "boundary": ("boundary", _choice(BOUNDARIES)),
    "form": ("form", _choice(FORMS)),
    "sigma": ("sigma", float),
    "cfl": ("cfl", float),
    "dt": ("dt", _optional_float),
    "output.interval": ("output_interval", float),
    "output.dir": ("output_dir", str),
    "output.name": ("output_name", str),
    "seed": ("seed", int),
    "threads": ("threads", int),
}
REQUIRED = ("N", "system", "T")


def parse_text(text, name="run"):
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(lineno, f"expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ParseError(lineno, "empty key")
        if key in seen:
            raise ParseError(lineno, f"duplicate key {key!r}")
        if key not in KEYS:
            raise ValidationError(key, "unknown key")
        seen[key] = value

    for key in REQUIRED:
        if key not in seen:
            raise ValidationError(key, "required")
    kwargs = {"output_name": name}
    for key, value in seen.items():
        attr, parse = KEYS[key]
        try:
            kwargs[attr] = parse(value)
        except ValueError as exc:
            raise ValidationError(key, str(exc)) from None
    cfg = RunConfig(**kwargs)
    validate(cfg)
    return cfg


def parse_config(path):
    path = Path(path)
    return parse_text(path.read_text(), name=path.stem)


def validate(cfg):
    def check(ok, key, msg):
        if not ok:
            raise ValidationError(key, msg)

    check(1 <= cfg.N <= 64, "N", "must lie in [1, 64]")
    check(0.0 <= cfg.sigma <= 1.0, "sigma", "must lie in [0, 1]")
    check(cfg.T >= 0.0, "T", "must be non-negative")
    check(all(c >= 1 for c in cfg.counts), "mesh.counts", "must be >= 1")
    check(all(h > l for l, h in zip(cfg.lo, cfg.hi)), "mesh.hi", "must exceed mesh.lo")
    check(cfg.warp >= 0.0, "mesh.warp", "must be non-negative")
    check(cfg.c > 0.0, "system.c", "must be positive")
    check(cfg.width > 0.0, "initial.width", "must be positive")
    check(cfg.cfl > 0.0, "cfl", "must be positive")
    check(cfg.dt is None or cfg.dt > 0.0, "dt", "must be positive")
    check(cfg.output_interval >= 0.0, "output.interval", "must be non-negative")
    check(cfg.threads >= 1, "threads", "must be >= 1")
    if cfg.system == "acoustics":
        check(cfg.velocity == "constant", "system.velocity", "only used by advection")
    p = 4 if cfg.system == "acoustics" else 1
    check(len(cfg.value) in (1, p), "initial.value", f"expected 1 or {p} values")
    return cfg
