"""Declarative geometry configs (YAML or JSON, nested or dotted keys)."""
from __future__ import annotations

import json
import math
from pathlib import Path

import yaml

from .errors import ConfigError, InvalidGeometry
from .geometry import HoleSpec, MushroomSpec, Stem

GEOMETRY_KEYS = {"R", "r", "rho", "alpha", "stem.kind", "stem.L",
                 "hole.wall", "hole.lo", "hole.hi"}
RUN_KEYS = {"seed", "particles", "t_max", "t_min", "bins", "points", "s_max", "theta_star",
            "precision", "out", "max_collisions"}


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _num(v, key):
    if isinstance(v, bool):
        raise ConfigError(f"{key}: expected a number, got {v!r}")
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, str):
        # a few closed forms show up in configs: cos(0.3484*pi) etc.
        try:
            return float(eval(v, {"__builtins__": {}}, {k: getattr(math, k) for k in
                                                           ("cos", "sin", "sqrt", "pi", "acos", "hypot")}))
        except Exception as exc:
            raise ConfigError(f"{key}: cannot parse {v!r}") from exc
    raise ConfigError(f"{key}: expected a number, got {type(v).__name__}")


def load_raw(path) -> dict:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    try:
        data = json.loads(text) if p.suffix == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"malformed config {p}: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    return _flatten(data)


def validate(flat: dict) -> dict:
    """Reject unknown keys; returns the dict unchanged otherwise."""
    unknown = sorted(set(flat) - GEOMETRY_KEYS - RUN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    if "r" in flat and "rho" in flat:
        raise ConfigError("give either r or rho, not both")
    return flat


def spec_from_flat(flat: dict) -> MushroomSpec:
    validate(flat)
    R = _num(flat.get("R", 1.0), "R")
    if "r" in flat:
        r = _num(flat["r"], "r")
    elif "rho" in flat:
        r = _num(flat["rho"], "rho") * R
    else:
        raise ConfigError("config needs r or rho")
    kind = flat.get("stem.kind", "rectangular")
    L = _num(flat.get("stem.L", 1.0), "stem.L")
    alpha = _num(flat.get("alpha", 0.5), "alpha")
    hole = None
    hk = [k for k in ("hole.wall", "hole.lo", "hole.hi") if k in flat]
    if hk:
        if len(hk) != 3:
            raise ConfigError("hole needs wall, lo and hi")
        hole = HoleSpec(str(flat["hole.wall"]), _num(flat["hole.lo"], "hole.lo"), _num(flat["hole.hi"], "hole.hi"))
    try:
        return MushroomSpec(R, r, Stem(kind, L), alpha, hole)
    except InvalidGeometry as exc:
        raise ConfigError(str(exc)) from exc


def load_spec(path) -> tuple[MushroomSpec, dict]:
    flat = load_raw(path)
    return spec_from_flat(flat), flat


def spec_to_flat(spec: MushroomSpec) -> dict:
    d = {"R": spec.R, "r": spec.r, "alpha": spec.alpha, "stem.kind": spec.stem.kind, "stem.L": spec.stem.L}
    if spec.hole is not None:
        d.update({"hole.wall": str(getattr(spec.hole.wall, "value", spec.hole.wall)),
                  "hole.lo": spec.hole.lo, "hole.hi": spec.hole.hi})
    return d
