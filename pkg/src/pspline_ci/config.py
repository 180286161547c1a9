"""Flat ``key = value`` experiment configs with dotted sections.

Example::

    # broken-stick experiment
    target.kind = broken_stick
    target.slopes = 1, -0.5, 1.5
    sampler.kind = equally_spaced
    sampler.n = 101
    noise.kind = constant
    noise.sigma = 0.1
    knots.n_interior = 24
    run.seed = 20240613
    run.replicates = 1000
    run.methods = theta=1, theta=0.2, theta=0.1, theta=0

Blank lines and ``#`` comments are ignored. Lists are comma separated.
``run.seed`` is mandatory.
"""

from __future__ import annotations

import hashlib

from .basis import make_knots
from .intervals import parse_method
from .simgen import BrokenStick, ConstantNoise, EquallySpaced, LinearNoise, ScaledBeta


class ConfigError(ValueError):
    pass


def _floats(v: str) -> tuple[float, ...]:
    return tuple(float(t) for t in v.split(",") if t.strip())


def _bool(v: str) -> bool:
    if v.lower() in ("1", "true", "yes", "on"):
        return True
    if v.lower() in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _methods(v: str):
    return tuple(parse_method(t) for t in v.split(",") if t.strip())


# key -> (parser, default); None default means required
SCHEMA = {
    "target.kind": (str, "broken_stick"),
    "target.slopes": (_floats, "1, -0.5, 1.5"),
    "target.corners": (_floats, "1, 3"),
    "target.intercept": (float, "0"),
    "target.half_width": (float, "0.2"),
    "target.domain": (_floats, "0, 5"),
    "sampler.kind": (str, "equally_spaced"),
    "sampler.n": (int, "101"),
    "sampler.shape1": (float, "0.8"),
    "sampler.shape2": (float, "0.8"),
    "sampler.scale": (float, "5"),
    "noise.kind": (str, "constant"),
    "noise.sigma": (float, "0.1"),
    "noise.slope": (float, "0.01"),
    "noise.intercept": (float, "0.075"),
    "knots.n_interior": (int, "24"),
    "knots.order": (int, "4"),
    "knots.domain": (_floats, "0, 5"),
    "knots.include_boundary": (_bool, "false"),
    "run.seed": (int, None),
    "run.replicates": (int, "1000"),
    "run.level": (float, "0.95"),
    "run.methods": (_methods, "theta=1, theta=0.2, theta=0.1, theta=0"),
    "run.workers": (int, "1"),
    "run.grid_points": (int, "101"),
}


def parse_config(text: str) -> dict:
    """Parse config text into typed values, filling defaults."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        raw[key] = val
    out = {}
    for key, (conv, default) in SCHEMA.items():
        if key not in raw and default is None:
            raise ConfigError(f"missing required key {key!r} (a seed is needed for reproducibility)")
        val = raw.get(key, default)
        try:
            out[key] = conv(val)
        except ValueError as e:
            raise ConfigError(f"bad value for {key!r}: {e}") from None
    return out


def load_config(path) -> tuple[dict, str]:
    """Parsed config and the SHA-256 of the file bytes."""
    with open(path, "rb") as fh:
        data = fh.read()
    return parse_config(data.decode("utf-8")), hashlib.sha256(data).hexdigest()


def dump_config(cfg: dict) -> str:
    """Serialize a parsed config back to text (round-trips through :func:`parse_config`)."""
    lines = []
    for key in SCHEMA:
        v = cfg[key]
        if key == "run.methods":
            v = ", ".join(m.label for m in v)
        elif isinstance(v, tuple):
            v = ", ".join(repr(x) for x in v)
        elif isinstance(v, bool):
            v = str(v).lower()
        lines.append(f"{key} = {v}")
    return "\n".join(lines) + "\n"


def build_target(cfg: dict):
    kind = cfg["target.kind"]
    if kind == "broken_stick":
        return BrokenStick(
            cfg["target.slopes"], cfg["target.corners"], cfg["target.intercept"],
            cfg["target.half_width"], tuple(cfg["target.domain"]),
        )
    if kind == "linear":
        # a broken stick without corners is a straight line
        return BrokenStick(cfg["target.slopes"][:1], (), cfg["target.intercept"], 0.0, tuple(cfg["target.domain"]))
    raise ConfigError(f"unknown target.kind {kind!r}")


def build_sampler(cfg: dict):
    kind = cfg["sampler.kind"]
    if kind == "equally_spaced":
        return EquallySpaced(cfg["sampler.n"], tuple(cfg["target.domain"]))
    if kind == "scaled_beta":
        return ScaledBeta(cfg["sampler.n"], cfg["sampler.shape1"], cfg["sampler.shape2"], cfg["sampler.scale"])
    raise ConfigError(f"unknown sampler.kind {kind!r}")


def build_noise(cfg: dict):
    kind = cfg["noise.kind"]
    if kind == "constant":
        return ConstantNoise(cfg["noise.sigma"])
    if kind == "linear":
        return LinearNoise(cfg["noise.slope"], cfg["noise.intercept"])
    raise ConfigError(f"unknown noise.kind {kind!r}")


def build_knots(cfg: dict):
    return make_knots(
        cfg["knots.domain"], cfg["knots.n_interior"], cfg["knots.order"], cfg["knots.include_boundary"]
    )
