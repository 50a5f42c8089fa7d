"""Suite configuration: defaults, TOML/JSON loading, validation.

A config names which catalog surfaces and fields the parametrised checks
run over, the finite-difference step ladders, quadrature orders, the PRNG
seed, and where the report lands.  Everything has a sensible default; a
config file only overrides.  Unknown keys are rejected rather than ignored
so that a typo cannot silently disable a tolerance override.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from ..errors import ConfigError
from ..sabotage import KNOWN as KNOWN_SABOTAGE

__all__ = ["SuiteConfig", "load_config", "DEFAULT_FD_STEPS", "DEFAULT_QUADRATURE"]

DEFAULT_FD_STEPS: dict[str, Any] = {
    # ambient-comparison step ladder and the pinned small-step gap
    "h_sweep": (1e-2, 3e-3, 1e-3, 3e-4),
    "h_gap": 1e-4,
    # time-step ladder for transport/material-derivative convergence
    "h_t_sweep": (1e-2, 3e-3, 1e-3),
    "h_t": 1e-4,
}

DEFAULT_QUADRATURE = {"order_u": 48, "order_v": 96}

_KNOWN_KEYS = {
    "surfaces", "fields", "tolerances", "fd_steps", "quadrature",
    "seed", "output_path", "sabotage",
}


@dataclass(frozen=True)
class SuiteConfig:
    """Resolved configuration for a verification run."""

    surfaces: tuple[str, ...] = ("unit_sphere", "ellipsoid", "torus")
    fields: tuple[str, ...] = ()          # empty — use per-kind defaults
    tolerances: Mapping[str, float] = field(default_factory=dict)
    fd_steps: Mapping[str, Any] = field(default_factory=lambda: dict(DEFAULT_FD_STEPS))
    quadrature: Mapping[str, int] = field(default_factory=lambda: dict(DEFAULT_QUADRATURE))
    seed: int = 2026
    output_path: str = "evosurf-report.json"
    sabotage: tuple[str, ...] = ()

    def step(self, key: str):
        return self.fd_steps.get(key, DEFAULT_FD_STEPS[key])

    def order(self, key: str) -> int:
        return int(self.quadrature.get(key, DEFAULT_QUADRATURE[key]))


def _as_tuple(x, what: str) -> tuple:
    if isinstance(x, (list, tuple)):
        return tuple(x)
    raise ConfigError(f"{what} must be an array, got {type(x).__name__}")


def _validate(raw: Mapping[str, Any], source: str) -> SuiteConfig:
    unknown = set(raw) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(
            f"{source}: unknown config keys {sorted(unknown)}; "
            f"known keys are {sorted(_KNOWN_KEYS)}")

    kw: dict[str, Any] = {}
    if "surfaces" in raw:
        kw["surfaces"] = tuple(str(s) for s in _as_tuple(raw["surfaces"], "surfaces"))
    if "fields" in raw:
        kw["fields"] = tuple(str(s) for s in _as_tuple(raw["fields"], "fields"))
    if "tolerances" in raw:
        tols = raw["tolerances"]
        if not isinstance(tols, Mapping):
            raise ConfigError(f"{source}: tolerances must be a table")
        kw["tolerances"] = {str(k): float(v) for k, v in tols.items()}
    if "fd_steps" in raw:
        steps = raw["fd_steps"]
        if not isinstance(steps, Mapping):
            raise ConfigError(f"{source}: fd_steps must be a table")
        bad = set(steps) - set(DEFAULT_FD_STEPS)
        if bad:
            raise ConfigError(
                f"{source}: unknown fd_steps keys {sorted(bad)}; "
                f"known: {sorted(DEFAULT_FD_STEPS)}")
        merged = dict(DEFAULT_FD_STEPS)
        for k, v in steps.items():
            merged[k] = tuple(float(x) for x in v) if k.endswith("_sweep") else float(v)
        kw["fd_steps"] = merged
    if "quadrature" in raw:
        quad = raw["quadrature"]
        if not isinstance(quad, Mapping):
            raise ConfigError(f"{source}: quadrature must be a table")
        bad = set(quad) - {"order_u", "order_v"}
        if bad:
            raise ConfigError(f"{source}: unknown quadrature keys {sorted(bad)}")
        merged_q = dict(DEFAULT_QUADRATURE)
        merged_q.update({k: int(v) for k, v in quad.items()})
        if min(merged_q.values()) < 2:
            raise ConfigError(f"{source}: quadrature orders must be >= 2")
        kw["quadrature"] = merged_q
    if "seed" in raw:
        kw["seed"] = int(raw["seed"])
    if "output_path" in raw:
        kw["output_path"] = str(raw["output_path"])
    if "sabotage" in raw:
        switches = tuple(str(s) for s in _as_tuple(raw["sabotage"], "sabotage"))
        bad = set(switches) - set(KNOWN_SABOTAGE)
        if bad:
            raise ConfigError(
                f"{source}: unknown sabotage switches {sorted(bad)}; "
                f"known: {sorted(KNOWN_SABOTAGE)}")
        kw["sabotage"] = switches

    cfg = SuiteConfig(**kw)

    from . import catalog  # late import; catalog pulls in the field zoo
    for s in cfg.surfaces:
        if s not in catalog.SURFACES:
            raise ConfigError(
                f"{source}: unknown surface {s!r}; "
                f"catalog has {sorted(catalog.SURFACES)}")
    for f in cfg.fields:
        if f not in catalog.FIELDS:
            raise ConfigError(
                f"{source}: unknown field {f!r}; "
                f"catalog has {sorted(catalog.FIELDS)}")
    return cfg


def load_config(path: str | Path | None) -> SuiteConfig:
    """Read a TOML or JSON config file; ``None`` gives the defaults."""
    if path is None:
        return SuiteConfig()
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    text = p.read_text()
    if p.suffix.lower() == ".json":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{p}: invalid JSON ({e})") from None
    else:
        try:
            import tomllib  # py >= 3.11
        except ModuleNotFoundError:  # pragma: no cover - version-dependent
            import tomli as tomllib
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"{p}: invalid TOML ({e})") from None
    if not isinstance(raw, Mapping):
        raise ConfigError(f"{p}: top level must be a table/object")
    return _validate(raw, str(p))
