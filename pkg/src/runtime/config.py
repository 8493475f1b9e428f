"""Run configuration: defaults < YAML file < GAV_OUTPUT_DIR < CLI flags.

The config file is a flat key/value mapping (INI-style, parsed with PyYAML). Nested
mappings are rejected. Grids are written ``a:b:n`` and lists as ``1,5,20``.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping

import yaml
from packaging.version import InvalidVersion, Version

from runtime import __version__
from runtime.errors import UsageError

OUTPUT_DIR_ENV = "GAV_OUTPUT_DIR"
FORMATS = ("json", "csv")
CONVENTIONS = ("fold", "literal", "both")


def parse_grid(value: Any) -> tuple[float, float, int]:
    if isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        parts = str(value).split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must be a:b:n, got {value!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"grid must be a:b:n, got {value!r}") from exc
    if n < 2 or hi < lo:
        raise UsageError(f"grid needs n >= 2 and a <= b, got {value!r}")
    return lo, hi, n


def parse_int_list(value: Any) -> tuple[int, ...]:
    if isinstance(value, int):
        return (value,)
    items = value if isinstance(value, (list, tuple)) else str(value).split(",")
    try:
        return tuple(int(str(item).strip()) for item in items if str(item).strip())
    except ValueError as exc:
        raise UsageError(f"expected a comma list of integers, got {value!r}") from exc


def parse_formats(value: Any) -> tuple[str, ...]:
    items = value if isinstance(value, (list, tuple)) else str(value).split(",")
    formats = tuple(str(item).strip().lower() for item in items if str(item).strip())
    unknown = sorted(set(formats) - set(FORMATS))
    if unknown or not formats:
        raise UsageError(f"formats must be a nonempty subset of {FORMATS}, got {value!r}")
    return formats


@dataclass(frozen=True)
class RunConfig:
    # quadrature
    quad_abs_tol: float = 1e-11
    quad_rel_tol: float = 1e-10
    quad_max_subdivisions: int = 200
    truncation_threshold: float = 1e-18
    root_tol: float = 1e-12
    # bound verification and entropy grids
    bound_resolution: int = 40
    entropy_tau_points: int = 121
    entropy_y_points: int = 41
    entropy_rounds: int = 3
    # sweepout matrix
    g_list: tuple[int, ...] = (1, 5, 20)
    r_grid: tuple[float, float, int] = (0.2, 5.0, 20)
    t_resolution: int = 200
    delta2: float = 0.02
    eta1: float = 1e-3
    eta2: float = 0.05
    catenoid_c: float = 0.125
    iota: float = 0.05
    convention: str = "fold"
    # jacobi
    lambda_points: int = 201
    # run
    threads: int = 1
    output_dir: str = ".gav-results"
    formats: tuple[str, ...] = FORMATS
    config_version: str = __version__

    def __post_init__(self) -> None:
        for name in ("quad_abs_tol", "quad_rel_tol", "truncation_threshold", "root_tol",
                     "delta2", "eta1", "eta2", "iota"):
            if not getattr(self, name) > 0:
                raise UsageError(f"{name} must be positive")
        for name in ("bound_resolution", "entropy_tau_points", "entropy_y_points",
                     "t_resolution", "lambda_points"):
            if getattr(self, name) < 2:
                raise UsageError(f"{name} must be at least 2")
        if self.quad_max_subdivisions < 1 or self.entropy_rounds < 1 or self.threads < 1:
            raise UsageError("subdivisions, rounds and threads must be positive")
        if not 0 < self.catenoid_c < 0.25:
            raise UsageError("catenoid_c must lie in (0, 1/4)")
        if self.convention not in CONVENTIONS:
            raise UsageError(f"convention must be one of {CONVENTIONS}")
        if not self.g_list or min(self.g_list) < 1:
            raise UsageError("g_list must hold positive genera")
        lo, hi, _ = self.r_grid
        if lo < 0.2 or hi > 5.0:
            raise UsageError("r_grid must lie inside [0.2, 5]")
        _check_version(self.config_version)

    def quadrature_spec(self):
        from numerics.quadrature import QuadratureSpec

        return QuadratureSpec(
            abs_tol=self.quad_abs_tol,
            rel_tol=self.quad_rel_tol,
            max_subdivisions=self.quad_max_subdivisions,
            truncation_threshold=self.truncation_threshold,
        )

    def echo(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            out[f.name] = list(value) if isinstance(value, tuple) else value
        return out

    @classmethod
    def from_echo(cls, echo: Mapping[str, Any]) -> "RunConfig":
        return cls(**_coerce(echo))

    def with_overrides(self, overrides: Mapping[str, Any]) -> "RunConfig":
        values = {k: v for k, v in overrides.items() if v is not None}
        return dataclasses.replace(self, **_coerce(values))


_PARSERS: dict[str, Callable[[Any], Any]] = {
    "g_list": parse_int_list,
    "r_grid": parse_grid,
    "formats": parse_formats,
    "config_version": str,
    "convention": lambda v: str(v).lower(),
    "output_dir": str,
}


def _coerce(values: Mapping[str, Any]) -> dict[str, Any]:
    known = {f.name: f for f in dataclasses.fields(RunConfig)}
    out: dict[str, Any] = {}
    for key, value in values.items():
        name = key.replace("-", "_")
        if name not in known:
            raise UsageError(f"unknown config key: {key}")
        if isinstance(value, dict):
            raise UsageError(f"config key {key} must be a scalar, not a mapping")
        parser = _PARSERS.get(name)
        if parser is None:
            default = known[name].default
            parser = int if isinstance(default, int) else float
        try:
            out[name] = parser(value)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad value for {key}: {value!r}") from exc
    return out


def _check_version(version: str) -> None:
    try:
        wanted = Version(version)
    except InvalidVersion as exc:
        raise UsageError(f"config_version is not a version: {version!r}") from exc
    if wanted.major != Version(__version__).major:
        raise UsageError(f"config_version {version} is incompatible with tool {__version__}")


def load_config(path: str | Path | None = None,
                overrides: Mapping[str, Any] | None = None,
                environ: Mapping[str, str] | None = None) -> RunConfig:
    environ = os.environ if environ is None else environ
    values: dict[str, Any] = {}
    if path is not None:
        try:
            data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        except (OSError, yaml.YAMLError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from exc
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise UsageError(f"config {path} must be a key/value mapping")
        values.update(data)
    if environ.get(OUTPUT_DIR_ENV):
        values["output_dir"] = environ[OUTPUT_DIR_ENV]
    config = RunConfig(**_coerce(values))
    return config.with_overrides(overrides or {})
