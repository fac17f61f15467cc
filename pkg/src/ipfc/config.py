"""Run configuration: TOML tables for model, lattice, time, init, output.

Key names are part of the external interface; see the README for the
documented schema.  Every malformed entry raises ConfigError with the
offending key in the message.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

try:
    import tomllib
except ImportError:  # python < 3.11
    import tomli as tomllib

from .errors import ConfigError
from .field import SpectralField
from .lattice import PMLattice, ddqc_lattice, periodic_lattice
from .model import ModelParams
from .presets import ddqc_seed, random_seed, sine_seed

SCHEMES = ("cn", "cn_sdc")
INIT_PRESETS = ("sine", "ddqc", "random")


@dataclass(frozen=True)
class TimeConfig:
    scheme: str
    T: float
    NT: int
    sweeps: int = 1


@dataclass(frozen=True)
class InitConfig:
    preset: str
    amplitude: float
    seed: int = 0


@dataclass(frozen=True)
class RenderConfig:
    bbox: Tuple[float, ...]
    resolution: Tuple[int, ...]
    threshold: float = 0.0


@dataclass(frozen=True)
class OutputConfig:
    directory: Path
    energy_csv: str = "energy.csv"
    dump_every: int = 0
    figures: bool = True
    render: Optional[RenderConfig] = None


@dataclass(frozen=True)
class ConvergeConfig:
    nts: Tuple[int, ...]
    reference_nt: int
    schemes: Tuple[str, ...] = SCHEMES


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    lattice: PMLattice
    time: TimeConfig
    init: InitConfig
    output: OutputConfig
    converge: Optional[ConvergeConfig] = None


def _require(table: Dict[str, Any], key: str, section: str) -> Any:
    if key not in table:
        raise ConfigError(f"missing key '{key}' in [{section}]")
    return table[key]


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number, got {value!r}")
    return float(value)


def _integer(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where} must be an integer, got {value!r}")
    return value


def _matrix(value: Any, where: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where} must be a list of numeric rows") from exc
    if arr.ndim != 2:
        raise ConfigError(f"{where} must be a list of rows, got shape {arr.shape}")
    return arr


def _build_model(table: Dict[str, Any]) -> ModelParams:
    scales = _require(table, "scales", "model")
    if not isinstance(scales, Sequence) or isinstance(scales, (str, bytes)):
        raise ConfigError("model.scales must be a list of numbers")
    try:
        return ModelParams(
            scales=tuple(_number(q, "model.scales entry") for q in scales),
            epsilon=_number(_require(table, "epsilon", "model"), "model.epsilon"),
            alpha=_number(_require(table, "alpha", "model"), "model.alpha"),
            c1=_number(table.get("c1", 1e16), "model.c1"),
            dealias=bool(table.get("dealias", False)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _build_lattice(table: Dict[str, Any]) -> PMLattice:
    N = _require(table, "N", "lattice")
    if not isinstance(N, Sequence) or isinstance(N, (str, bytes)):
        raise ConfigError("lattice.N must be a list of even integers")
    N = tuple(_integer(m, "lattice.N entry") for m in N)
    preset = table.get("preset")
    try:
        if preset == "periodic":
            return periodic_lattice(len(N), N)
        if preset == "ddqc":
            return ddqc_lattice(N)
        if preset is not None:
            raise ConfigError(f"unknown lattice.preset {preset!r}")
        d = _integer(_require(table, "d", "lattice"), "lattice.d")
        P = _matrix(_require(table, "P", "lattice"), "lattice.P")
        B = _matrix(_require(table, "B", "lattice"), "lattice.B")
        return PMLattice(d=d, n=len(N), P=P, B=B, N=N)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _build_time(table: Dict[str, Any]) -> TimeConfig:
    scheme = _require(table, "scheme", "time")
    if scheme not in SCHEMES:
        raise ConfigError(f"time.scheme must be one of {SCHEMES}, got {scheme!r}")
    T = _number(_require(table, "T", "time"), "time.T")
    NT = _integer(_require(table, "NT", "time"), "time.NT")
    sweeps = _integer(table.get("sweeps", 1), "time.sweeps")
    if not (np.isfinite(T) and T > 0):
        raise ConfigError(f"time.T must be positive, got {T}")
    if NT < 1:
        raise ConfigError(f"time.NT must be at least 1, got {NT}")
    if sweeps < 0:
        raise ConfigError(f"time.sweeps must be non-negative, got {sweeps}")
    return TimeConfig(scheme=scheme, T=T, NT=NT, sweeps=sweeps)


def _build_init(table: Dict[str, Any]) -> InitConfig:
    preset = _require(table, "preset", "init")
    if preset not in INIT_PRESETS:
        raise ConfigError(f"init.preset must be one of {INIT_PRESETS}, got {preset!r}")
    amplitude = _number(table.get("amplitude", 0.3), "init.amplitude")
    seed = _integer(table.get("seed", 0), "init.seed")
    return InitConfig(preset=preset, amplitude=amplitude, seed=seed)


def _build_render(table: Dict[str, Any]) -> RenderConfig:
    bbox = _require(table, "bbox", "output.render")
    resolution = _require(table, "resolution", "output.render")
    if not isinstance(bbox, Sequence) or len(bbox) not in (2, 4):
        raise ConfigError("output.render.bbox must have 2 (1D) or 4 (2D) entries")
    if not isinstance(resolution, Sequence) or len(resolution) not in (1, 2):
        raise ConfigError("output.render.resolution must have 1 or 2 entries")
    res = tuple(_integer(m, "output.render.resolution entry") for m in resolution)
    if any(m < 2 for m in res):
        raise ConfigError(f"render resolution must be at least 2 per axis, got {res}")
    return RenderConfig(
        bbox=tuple(_number(v, "output.render.bbox entry") for v in bbox),
        resolution=res,
        threshold=_number(table.get("threshold", 0.0), "output.render.threshold"),
    )


def _build_output(table: Dict[str, Any]) -> OutputConfig:
    directory = _require(table, "directory", "output")
    if not isinstance(directory, str):
        raise ConfigError(f"output.directory must be a string, got {directory!r}")
    dump_every = _integer(table.get("dump_every", 0), "output.dump_every")
    if dump_every < 0:
        raise ConfigError(f"output.dump_every must be non-negative, got {dump_every}")
    render = _build_render(table["render"]) if "render" in table else None
    return OutputConfig(
        directory=Path(directory),
        energy_csv=str(table.get("energy_csv", "energy.csv")),
        dump_every=dump_every,
        figures=bool(table.get("figures", True)),
        render=render,
    )


def _build_converge(table: Dict[str, Any]) -> ConvergeConfig:
    nts = _require(table, "nts", "converge")
    if not isinstance(nts, Sequence) or not nts:
        raise ConfigError("converge.nts must be a non-empty list of integers")
    schemes = table.get("schemes", list(SCHEMES))
    if not isinstance(schemes, Sequence) or isinstance(schemes, (str, bytes)):
        raise ConfigError("converge.schemes must be a list of scheme tags")
    for s in schemes:
        if s not in SCHEMES:
            raise ConfigError(f"converge.schemes entry must be one of {SCHEMES}, got {s!r}")
    return ConvergeConfig(
        nts=tuple(_integer(m, "converge.nts entry") for m in nts),
        reference_nt=_integer(_require(table, "reference_nt", "converge"),
                              "converge.reference_nt"),
        schemes=tuple(schemes),
    )


def parse_config(data: Dict[str, Any]) -> RunConfig:
    for section in ("model", "lattice", "time", "init", "output"):
        if section not in data:
            raise ConfigError(f"missing [{section}] section")
        if not isinstance(data[section], dict):
            raise ConfigError(f"[{section}] must be a table")
    return RunConfig(
        model=_build_model(data["model"]),
        lattice=_build_lattice(data["lattice"]),
        time=_build_time(data["time"]),
        init=_build_init(data["init"]),
        output=_build_output(data["output"]),
        converge=_build_converge(data["converge"]) if "converge" in data else None,
    )


def load_config(path: Path) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    return parse_config(data)


def initial_field(cfg: RunConfig) -> SpectralField:
    init = cfg.init
    if init.preset == "sine":
        return sine_seed(cfg.lattice, init.amplitude)
    if init.preset == "ddqc":
        return ddqc_seed(cfg.lattice, init.amplitude)
    return random_seed(cfg.lattice, init.seed, init.amplitude)
