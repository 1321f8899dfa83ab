import json
import math
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from ..models.entities import (
    DEFAULT_R33,
    Carriers,
    Constellation,
    ConverterDesign,
    Geometry,
    MaterialParams,
    MicrowaveDrive,
)
from ..simulators import physics
from .exceptions import ConfigError, ValidationError

SEED_ENV_VAR = "QEOSIM_SEED"
OPTIMUM = "optimum"

DEFAULT_TOLERANCES = {
    "identity": 1e-9,
    "unitarity": 1e-10,
    "representation": 1e-9,
    "reconstruction": 1e-10,
    "ode": 1e-6,
    "probability": 1e-9,
}


def _finite(section: str, name: str, value: Any, positive: bool = False, allow_zero: bool = True) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{section}.{name}", f"must be a finite number, got {value!r}")
    if positive and (value < 0 or (value == 0 and not allow_zero)):
        raise ConfigError(f"{section}.{name}", "must be > 0" if not allow_zero else "must be >= 0")
    return float(value)


def _integer(section: str, name: str, value: Any, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{section}.{name}", f"must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{section}.{name}", f"must be >= {minimum}")
    return value


def _as_list(value: Any) -> List[Any]:
    return list(value) if isinstance(value, (list, tuple)) else [value]


@dataclass
class MaterialConfig:
    eps_op: Optional[float] = None
    n_op: Optional[float] = None
    r33: float = DEFAULT_R33

    def __post_init__(self):
        if self.eps_op is not None and self.n_op is not None:
            raise ConfigError("material", "give eps_op or n_op, not both")
        if self.eps_op is None and self.n_op is None:
            self.n_op = 1.734
        for name in ("eps_op", "n_op"):
            if getattr(self, name) is not None:
                setattr(self, name, _finite("material", name, getattr(self, name)))
        self.r33 = _finite("material", "r33", self.r33, positive=True, allow_zero=False)

    def build(self) -> MaterialParams:
        if self.n_op is not None:
            return MaterialParams.from_index(self.n_op, self.r33)
        return MaterialParams(eps_op=self.eps_op, r33=self.r33)


@dataclass
class CarrierConfig:
    f_w_hz: float = 30e9
    lambda_op_m: float = 1555e-9

    def __post_init__(self):
        self.f_w_hz = _finite("carriers", "f_w_hz", self.f_w_hz, positive=True, allow_zero=False)
        self.lambda_op_m = _finite("carriers", "lambda_op_m", self.lambda_op_m, positive=True, allow_zero=False)

    def build(self) -> Carriers:
        return Carriers(f_w=self.f_w_hz, lambda_op=self.lambda_op_m)


@dataclass
class GeometryConfig:
    W_m: Union[float, str] = OPTIMUM
    D_m: Union[float, str] = OPTIMUM
    N: Union[int, List[int]] = 1
    gamma: float = 6500.0

    def __post_init__(self):
        for name in ("W_m", "D_m"):
            value = getattr(self, name)
            if value != OPTIMUM:
                setattr(self, name, _finite("geometry", name, value, positive=True, allow_zero=False))
        counts = _as_list(self.N)
        if not counts:
            raise ConfigError("geometry.N", "must not be empty")
        self.N = [_integer("geometry", "N", n, 1) for n in counts]
        self.gamma = _finite("geometry", "gamma", self.gamma, positive=True, allow_zero=False)

    @property
    def element_counts(self) -> Tuple[int, ...]:
        return tuple(self.N)


@dataclass
class DriveConfig:
    E_w_v_per_m: float = 50.0
    constellation_deg: List[float] = field(default_factory=lambda: [0.0, 60.0, 120.0, 180.0])

    def __post_init__(self):
        self.E_w_v_per_m = _finite("drive", "E_w_v_per_m", self.E_w_v_per_m, positive=True)
        if not isinstance(self.constellation_deg, (list, tuple)) or not self.constellation_deg:
            raise ConfigError("drive.constellation_deg", "must be a non-empty list of degrees")
        self.constellation_deg = [_finite("drive", "constellation_deg", b) for b in self.constellation_deg]
        self.constellation()

    def constellation(self) -> Constellation:
        try:
            return Constellation.from_degrees(self.constellation_deg)
        except ValidationError as exc:
            raise ConfigError("drive.constellation_deg", exc.constraint) from exc


@dataclass
class StateConfig:
    n_ph: Union[float, List[float]] = 10.0

    def __post_init__(self):
        values = _as_list(self.n_ph)
        if not values:
            raise ConfigError("state.n_ph", "must not be empty")
        self.n_ph = [_finite("state", "n_ph", v, positive=True) for v in values]

    @property
    def photon_numbers(self) -> Tuple[float, ...]:
        return tuple(self.n_ph)


@dataclass
class MonteCarloConfig:
    n_samples: int = 1000
    n_trials: int = 100000
    seed: int = 20240501
    workers: int = 1

    def __post_init__(self):
        self.n_samples = _integer("mc", "n_samples", self.n_samples, 1)
        self.n_trials = _integer("mc", "n_trials", self.n_trials, 1000)
        self.seed = _integer("mc", "seed", self.seed, 0)
        if self.seed >= 1 << 64:
            raise ConfigError("mc.seed", "must fit in 64 bits")
        self.workers = _integer("mc", "workers", self.workers, 1)


@dataclass
class NumericsConfig:
    S: Optional[int] = None
    K: Optional[int] = None
    steps_per_period: int = 2000
    sweep_points: int = 201
    tolerances: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.S is not None:
            self.S = _integer("numerics", "S", self.S, 1)
        if self.K is not None:
            self.K = _integer("numerics", "K", self.K, 0)
        self.steps_per_period = _integer("numerics", "steps_per_period", self.steps_per_period, 1000)
        self.sweep_points = _integer("numerics", "sweep_points", self.sweep_points, 2)
        if not isinstance(self.tolerances, dict):
            raise ConfigError("numerics.tolerances", "must be an object")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError("numerics.tolerances", f"unknown keys {sorted(unknown)}")
        merged = dict(DEFAULT_TOLERANCES)
        for name, value in self.tolerances.items():
            merged[name] = _finite("numerics.tolerances", name, value, positive=True, allow_zero=False)
        self.tolerances = merged


_SECTIONS = {
    "material": MaterialConfig,
    "carriers": CarrierConfig,
    "geometry": GeometryConfig,
    "drive": DriveConfig,
    "state": StateConfig,
    "mc": MonteCarloConfig,
    "numerics": NumericsConfig,
}


@dataclass
class ScenarioConfig:
    material: MaterialConfig = field(default_factory=MaterialConfig)
    carriers: CarrierConfig = field(default_factory=CarrierConfig)
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    drive: DriveConfig = field(default_factory=DriveConfig)
    state: StateConfig = field(default_factory=StateConfig)
    mc: MonteCarloConfig = field(default_factory=MonteCarloConfig)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    source: Optional[Path] = None

    def __post_init__(self):
        # "optimum" keywords are resolved before any run
        self.resolved_W_m, self.resolved_D_m = self._resolve_dimensions()

    @classmethod
    def from_dict(cls, document: Dict[str, Any], source: Optional[Path] = None) -> "ScenarioConfig":
        if not isinstance(document, dict):
            raise ConfigError("<root>", "configuration must be a JSON object")
        unknown = set(document) - set(_SECTIONS)
        if unknown:
            raise ConfigError("<root>", f"unknown sections {sorted(unknown)}")
        sections = {}
        for name, section_cls in _SECTIONS.items():
            body = document.get(name, {})
            if not isinstance(body, dict):
                raise ConfigError(name, "must be an object")
            allowed = {f.name for f in fields(section_cls)}
            extra = set(body) - allowed
            if extra:
                raise ConfigError(name, f"unknown keys {sorted(extra)}")
            sections[name] = section_cls(**body)
        return cls(source=source, **sections)

    def _resolve_dimensions(self) -> Tuple[float, float]:
        try:
            mat, car = self.material.build(), self.carriers.build()
        except ValidationError as exc:
            raise ConfigError(exc.field, exc.constraint) from exc
        w_o = physics.optimum_element_width(mat, car)
        width = w_o if self.geometry.W_m == OPTIMUM else self.geometry.W_m
        spacing = physics.optimum_array_periodicity(mat, car) if self.geometry.D_m == OPTIMUM else self.geometry.D_m
        if spacing < width:
            raise ConfigError("geometry.D_m", f"must be >= W_m ({width:.6g} m)")
        return width, spacing

    def design(self, N: Optional[int] = None, b: float = 0.0) -> ConverterDesign:
        count = self.geometry.element_counts[0] if N is None else N
        try:
            return ConverterDesign(
                material=self.material.build(),
                carriers=self.carriers.build(),
                geometry=Geometry(W=self.resolved_W_m, D=self.resolved_D_m, N=count, gamma=self.geometry.gamma),
                drive=MicrowaveDrive(E_w=self.drive.E_w_v_per_m, b=b),
            )
        except ValidationError as exc:
            raise ConfigError(exc.field, exc.constraint) from exc

    def resolved(self) -> Dict[str, Any]:
        """Fully resolved parameters, echoed into every artifact."""
        document = {name: asdict(getattr(self, name)) for name in _SECTIONS}
        document["geometry"]["W_m"] = self.resolved_W_m
        document["geometry"]["D_m"] = self.resolved_D_m
        return document


def _reject_constant(token: str):
    raise ConfigError("<document>", f"non-finite number {token} is not allowed")


def load_config(path: Union[str, Path], seed_override: Optional[int] = None) -> ScenarioConfig:
    """Read and validate a scenario document; QEOSIM_SEED and seed_override replace mc.seed."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError("<path>", f"configuration file {path} does not exist")
    try:
        document = json.loads(path.read_text(encoding="utf-8"), parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ConfigError("<document>", f"invalid JSON: {exc}") from exc
    config = ScenarioConfig.from_dict(document, source=path)
    env_seed = os.getenv(SEED_ENV_VAR)
    if env_seed is not None:
        try:
            config.mc.seed = int(env_seed)
        except ValueError as exc:
            raise ConfigError(SEED_ENV_VAR, f"must be an integer, got {env_seed!r}") from exc
    if seed_override is not None:
        config.mc.seed = seed_override
    if not 0 <= config.mc.seed < 1 << 64:
        raise ConfigError("mc.seed", "must be an unsigned 64-bit integer")
    return config
