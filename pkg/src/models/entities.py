# src/models/entities.py
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from ..core.exceptions import CarrierRatioWarning, ValidationError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

# Pockels coefficient of congruent LiNbO3
DEFAULT_R33 = 30.8e-12


def _require_finite(name: str, value: float):
    if not isinstance(value, (int, float, np.floating, np.integer)) or not math.isfinite(value):
        raise ValidationError(name, f"must be a finite number, got {value!r}")


@dataclass(frozen=True)
class MaterialParams:
    """Electro-optic waveguide material: relative permittivity and Pockels coefficient."""
    eps_op: float
    r33: float = DEFAULT_R33

    def __post_init__(self):
        _require_finite("eps_op", self.eps_op)
        _require_finite("r33", self.r33)
        if self.eps_op <= 1.0:
            raise ValidationError("eps_op", "must be > 1")
        if self.r33 <= 0.0:
            raise ValidationError("r33", "must be > 0")

    @classmethod
    def from_index(cls, n_op: float, r33: float = DEFAULT_R33) -> "MaterialParams":
        _require_finite("n_op", n_op)
        if n_op <= 1.0:
            raise ValidationError("n_op", "must be > 1")
        return cls(eps_op=n_op * n_op, r33=r33)

    @property
    def n_op(self) -> float:
        return math.sqrt(self.eps_op)


@dataclass(frozen=True)
class Carriers:
    """Microwave drive frequency and optical vacuum wavelength."""
    f_w: float
    lambda_op: float

    def __post_init__(self):
        _require_finite("f_w", self.f_w)
        _require_finite("lambda_op", self.lambda_op)
        if self.f_w <= 0.0:
            raise ValidationError("f_w", "must be > 0")
        if self.lambda_op <= 0.0:
            raise ValidationError("lambda_op", "must be > 0")
        ratio = self.omega_op / self.omega_w
        if ratio <= 100.0:
            logger.warning("optical/microwave frequency ratio %.1f is not >> 1", ratio)
            warnings.warn(
                f"omega_op/omega_w = {ratio:.1f}; the narrowband picture assumes a ratio > 100",
                CarrierRatioWarning,
                stacklevel=3,
            )

    @property
    def omega_w(self) -> float:
        return TWO_PI * self.f_w

    @property
    def omega_op(self) -> float:
        return TWO_PI * SPEED_OF_LIGHT / self.lambda_op

    @property
    def period_w(self) -> float:
        return 1.0 / self.f_w

    def k_op(self, material: MaterialParams) -> float:
        """Guided-mode phase constant n_op * omega_op / c (rad/m)."""
        return material.n_op * self.omega_op / SPEED_OF_LIGHT


@dataclass(frozen=True)
class Geometry:
    """Element width W, array periodicity D, element count N, slot enhancement gamma."""
    W: float
    D: float
    N: int = 1
    gamma: float = 6500.0

    def __post_init__(self):
        _require_finite("W", self.W)
        _require_finite("D", self.D)
        _require_finite("gamma", self.gamma)
        if isinstance(self.N, bool) or not isinstance(self.N, (int, np.integer)):
            raise ValidationError("N", f"must be an integer, got {self.N!r}")
        if self.N < 1:
            raise ValidationError("N", "must be >= 1")
        if self.W <= 0.0:
            raise ValidationError("W", "must be > 0")
        # G >= 0, tolerating round-off when D is set equal to W
        if self.D < self.W * (1.0 - 1e-12):
            raise ValidationError("D", f"must be >= W ({self.W!r})")
        if self.gamma <= 0.0:
            raise ValidationError("gamma", "must be > 0")

    @property
    def G(self) -> float:
        return max(self.D - self.W, 0.0)


@dataclass(frozen=True)
class MicrowaveDrive:
    """Received field strength |E_w| (V/m) and PSK symbol phase b (rad, kept in [0, 2pi))."""
    E_w: float
    b: float = 0.0

    def __post_init__(self):
        _require_finite("E_w", self.E_w)
        _require_finite("b", self.b)
        if self.E_w < 0.0:
            raise ValidationError("E_w", "must be >= 0")
        object.__setattr__(self, "b", normalize_angle(self.b))


def normalize_angle(angle: float) -> float:
    wrapped = math.fmod(angle, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    # fmod of a value just below 0 can round up to exactly 2*pi
    return 0.0 if wrapped >= TWO_PI else wrapped


@dataclass(frozen=True)
class ConverterDesign:
    material: MaterialParams
    carriers: Carriers
    geometry: Geometry
    drive: MicrowaveDrive

    def with_geometry(self, **changes) -> "ConverterDesign":
        params = {
            "W": self.geometry.W,
            "D": self.geometry.D,
            "N": self.geometry.N,
            "gamma": self.geometry.gamma,
        }
        params.update(changes)
        return ConverterDesign(self.material, self.carriers, Geometry(**params), self.drive)

    def with_drive(self, **changes) -> "ConverterDesign":
        params = {"E_w": self.drive.E_w, "b": self.drive.b}
        params.update(changes)
        return ConverterDesign(self.material, self.carriers, self.geometry, MicrowaveDrive(**params))

    @property
    def k_op(self) -> float:
        return self.carriers.k_op(self.material)


@dataclass(frozen=True)
class DepthResult:
    """Single-element and array modulation depths with their offsets (radians)."""
    delta_theta: float
    phi: float
    delta_theta_N: float
    phi_N: float
    chi: float
    omega_w: float
    N: int


def _frozen_array(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class SidebandVector:
    """Amplitudes C^s for s in [-S, S]; index i holds order s = i - S."""
    S: int
    amps: np.ndarray

    def __post_init__(self):
        if self.S < 0:
            raise ValidationError("S", "must be >= 0")
        amps = _frozen_array(self.amps, complex)
        if amps.shape != (2 * self.S + 1,):
            raise ValidationError("amps", f"expected shape ({2 * self.S + 1},), got {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise ValidationError("amps", "must be finite")
        object.__setattr__(self, "amps", amps)

    @classmethod
    def unit(cls, S: int, order: int = 0) -> "SidebandVector":
        amps = np.zeros(2 * S + 1, dtype=complex)
        amps[order + S] = 1.0
        return cls(S=S, amps=amps)

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-self.S, self.S + 1)

    def amplitude(self, order: int) -> complex:
        return complex(self.amps[order + self.S])

    @property
    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))


@dataclass(frozen=True)
class SidebandMatrix:
    """Truncated transmission matrix; row/column i maps to sideband order i - S."""
    S: int
    entries: np.ndarray
    t: float = 0.0
    b: float = 0.0
    label: str = ""

    def __post_init__(self):
        if self.S < 0:
            raise ValidationError("S", "must be >= 0")
        entries = _frozen_array(self.entries, complex)
        size = 2 * self.S + 1
        if entries.shape != (size, size):
            raise ValidationError("entries", f"expected shape ({size}, {size}), got {entries.shape}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def identity(cls, S: int, phase: float = 0.0, label: str = "identity") -> "SidebandMatrix":
        return cls(S=S, entries=np.exp(-1j * phase) * np.eye(2 * S + 1), label=label)

    def entry(self, s: int, p: int) -> complex:
        return complex(self.entries[s + self.S, p + self.S])


@dataclass(frozen=True)
class SidebandProbabilities:
    orders: np.ndarray
    probabilities: np.ndarray
    total: float
    tail: float

    def probability(self, order: int) -> float:
        S = (len(self.orders) - 1) // 2
        if abs(order) > S:
            return 0.0
        return float(self.probabilities[order + S])


@dataclass(frozen=True)
class SweepRow:
    w: float
    P0: float
    P1: float
    P2: float
    tail: float
    truncation_tail: float


@dataclass(frozen=True)
class FockState:
    """Amplitudes C_k over the truncated Fock basis |0>..|K>."""
    amps: np.ndarray
    status: str = "ok"

    def __post_init__(self):
        amps = _frozen_array(self.amps, complex)
        if amps.ndim != 1 or amps.size == 0:
            raise ValidationError("amps", "must be a non-empty 1-D array")
        if not np.all(np.isfinite(amps)):
            raise ValidationError("amps", "must be finite")
        object.__setattr__(self, "amps", amps)

    @property
    def K(self) -> int:
        return self.amps.size - 1

    @property
    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    @property
    def tail(self) -> float:
        return max(1.0 - self.norm_squared, 0.0)


@dataclass(frozen=True)
class CoherentState:
    alpha: complex

    def __post_init__(self):
        alpha = complex(self.alpha)
        if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
            raise ValidationError("alpha", "must be finite")
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def from_photon_number(cls, n_ph: float, phase: float = 0.0) -> "CoherentState":
        _require_finite("n_ph", n_ph)
        if n_ph < 0.0:
            raise ValidationError("n_ph", "must be >= 0")
        return cls(alpha=math.sqrt(n_ph) * complex(math.cos(phase), math.sin(phase)))

    @property
    def n_ph(self) -> float:
        return abs(self.alpha) ** 2


@dataclass(frozen=True)
class EncodedSymbol:
    b: float
    theta: float
    alpha_i: complex

    @property
    def mean_x(self) -> float:
        return self.alpha_i.real

    @property
    def mean_p(self) -> float:
        return self.alpha_i.imag

    @property
    def mean(self) -> Tuple[float, float]:
        return (self.alpha_i.real, self.alpha_i.imag)


@dataclass(frozen=True)
class AmplitudeOdeResult:
    k: int
    phase: float
    closed_form_phase: float
    halving_delta: float
    steps: int

    @property
    def factor(self) -> complex:
        return complex(np.exp(-1j * self.phase))

    @property
    def error(self) -> float:
        return abs(self.phase - self.closed_form_phase)


@dataclass(frozen=True)
class Constellation:
    """Ordered PSK symbol phases b_i (radians)."""
    phases: Tuple[float, ...]

    def __post_init__(self):
        phases = tuple(float(b) for b in self.phases)
        if not phases:
            raise ValidationError("phases", "need at least one symbol")
        for b in phases:
            _require_finite("phases", b)
        wrapped = [normalize_angle(b) for b in phases]
        for i in range(len(wrapped)):
            for j in range(i + 1, len(wrapped)):
                gap = abs(wrapped[i] - wrapped[j])
                if min(gap, TWO_PI - gap) < 1e-12:
                    raise ValidationError("phases", f"symbols {i} and {j} coincide mod 2pi")
        object.__setattr__(self, "phases", phases)

    @classmethod
    def from_degrees(cls, degrees: Sequence[float]) -> "Constellation":
        return cls(tuple(math.radians(d) for d in degrees))

    @property
    def degrees(self) -> List[float]:
        return [math.degrees(b) for b in self.phases]


@dataclass(frozen=True)
class SymbolCloud:
    symbol: EncodedSymbol
    sigma: float
    samples: np.ndarray
    seed: int

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]


@dataclass(frozen=True)
class SerEstimate:
    ser: float
    ci95: float
    n_trials: int
    per_symbol_errors: List[int] = field(default_factory=list)
    per_symbol_trials: List[int] = field(default_factory=list)

    def as_dict(self) -> Dict:
        return {
            "ser": self.ser,
            "ci95": self.ci95,
            "n_trials": self.n_trials,
            "per_symbol_errors": list(self.per_symbol_errors),
        }
