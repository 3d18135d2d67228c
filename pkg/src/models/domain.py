"""
Domain Models for the Hexagonal Kerr Cavity

Scalar records are pydantic models; containers that carry numpy arrays are
frozen dataclasses validated on construction. All amplitudes and intensities
are in saturation-scaled units, times in units of 1/gamma.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Annotated, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, field_validator, model_validator

N_MODES = 7
N_HEX = 6
HEX_DETUNING = 2.0
C_IN = np.array([[1.0, 1.0j], [-1.0j, 1.0]], dtype=complex)


def wrap_angle(x: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    y = math.remainder(x, 2.0 * math.pi)
    if y <= -math.pi:
        y += 2.0 * math.pi
    return y


def _as_complex(value):
    if isinstance(value, (int, float, np.integer, np.floating, np.complexfloating)):
        return complex(value)
    return value


ComplexValue = Annotated[complex, BeforeValidator(_as_complex)]


def _read_only(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


# ============================================================================
# PARAMETERS
# ============================================================================

class ModelParams(BaseModel):
    """Dimensionless cavity parameters."""

    model_config = ConfigDict(frozen=True)

    gamma: float = Field(1.0, gt=0, description="Cavity linewidth (inverse time)")
    delta: float = Field(description="Cavity detuning")
    e_in: ComplexValue = Field(description="Driving amplitude, saturation-scaled")
    ld2kc2: float = Field(description="Diffraction length times critical wavenumber, squared")

    @field_validator("delta", "ld2kc2")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("must be finite")
        return v

    @field_validator("e_in")
    @classmethod
    def _finite_drive(cls, v: complex) -> complex:
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise ValueError("drive amplitude must be finite")
        return v

    @classmethod
    def at_criticality(cls, delta: float, e_in: complex, gamma: float = 1.0) -> "ModelParams":
        """Parameters with the hexagonal wavenumber fixed so that delta + ld2kc2 = 2."""
        return cls(gamma=gamma, delta=delta, e_in=e_in, ld2kc2=HEX_DETUNING - delta)

    @classmethod
    def on_resonance_line(cls, drive: float, gamma: float = 1.0) -> "ModelParams":
        """Operating condition delta = |E_0s|^2, where E_in = E_0s (real)."""
        return cls.at_criticality(delta=drive, e_in=math.sqrt(drive), gamma=gamma)

    @property
    def hex_detuning(self) -> float:
        return self.delta + self.ld2kc2

    @property
    def drive_intensity(self) -> float:
        return abs(self.e_in) ** 2

    def with_drive(self, intensity: float, track_delta: bool = False) -> "ModelParams":
        """Same parameters at a new drive intensity, keeping the drive phase."""
        phase = cmath.phase(self.e_in) if self.e_in != 0 else 0.0
        update = {"e_in": cmath.rect(math.sqrt(max(intensity, 0.0)), phase)}
        if track_delta:
            update["delta"] = intensity
            update["ld2kc2"] = self.hex_detuning - intensity
        return self.model_copy(update=update)


class ModeIndex(BaseModel):
    """Mode label: 0 is the homogeneous mode, 1..6 the hexagonal modes."""

    model_config = ConfigDict(frozen=True)

    value: int = Field(ge=0, le=6)

    @property
    def is_hexagonal(self) -> bool:
        return self.value >= 1

    def oplus(self, other: int | "ModeIndex") -> "ModeIndex":
        j = other.value if isinstance(other, ModeIndex) else int(other)
        if not self.is_hexagonal or not 1 <= j <= 6:
            raise ValueError(f"oplus is defined on hexagonal indices only, got {self.value} and {j}")
        return ModeIndex(value=((self.value + j - 1) % 6) + 1)


# ============================================================================
# STATES
# ============================================================================

@dataclass(frozen=True)
class ModeState:
    """Seven complex mode amplitudes: index 0 homogeneous, 1..6 hexagonal."""

    alpha: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.alpha, dtype=np.complex128).reshape(-1)
        if arr.shape != (N_MODES,):
            raise ValueError(f"ModeState needs {N_MODES} amplitudes, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("ModeState amplitudes must be finite")
        object.__setattr__(self, "alpha", _read_only(arr))

    @classmethod
    def zeros(cls) -> "ModeState":
        return cls(np.zeros(N_MODES, dtype=complex))

    @classmethod
    def homogeneous(cls, a0: complex, hexagonal: Optional[np.ndarray] = None) -> "ModeState":
        alpha = np.zeros(N_MODES, dtype=complex)
        alpha[0] = a0
        if hexagonal is not None:
            alpha[1:] = hexagonal
        return cls(alpha)

    @property
    def a0(self) -> complex:
        return complex(self.alpha[0])

    @property
    def hexagonal(self) -> np.ndarray:
        return self.alpha[1:]

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.alpha)))


class HexSteadyState(BaseModel):
    """Classical hexagon: beta0, |beta|, common phase and the two free phase differences."""

    model_config = ConfigDict(frozen=True)

    beta0: ComplexValue = Field(description="Homogeneous mode amplitude")
    beta_mag: float = Field(ge=0, description="Common modulus of the hexagonal modes")
    phi: float = Field(description="Common phase, half the sum of symmetric-mode phases")
    dphi1: float = Field(0.0, description="Free phase difference of pair (1, 4)")
    dphi3: float = Field(0.0, description="Free phase difference of pair (3, 6)")

    @field_validator("phi")
    @classmethod
    def _wrap_phi(cls, v: float) -> float:
        return wrap_angle(v)

    @property
    def dphi5(self) -> float:
        return -self.dphi1 - self.dphi3

    @property
    def beta(self) -> complex:
        return cmath.rect(self.beta_mag, self.phi)

    @property
    def is_gauged(self) -> bool:
        return abs(self.dphi1) < 1e-12 and abs(self.dphi3) < 1e-12

    def phase_differences(self) -> np.ndarray:
        """phi_j - phi_{j+3} for j = 1..6; the second half mirrors the first."""
        d1, d3 = self.dphi1, self.dphi3
        d2 = -self.dphi5
        return np.array([d1, d2, d3, -d1, -d2, -d3])

    def mode_phases(self) -> np.ndarray:
        return self.phi + 0.5 * self.phase_differences()

    def to_mode_state(self) -> ModeState:
        hexagonal = self.beta_mag * np.exp(1j * self.mode_phases())
        return ModeState.homogeneous(self.beta0, hexagonal)


# ============================================================================
# SWEEPS
# ============================================================================

class SweepPoint(BaseModel):
    e_in_sq: float
    beta_mag: float = Field(ge=0)
    beta0_mag: float = Field(ge=0)


class SweepResult(BaseModel):
    """Branch of steady amplitudes recorded along a slow drive ramp."""

    direction: Literal["forward", "backward"]
    points: List[SweepPoint] = Field(default_factory=list)

    @model_validator(mode="after")
    def _monotone(self) -> "SweepResult":
        drives = [p.e_in_sq for p in self.points]
        sign = 1.0 if self.direction == "forward" else -1.0
        for prev, nxt in zip(drives, drives[1:]):
            if sign * (nxt - prev) <= 0:
                raise ValueError(f"drive values not strictly monotone for a {self.direction} sweep")
        return self

    def jump_drive(self, level: float) -> Optional[float]:
        """First drive at which |beta| exceeds level."""
        for p in self.points:
            if p.beta_mag > level:
                return p.e_in_sq
        return None

    def drop_drive(self, level: float) -> Optional[float]:
        """First drive at which |beta| falls to level or below."""
        for p in self.points:
            if p.beta_mag <= level:
                return p.e_in_sq
        return None


class DriveRamp(BaseModel):
    """Linear ramp of |E_in|^2 in time, piecewise constant over one integration step."""

    model_config = ConfigDict(frozen=True)

    start: float = Field(ge=0, description="|E_in|^2 at t = 0")
    rate: float = Field(description="d|E_in|^2 / d(gamma t)")
    phase: float = 0.0
    track_delta: bool = Field(True, description="Keep delta equal to |E_in|^2")

    def intensity_at(self, t: float) -> float:
        return max(self.start + self.rate * t, 0.0)


@dataclass(frozen=True)
class IntegrationResult:
    final: ModeState
    time: float
    steps: int
    times: Optional[np.ndarray] = None
    trajectory: Optional[np.ndarray] = None
    converged: Optional[bool] = None


# ============================================================================
# STEADY-STATE SOLVER
# ============================================================================

class RealVars(BaseModel):
    """Shifted real variables of the symmetric hexagon."""

    model_config = ConfigDict(frozen=True)

    u0: float = 0.0
    v0: float = 0.0
    u1: float = 0.0
    v1: float = 0.0

    @model_validator(mode="after")
    def _finite(self) -> "RealVars":
        if not all(math.isfinite(x) for x in (self.u0, self.v0, self.u1, self.v1)):
            raise ValueError("RealVars must be finite")
        return self

    def as_array(self) -> np.ndarray:
        return np.array([self.u0, self.v0, self.u1, self.v1], dtype=float)

    @classmethod
    def from_array(cls, x) -> "RealVars":
        u0, v0, u1, v1 = (float(v) for v in x)
        return cls(u0=u0, v0=v0, u1=u1, v1=v1)


class SolverReport(BaseModel):
    vars: RealVars
    residual_norm: float
    iterations: int
    branch: Literal["homogeneous", "hexagon"]
    e0s_sq: float
    delta: float


# ============================================================================
# LINEAR SYSTEMS
# ============================================================================

@dataclass(frozen=True)
class FullLinearSystem:
    """Linearized drift on (da_0..da_6, da_0^+..da_6^+), dimensionless (multiply by gamma)."""

    drift: np.ndarray
    gamma: float = 1.0

    def __post_init__(self):
        d = np.asarray(self.drift, dtype=complex)
        if d.shape != (2 * N_MODES, 2 * N_MODES):
            raise ValueError(f"drift must be {2 * N_MODES}x{2 * N_MODES}, got {d.shape}")
        n = N_MODES
        scale = max(1.0, float(np.max(np.abs(d))))
        if (np.max(np.abs(d[n:, n:] - d[:n, :n].conj())) > 1e-12 * scale
                or np.max(np.abs(d[n:, :n] - d[:n, n:].conj())) > 1e-12 * scale):
            raise ValueError("drift violates the creation/annihilation block symmetry")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        object.__setattr__(self, "drift", _read_only(d))

    @property
    def noise_scale(self) -> float:
        return math.sqrt(2.0 * self.gamma)

    def scaled(self) -> np.ndarray:
        return self.gamma * self.drift


@dataclass(frozen=True)
class ReducedLinearSystem:
    """2x2 real drift (in units including gamma) of a quadrature pair (Z(0), Z(pi/2))."""

    m: np.ndarray
    label: str
    gamma: float = 1.0
    c_in: np.ndarray = field(default_factory=lambda: C_IN.copy())

    def __post_init__(self):
        m = np.asarray(self.m)
        if m.shape != (2, 2):
            raise ValueError(f"reduced drift must be 2x2, got {m.shape}")
        if np.iscomplexobj(m):
            if np.max(np.abs(m.imag)) > 1e-12 * max(1.0, float(np.max(np.abs(m)))):
                raise ValueError("reduced drift must be real")
            m = m.real
        if not np.all(np.isfinite(m)):
            raise ValueError("reduced drift must be finite")
        c_in = np.asarray(self.c_in, dtype=complex)
        if not np.array_equal(c_in, C_IN):
            raise ValueError("input correlation matrix must be [[1, i], [-i, 1]]")
        object.__setattr__(self, "m", _read_only(m.astype(float)))
        object.__setattr__(self, "c_in", _read_only(c_in))

    @property
    def m_dimensionless(self) -> np.ndarray:
        return self.m / self.gamma


# ============================================================================
# SPECTRA
# ============================================================================

class SpectrumPoint(BaseModel):
    omega: float = Field(description="Frequency in units of gamma")
    s: float = Field(description="Noise power, shot noise = 1")

    @field_validator("s")
    @classmethod
    def _floor(cls, v: float) -> float:
        if v < -1e-12:
            raise ValueError(f"negative noise power {v:.3e}")
        return v


class AnalyticNumberSpectrum(BaseModel):
    """Lorentzian dip of the conserved photon-number difference."""

    model_config = ConfigDict(frozen=True)

    gamma: float = Field(1.0, gt=0)
    n_plus_mean: float = Field(ge=0)

    def __call__(self, omega: float) -> float:
        from src.physics.spectra import analytic_number_spectrum

        return analytic_number_spectrum(omega, self.gamma, self.n_plus_mean)


class LorentzianFit(BaseModel):
    a: float
    b: float
    c: float
    goodness: float

    def evaluate(self, omega: np.ndarray) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        return self.a - self.b / (omega**2 + self.c)


class BestSqueezing(BaseModel):
    psi_opt: float
    s_min: float


class EmbedCheck(BaseModel):
    out_coupling: float
    m_deviation: float

