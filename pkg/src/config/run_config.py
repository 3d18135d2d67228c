"""
Run Configurations for hexkerr

Each run carries:
- Operating point (detuning, drive, drive range)
- Integrator and sweep settings
- Solver tolerances
- Spectrum settings (observable, quadrature angles, frequency grid)
- Fock oracle cutoffs
- Output location and perturbation seed

Runs start from a named preset, then a flat `key = value` file, then
command-line overrides.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.models.domain import N_MODES
from src.models.errors import ConfigError

OBSERVABLE_PATTERN = re.compile(r"^(W|[QX][1-6]?)$")


class RunConfig(BaseModel):
    """Configuration for one hexkerr command."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    # Operating point; delta None keeps delta equal to |E_in|^2
    delta: Optional[float] = None
    drive: float = Field(1.2, gt=0)
    drive_range: Tuple[float, float] = (0.8, 1.3)
    drive_points: int = Field(26, ge=1)
    gamma: float = Field(1.0, gt=0)

    # Integration and sweeps
    step: float = Field(1e-3, gt=0)
    sweep_step: float = Field(1e-2, gt=0)
    sweep_rate: float = Field(5e-6, gt=0)
    record_step: float = Field(1e-2, gt=0)
    seed: int = Field(0, ge=0)
    seed_amplitude: float = Field(1e-6, gt=0)
    branch_level: float = Field(1e-2, gt=0)
    trajectory_time: float = Field(0.0, ge=0)
    trajectory_every: int = Field(100, ge=1)

    # Steady states
    converge_tol: float = Field(1e-9, gt=0)
    max_time: float = Field(2e4, gt=0)
    symmetry_tol: float = Field(1e-6, gt=0)
    newton_tol: float = Field(1e-12, gt=0)
    newton_max_iter: int = Field(50, ge=1)

    # Spectra
    observable: str = "W"
    angles: List[float] = Field(default_factory=lambda: [0.0])
    include_optimal: bool = True
    omegas: Optional[List[float]] = None
    scan_step_deg: float = Field(1.0, gt=0, le=90)
    dump_drift: bool = False

    # Fock oracle
    fock_cutoffs: Tuple[int, ...] = (2, 1, 1, 1, 1, 1, 1)
    fock_total_cutoff: Optional[int] = Field(None, ge=0)
    g: float = Field(0.1, gt=0)
    oracle_tol: float = Field(1e-12, gt=0)

    # Output
    out_dir: Optional[str] = None
    threads: Optional[int] = Field(None, ge=1)

    @field_validator("drive_range")
    @classmethod
    def _ordered_range(cls, v: Tuple[float, float]) -> Tuple[float, float]:
        low, high = v
        if not 0 <= low < high:
            raise ValueError(f"drive_range must satisfy 0 <= low < high, got {v}")
        return v

    @field_validator("fock_cutoffs")
    @classmethod
    def _cutoffs(cls, v: Tuple[int, ...]) -> Tuple[int, ...]:
        if len(v) != N_MODES:
            raise ValueError(f"fock_cutoffs needs {N_MODES} entries, got {len(v)}")
        if any(c < 0 for c in v):
            raise ValueError("fock_cutoffs must be nonnegative")
        return v

    @field_validator("observable")
    @classmethod
    def _observable(cls, v: str) -> str:
        v = v.strip().upper()
        if not OBSERVABLE_PATTERN.match(v):
            raise ValueError(f"observable must be W, Q<i> or X<i> with i in 1..6, got '{v}'")
        return v if len(v) == 2 or v == "W" else f"{v}1"

    @field_validator("omegas")
    @classmethod
    def _omegas(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        if v is not None and (not v or any(w < 0 for w in v)):
            raise ValueError("omegas must be a nonempty list of nonnegative frequencies")
        return v

    @model_validator(mode="after")
    def _sweep_resolution(self) -> "RunConfig":
        if self.record_step > self.drive_range[1] - self.drive_range[0]:
            raise ValueError("record_step larger than the drive range")
        return self

    def drive_values(self) -> List[float]:
        """Evenly spaced drives over drive_range, endpoints included."""
        low, high = self.drive_range
        if self.drive_points == 1:
            return [low]
        h = (high - low) / (self.drive_points - 1)
        return [low + k * h for k in range(self.drive_points)]


# ============================================================================
# PRESETS
# ============================================================================

DESK_PRESET = RunConfig()

QUICK_PRESET = RunConfig(
    drive_range=(0.9, 1.3),
    drive_points=6,
    sweep_rate=2.5e-5,
    max_time=1e4,
)

PRESETS: Dict[str, RunConfig] = {
    "desk": DESK_PRESET,
    "quick": QUICK_PRESET,
}


def get_preset(name: str) -> RunConfig:
    """Get a named preset."""
    if name not in PRESETS:
        raise ValueError(f"Unknown preset: {name}. Available: {list(PRESETS.keys())}")
    return PRESETS[name]


def get_all_presets() -> List[str]:
    return list(PRESETS.keys())


# ============================================================================
# KEY = VALUE FILES
# ============================================================================

_SEQUENCE_FIELDS = {"drive_range", "fock_cutoffs", "angles", "omegas"}


def _coerce(key: str, raw: Any) -> Any:
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    if text.lower() == "none":
        return None
    if key in _SEQUENCE_FIELDS:
        return [part.strip() for part in text.split(",") if part.strip()]
    return text


def parse_key_values(text: str, source: str = "<string>") -> Dict[str, str]:
    """Parse `key = value` lines; `#` starts a comment."""
    entries: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got '{line}'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        if key in entries:
            raise ConfigError(f"{source}:{lineno}: duplicate key '{key}'")
        entries[key] = value
    return entries


def load_run_config(
    path: Optional[str | Path] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    preset: str = "desk",
) -> RunConfig:
    """
    Build a RunConfig from a preset, an optional file and overrides.

    Args:
        path: Flat `key = value` file, or None
        overrides: Values applied last (strings are parsed like file values)
        preset: Name of the starting preset

    Returns:
        Validated RunConfig

    Raises:
        ConfigError: unknown preset, unreadable file, unknown key or invalid value
    """
    try:
        base = get_preset(preset)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    values: Dict[str, Any] = base.model_dump()
    if path is not None:
        p = Path(path)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file {p}: {exc.strerror}") from None
        for key, raw in parse_key_values(text, str(p)).items():
            values[key] = _coerce(key, raw)

    for key, raw in (overrides or {}).items():
        values[key] = _coerce(key, raw)

    try:
        return RunConfig.model_validate(values)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(x) for x in first["loc"]) or "config"
        raise ConfigError(f"{where}: {first['msg']}") from None
