"""
Homogeneous steady state, instability threshold and hexagonal geometry.
"""

from __future__ import annotations

import math
from typing import List, Tuple

import numpy as np
import structlog

from src.models.domain import HEX_DETUNING, ModeState, ModelParams
from src.models.errors import PhysicsDomainError

log = structlog.get_logger(__name__)

# double roots at the fold converge only linearly
MAX_POLISH_STEPS = 60


def oplus(i: int, j: int) -> int:
    """Cyclic sum of hexagonal mode labels, staying in 1..6."""
    if not (1 <= i <= 6 and 1 <= j <= 6):
        raise ValueError(f"hexagonal indices must lie in 1..6, got {i}, {j}")
    return ((i + j - 1) % 6) + 1


def _cubic(x: float, delta: float, e_sq: float) -> Tuple[float, float]:
    f = x * (1.0 + (delta - x) ** 2) - e_sq
    df = 1.0 + (delta - x) ** 2 - 2.0 * x * (delta - x)
    return f, df


def homogeneous_steady_states(params: ModelParams) -> List[float]:
    """
    All real nonnegative intracavity intensities X with |E_in|^2 = X[1 + (delta - X)^2].

    Roots come from the companion matrix and are polished by Newton steps;
    a root whose residual stays at or above the tolerance is dropped. The
    survivors are deduplicated and sorted ascending.
    """
    delta = params.delta
    e_sq = params.drive_intensity
    if e_sq == 0.0:
        return [0.0]

    coeffs = [1.0, -2.0 * delta, 1.0 + delta**2, -e_sq]
    tol = 1e-12 * max(1.0, e_sq)
    roots: List[float] = []
    for r in np.roots(coeffs):
        if abs(r.imag) > 1e-6 * max(1.0, abs(r)):
            continue
        x = float(r.real)
        for _ in range(MAX_POLISH_STEPS):
            f, df = _cubic(x, delta, e_sq)
            if abs(f) < tol or df == 0.0:
                break
            x -= f / df
        if x < 0.0:
            continue
        if abs(_cubic(x, delta, e_sq)[0]) >= tol:
            log.debug("dropping unpolished root", root=x, delta=delta, e_sq=e_sq)
            continue
        if all(abs(x - y) > 1e-9 * max(1.0, x) for y in roots):
            roots.append(x)

    roots.sort()
    return roots


def homogeneous_field(params: ModelParams, intensity: float) -> complex:
    """Intracavity amplitude E_0s on the homogeneous branch of intensity X."""
    return params.e_in / complex(1.0, params.delta - intensity)


def homogeneous_state(params: ModelParams, root: str = "lowest") -> ModeState:
    roots = homogeneous_steady_states(params)
    x = roots[0] if root == "lowest" else roots[-1]
    return ModeState.homogeneous(homogeneous_field(params, x))


def critical_point(delta: float) -> Tuple[float, float]:
    """Threshold intensity |E_0s|^2 and the critical product l_D^2 k_c^2."""
    if delta >= HEX_DETUNING:
        raise PhysicsDomainError(
            f"no transverse critical wavenumber for delta={delta} (k_c^2 <= 0)"
        )
    return 1.0, HEX_DETUNING - delta


def wave_vectors(kc: float = 1.0) -> np.ndarray:
    """
    The six hexagonal wave vectors k_1..k_6 (rows), 60 degrees apart.

    Ordered so that k_{j+1} + k_{j+5} = k_j and k_1 + k_3 + k_5 = 0.
    """
    j = np.arange(6)
    theta = math.pi / 2 - j * math.pi / 3
    return kc * np.column_stack([np.cos(theta), np.sin(theta)])
