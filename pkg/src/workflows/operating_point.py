"""
Operating points shared by the workflows: cavity parameters at a drive and
the Newton-polished, gauged hexagon there.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import structlog

from src.config.run_config import RunConfig
from src.models.domain import HexSteadyState, ModelParams, SolverReport
from src.models.errors import NoHexagonError
from src.physics.classical_dynamics import find_hexagon, gauge_translate
from src.physics.model_core import critical_point, homogeneous_state
from src.physics.steady_state import from_hexagon, newton_solve, to_amplitudes

log = structlog.get_logger(__name__)


def operating_point(cfg: RunConfig, drive: float) -> ModelParams:
    """
    Cavity parameters at |E_in|^2 = drive.

    With cfg.delta unset the detuning follows the drive (delta = |E_0s|^2);
    otherwise it is held fixed and must admit a critical wavenumber.
    """
    if cfg.delta is None:
        return ModelParams.on_resonance_line(drive, gamma=cfg.gamma)
    critical_point(cfg.delta)
    return ModelParams.at_criticality(delta=cfg.delta, e_in=math.sqrt(drive), gamma=cfg.gamma)


def homogeneous_intensity(params: ModelParams) -> tuple[complex, float]:
    """E_0s on the lowest homogeneous branch and its intensity."""
    e0s = homogeneous_state(params).a0
    return e0s, abs(e0s) ** 2


@dataclass(frozen=True)
class PolishedHexagon:
    params: ModelParams
    hexagon: HexSteadyState
    report: SolverReport


def polished_hexagon(cfg: RunConfig, drive: float) -> PolishedHexagon:
    """
    Hexagon at the drive: integrate to a converged pattern, move it to the
    zero-phase-difference gauge and refine it with Newton.

    Raises:
        NoHexagonError: the pattern decays or Newton lands on the homogeneous root
    """
    params = operating_point(cfg, drive)
    found = find_hexagon(
        params,
        seed=cfg.seed,
        step=cfg.sweep_step,
        tol=cfg.converge_tol,
        max_time=cfg.max_time,
        symmetry_tol=cfg.symmetry_tol,
    )
    gauged = gauge_translate(found)

    e0s, e0s_sq = homogeneous_intensity(params)
    report = newton_solve(
        from_hexagon(gauged, e0s), e0s_sq, params.delta,
        tol=cfg.newton_tol, max_iter=cfg.newton_max_iter,
    )
    if report.branch != "hexagon":
        raise NoHexagonError(f"Newton refinement fell onto the homogeneous root at |E_in|^2 = {drive:.6g}")

    beta0, beta = to_amplitudes(report.vars, e0s)
    hexagon = HexSteadyState(beta0=beta0, beta_mag=abs(beta), phi=cmath.phase(beta))
    log.debug("hexagon polished", drive=drive, beta_mag=hexagon.beta_mag,
              iterations=report.iterations, residual=report.residual_norm)
    return PolishedHexagon(params=params, hexagon=hexagon, report=report)
