"""
Steady-State Workflow

Pipeline:
1. Converge and polish a hexagon at the top of the drive range
2. Continue the Newton root downward until the branch ends (the fold)
3. Branch CSV in ascending drive order
4. Optional trajectory CSV of a relaxation at the configured drive
"""

from __future__ import annotations

from pathlib import Path
from typing import List, Optional

import structlog
from pydantic import BaseModel

from src.config.run_config import RunConfig
from src.models.domain import ModeState, SolverReport
from src.physics.classical_dynamics import integrate, seed_pattern
from src.physics.model_core import homogeneous_state
from src.physics.steady_state import continue_branch, to_amplitudes
from src.workflows.artifacts import write_csv
from src.workflows.operating_point import homogeneous_intensity, operating_point, polished_hexagon

log = structlog.get_logger(__name__)

BRANCH_COLUMNS = [
    ("e0s_sq", "|E_0s|^2"),
    ("u0", "1"),
    ("v0", "1"),
    ("u1", "1"),
    ("v1", "1"),
    ("beta_mag", "saturation-scaled amplitude"),
    ("beta0_mag", "saturation-scaled amplitude"),
    ("residual", "1"),
]


class SteadySummary(BaseModel):
    solved: int
    lowest_e0s_sq: Optional[float]
    artifacts: List[str]


class SteadyWorkflow:
    """Hexagon branch by Newton continuation, with an optional relaxation trace."""

    def __init__(self, cfg: RunConfig, out_dir: Path):
        self.cfg = cfg
        self.out_dir = Path(out_dir)

    def run(self) -> SteadySummary:
        cfg = self.cfg
        drives = sorted(cfg.drive_values(), reverse=True)
        log.info("Steady branch starting", drives=len(drives), top=drives[0])

        # ===== PHASE 1: SEED AT THE TOP OF THE RANGE =====
        log.info("Phase 1: polishing hexagon", drive=drives[0])
        top = polished_hexagon(cfg, drives[0])

        # ===== PHASE 2: CONTINUATION =====
        log.info("Phase 2: continuing the branch downward")
        e0s_values = [homogeneous_intensity(operating_point(cfg, d))[1] for d in drives]
        reports = continue_branch(e0s_values, cfg.delta, initial=top.report.vars, tol=cfg.newton_tol)

        # ===== PHASE 3: BRANCH CSV =====
        rows = [self._row(r) for r in reversed(reports)]
        artifacts = [str(write_csv(self.out_dir / "steady_branch.csv", BRANCH_COLUMNS, rows))]

        # ===== PHASE 4: TRAJECTORY =====
        if cfg.trajectory_time > 0:
            log.info("Phase 4: relaxation trajectory", drive=cfg.drive, duration=cfg.trajectory_time)
            artifacts.append(str(self._trajectory()))

        lowest = reports[-1].e0s_sq if reports else None
        log.info("Steady branch complete", solved=len(reports), lowest_e0s_sq=lowest)
        return SteadySummary(solved=len(reports), lowest_e0s_sq=lowest, artifacts=artifacts)

    @staticmethod
    def _row(report: SolverReport) -> tuple:
        v = report.vars
        # E_0s real in the solver frame; magnitudes do not depend on its phase
        beta0, beta = to_amplitudes(v, report.e0s_sq ** 0.5)
        return (report.e0s_sq, v.u0, v.v0, v.u1, v.v1, abs(beta), abs(beta0), report.residual_norm)

    def _trajectory(self) -> Path:
        cfg = self.cfg
        params = operating_point(cfg, cfg.drive)
        start = ModeState.homogeneous(homogeneous_state(params).a0, seed_pattern(cfg.seed, 0.2))
        result = integrate(start, params, step=cfg.step, duration=cfg.trajectory_time,
                           record_every=cfg.trajectory_every)

        columns = [("t", "1/gamma")]
        for j in range(7):
            columns += [(f"re_a{j}", "saturation-scaled amplitude"), (f"im_a{j}", "saturation-scaled amplitude")]
        rows = []
        for t, frame in zip(result.times, result.trajectory):
            row = [float(t)]
            for z in frame:
                row += [float(z.real), float(z.imag)]
            rows.append(row)
        return write_csv(self.out_dir / "trajectory.csv", columns, rows)
