"""
Hysteresis Workflow

Pipeline:
1. Forward sweep from the homogeneous branch (seeded perturbation)
2. Backward sweep from a converged hexagon at the top of the range
3. Branch CSV with both directions
4. Summary: jump-up drive, drop-down drive, bistable window
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional

import structlog
from pydantic import BaseModel

from src.config.config import config
from src.config.run_config import RunConfig
from src.models.domain import SweepResult
from src.physics.classical_dynamics import sweep
from src.workflows.artifacts import write_csv
from src.workflows.operating_point import operating_point

log = structlog.get_logger(__name__)

BRANCH_COLUMNS = [
    ("e_in_sq", "|E_in|^2"),
    ("beta_mag", "saturation-scaled amplitude"),
    ("beta0_mag", "saturation-scaled amplitude"),
    ("direction", "forward|backward"),
]


class HysteresisSummary(BaseModel):
    jump_up: Optional[float]
    drop_down: Optional[float]
    width: Optional[float]
    artifacts: List[str]


class HysteresisWorkflow:
    """Forward and backward drive sweeps across the subcritical instability."""

    def __init__(self, cfg: RunConfig, out_dir: Path):
        self.cfg = cfg
        self.out_dir = Path(out_dir)

    def _sweep(self, direction: str) -> SweepResult:
        cfg = self.cfg
        low, _ = cfg.drive_range
        return sweep(
            operating_point(cfg, low),
            cfg.drive_range,
            direction=direction,
            ramp_rate=cfg.sweep_rate,
            step=cfg.sweep_step,
            record_step=cfg.record_step,
            seed=cfg.seed,
            seed_amplitude=cfg.seed_amplitude,
            track_delta=cfg.delta is None,
        )

    def run(self) -> HysteresisSummary:
        cfg = self.cfg
        log.info("Hysteresis starting", drive_range=cfg.drive_range, rate=cfg.sweep_rate)

        # ===== PHASE 1-2: SWEEPS =====
        log.info("Phase 1: forward and backward sweeps")
        workers = min(2, cfg.threads or config.HEXKERR_THREADS)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            forward, backward = pool.map(self._sweep, ("forward", "backward"))

        # ===== PHASE 3: BRANCH CSV =====
        log.info("Phase 3: writing branches")
        rows = [(p.e_in_sq, p.beta_mag, p.beta0_mag, "forward") for p in forward.points]
        rows += [(p.e_in_sq, p.beta_mag, p.beta0_mag, "backward") for p in backward.points]
        branches = write_csv(self.out_dir / "hysteresis.csv", BRANCH_COLUMNS, rows)

        # ===== PHASE 4: SUMMARY =====
        jump = forward.jump_drive(cfg.branch_level)
        drop = backward.drop_drive(cfg.branch_level)
        width = jump - drop if jump is not None and drop is not None else None
        summary_path = write_csv(
            self.out_dir / "hysteresis_summary.csv",
            [("jump_up", "|E_in|^2"), ("drop_down", "|E_in|^2"), ("width", "|E_in|^2")],
            [(_or_nan(jump), _or_nan(drop), _or_nan(width))],
        )
        log.info("Hysteresis complete", jump_up=jump, drop_down=drop, width=width)
        return HysteresisSummary(
            jump_up=jump, drop_down=drop, width=width,
            artifacts=[str(branches), str(summary_path)],
        )


def _or_nan(x: Optional[float]) -> float:
    return float("nan") if x is None else float(x)
