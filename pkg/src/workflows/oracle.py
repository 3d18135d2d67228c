"""
Conservation Oracle Workflow

Builds the truncated Fock basis at the configured cutoffs, runs the
commutator checks and writes the report.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import List

import structlog
from pydantic import BaseModel

from src.config.config import config
from src.config.run_config import RunConfig
from src.models.fock import FockBasis
from src.physics.fock_oracle import conservation_report
from src.workflows.artifacts import write_csv

log = structlog.get_logger(__name__)

REPORT_COLUMNS = [
    ("observable", "name"),
    ("operator", "name"),
    ("norm", "max |entry|"),
    ("expected", "zero|nonzero"),
    ("passed", "0|1"),
]


class OracleSummary(BaseModel):
    basis_size: int
    rows: int
    failed: int
    artifacts: List[str]

    @property
    def all_passed(self) -> bool:
        return self.failed == 0


class OracleWorkflow:
    def __init__(self, cfg: RunConfig, out_dir: Path):
        self.cfg = cfg
        self.out_dir = Path(out_dir)

    def run(self) -> OracleSummary:
        cfg = self.cfg
        basis = FockBasis(cfg.fock_cutoffs, cfg.fock_total_cutoff, max_size=config.HEXKERR_MAX_BASIS)
        delta = cfg.drive if cfg.delta is None else cfg.delta
        log.info("Oracle starting", cutoffs=basis.cutoffs, basis_size=basis.size, g=cfg.g)

        rows = conservation_report(cfg.g, cfg.gamma, delta, math.sqrt(cfg.drive), basis, tol=cfg.oracle_tol)
        path = write_csv(
            self.out_dir / "oracle.csv",
            REPORT_COLUMNS,
            [(r.observable, r.operator, r.norm, r.expected, r.passed) for r in rows],
        )
        failed = sum(not r.passed for r in rows)
        log.info("Oracle complete", rows=len(rows), failed=failed)
        return OracleSummary(basis_size=basis.size, rows=len(rows), failed=failed, artifacts=[str(path)])
