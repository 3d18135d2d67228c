"""
Spectrum Workflows

SpectrumWorkflow pipeline:
1. Polished hexagon at the configured drive
2. Reduced quadrature system of the chosen mode combination
3. Spectra at the requested angles (offsets from the mean-field phase) and
   at the optimal angle
4. Zero-frequency angle scan
5. Optional dump of the full drift matrix

BestSqueezeWorkflow repeats steps 1-2 over the drive range and records the
optimal angle and the minimum noise at zero frequency.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional

import numpy as np
import structlog
from pydantic import BaseModel

from src.config.config import config
from src.config.run_config import RunConfig
from src.models.domain import HexSteadyState, LorentzianFit, ReducedLinearSystem
from src.models.errors import ConvergenceError, NoHexagonError
from src.physics.fluctuations import (
    build_full,
    build_reduced_Q,
    build_reduced_W,
    build_reduced_X,
    embed_check,
)
from src.physics.spectra import (
    best_squeezing,
    frequency_grid,
    lorentzian_fit,
    quadrature_spectrum,
    spectrum,
)
from src.workflows.artifacts import dump_matrix, write_csv
from src.workflows.operating_point import polished_hexagon

log = structlog.get_logger(__name__)

SPECTRUM_COLUMNS = [
    ("angle_label", "phi+offset|opt"),
    ("psi", "rad"),
    ("omega_over_gamma", "1"),
    ("s", "shot noise"),
]
SCAN_COLUMNS = [("psi", "rad"), ("psi_minus_phi", "rad"), ("s", "shot noise")]
BEST_COLUMNS = [
    ("e_in_sq", "|E_in|^2"),
    ("observable_label", "W|Q<i>|X<i>"),
    ("psi_opt", "rad"),
    ("s_min", "shot noise"),
]


def reduced_system(hexagon: HexSteadyState, observable: str, gamma: float = 1.0) -> ReducedLinearSystem:
    """Reduced system for 'W', 'Q<i>' or 'X<i>'."""
    if observable == "W":
        return build_reduced_W(hexagon, gamma)
    kind, i = observable[0], int(observable[1:])
    if kind == "Q":
        return build_reduced_Q(hexagon, i, gamma)
    if kind == "X":
        return build_reduced_X(hexagon, i, gamma)
    raise ValueError(f"Unknown observable: {observable}. Available: W, Q1..Q6, X1..X6")


def _angle_label(offset: float) -> str:
    return f"phi{offset:+g}"


class SpectrumSummary(BaseModel):
    observable: str
    drive: float
    phi: float
    psi_opt: float
    s_min: float
    fit: Optional[LorentzianFit]
    out_coupling: float
    artifacts: List[str]


class SpectrumWorkflow:
    """Noise spectra of one mode combination at one drive."""

    def __init__(self, cfg: RunConfig, out_dir: Path):
        self.cfg = cfg
        self.out_dir = Path(out_dir)

    def run(self) -> SpectrumSummary:
        cfg = self.cfg
        label = cfg.observable
        log.info("Spectrum starting", observable=label, drive=cfg.drive)

        # ===== PHASE 1: STEADY STATE =====
        log.info("Phase 1: polishing hexagon")
        polished = polished_hexagon(cfg, cfg.drive)
        hexagon = polished.hexagon

        # ===== PHASE 2: REDUCED SYSTEM =====
        log.info("Phase 2: building reduced system", beta_mag=hexagon.beta_mag, phi=hexagon.phi)
        system = reduced_system(hexagon, label, cfg.gamma)
        full = build_full(hexagon, polished.params.delta, cfg.gamma)
        check = embed_check(full, system)

        # ===== PHASE 3: SPECTRA =====
        log.info("Phase 3: spectra", angles=len(cfg.angles))
        omegas = frequency_grid() if cfg.omegas is None else np.asarray(cfg.omegas, dtype=float)
        best = best_squeezing(system)
        curves = [(_angle_label(off), wrap_psi(hexagon.phi + off)) for off in cfg.angles]
        if cfg.include_optimal:
            curves.append(("opt", best.psi_opt))

        rows = []
        fit = None
        for name, psi in curves:
            points = spectrum(system, psi, omegas)
            rows += [(name, psi, p.omega, p.s) for p in points]
            if name == "opt" and len(points) >= 4 and all(math.isfinite(p.s) for p in points):
                fit = lorentzian_fit(points)
        tag = f"{label}_{cfg.drive:g}"
        artifacts = [str(write_csv(self.out_dir / f"spectrum_{tag}.csv", SPECTRUM_COLUMNS, rows))]

        # ===== PHASE 4: ANGLE SCAN =====
        log.info("Phase 4: zero-frequency angle scan", step_deg=cfg.scan_step_deg)
        scan = []
        for psi in np.deg2rad(np.arange(0.0, 180.0, cfg.scan_step_deg)):
            psi = float(psi)
            delta_psi = math.remainder(psi - hexagon.phi, math.pi)
            scan.append((psi, delta_psi, quadrature_spectrum(system, psi, 0.0)))
        artifacts.append(str(write_csv(self.out_dir / f"angle_scan_{tag}.csv", SCAN_COLUMNS, scan)))

        # ===== PHASE 5: DRIFT DUMP =====
        if cfg.dump_drift:
            artifacts.append(str(dump_matrix(full, self.out_dir / f"drift_{cfg.drive:g}.csv")))

        log.info("Spectrum complete", psi_opt=best.psi_opt, s_min=best.s_min,
                 fit_goodness=fit.goodness if fit else None, out_coupling=check.out_coupling)
        return SpectrumSummary(
            observable=label,
            drive=cfg.drive,
            phi=hexagon.phi,
            psi_opt=best.psi_opt,
            s_min=best.s_min,
            fit=fit,
            out_coupling=check.out_coupling,
            artifacts=artifacts,
        )


def wrap_psi(psi: float) -> float:
    """Quadrature angle folded into [0, pi); psi and psi + pi give the same noise."""
    folded = psi % math.pi
    return 0.0 if math.isclose(folded, math.pi) else folded


class BestSqueezeSummary(BaseModel):
    observable: str
    drives: int
    solved: int
    artifacts: List[str]


class BestSqueezeWorkflow:
    """Optimal zero-frequency squeezing across the drive range."""

    def __init__(self, cfg: RunConfig, out_dir: Path):
        self.cfg = cfg
        self.out_dir = Path(out_dir)

    def _best_at(self, drive: float) -> Optional[tuple]:
        cfg = self.cfg
        try:
            polished = polished_hexagon(cfg, drive)
        except (NoHexagonError, ConvergenceError) as exc:
            log.info("no hexagon at drive", drive=drive, reason=exc.code)
            return None
        best = best_squeezing(reduced_system(polished.hexagon, cfg.observable, cfg.gamma))
        return (drive, cfg.observable, best.psi_opt, best.s_min)

    def run(self) -> BestSqueezeSummary:
        cfg = self.cfg
        drives = cfg.drive_values()
        log.info("Best squeezing starting", observable=cfg.observable, drives=len(drives))

        # ===== PHASE 1: PER-DRIVE OPTIMA =====
        workers = cfg.threads or config.HEXKERR_THREADS
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(self._best_at, drives))
        rows = [r for r in results if r is not None]

        # ===== PHASE 2: CSV =====
        path = write_csv(self.out_dir / f"best_squeeze_{cfg.observable}.csv", BEST_COLUMNS, rows)
        log.info("Best squeezing complete", solved=len(rows), drives=len(drives))
        return BestSqueezeSummary(observable=cfg.observable, drives=len(drives),
                                  solved=len(rows), artifacts=[str(path)])
