"""
hexkerr - command-line experiments on the hexagonal Kerr cavity

Commands:
  hysteresis    forward/backward drive sweeps and the bistable window
  steady        Newton branch of the hexagon over the drive range
  spectrum      noise spectra of one mode combination at one drive
  best-squeeze  optimal zero-frequency squeezing across the drive range
  oracle        exact Fock-space conservation checks

Example:
  python hexkerr.py spectrum --observable X1 --drive 1.2 --angle 0 --angle 0.05
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Dict, List, Optional

import structlog

from src.config.config import config
from src.config.logging_setup import configure_logging
from src.config.run_config import RunConfig, get_all_presets, load_run_config
from src.models.errors import ConfigError, HexKerrError
from src.workflows.hysteresis import HysteresisWorkflow
from src.workflows.oracle import OracleWorkflow
from src.workflows.spectrum import BestSqueezeWorkflow, SpectrumWorkflow
from src.workflows.steady import SteadyWorkflow

log = structlog.get_logger("hexkerr")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_ERROR = 2

WORKFLOWS = {
    "hysteresis": HysteresisWorkflow,
    "steady": SteadyWorkflow,
    "spectrum": SpectrumWorkflow,
    "best-squeeze": BestSqueezeWorkflow,
    "oracle": OracleWorkflow,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hexkerr", description="Hexagonal Kerr cavity experiments")
    ap.add_argument("command", choices=list(WORKFLOWS))
    ap.add_argument("--config", help="flat 'key = value' run configuration")
    ap.add_argument("--preset", default="desk", choices=get_all_presets())
    ap.add_argument("--out-dir", help="artifact directory (default: HEXKERR_OUT_DIR)")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--delta", type=float, help="fixed detuning (default: follow the drive)")
    ap.add_argument("--drive", type=float, help="|E_in|^2 for single-drive commands")
    ap.add_argument("--observable", help="W, Q<i> or X<i>")
    ap.add_argument("--angle", type=float, action="append",
                    help="quadrature angle offset from the mean-field phase; repeatable")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="override any configuration key; repeatable")
    ap.add_argument("--log-level", default=None)
    return ap


def collect_overrides(args: argparse.Namespace) -> Dict[str, object]:
    overrides: Dict[str, object] = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got '{item}'")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    for key in ("seed", "delta", "drive", "observable", "out_dir"):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    if args.angle:
        overrides["angles"] = list(args.angle)
    return overrides


def print_banner(command: str, cfg: RunConfig, out_dir: Path) -> None:
    print("=" * 70)
    print(f"🔬 hexkerr {command}")
    print("=" * 70)
    print("\n🔧 Configuration:")
    print(f"   Drive: {cfg.drive}   Range: {cfg.drive_range}")
    print(f"   Detuning: {'follows drive' if cfg.delta is None else cfg.delta}")
    print(f"   Seed: {cfg.seed}   Observable: {cfg.observable}")
    print(f"   Output: {out_dir}")
    print(f"   Environment: {config.ENVIRONMENT}")


def _one_line(text: str) -> str:
    return " ".join(text.split())


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level or config.LOG_LEVEL, json=config.is_production())
    log.debug("settings", **config.as_dict())

    try:
        problems = config.validate_required()
        if problems:
            raise ConfigError("; ".join(problems))

        cfg = load_run_config(args.config, collect_overrides(args), preset=args.preset)
        out_dir = Path(cfg.out_dir or config.HEXKERR_OUT_DIR)
        print_banner(args.command, cfg, out_dir)

        summary = WORKFLOWS[args.command](cfg, out_dir).run()
        log.info("command finished", command=args.command, artifacts=len(summary.artifacts))
    except HexKerrError as exc:
        print(f"error code={exc.code} message={_one_line(exc.message)}", file=sys.stderr)
        return EXIT_ERROR
    except ValueError as exc:
        print(f"error code=invalid_value message={_one_line(str(exc))}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error code=io message={_one_line(str(exc))}", file=sys.stderr)
        return EXIT_ERROR

    print("\n📄 Artifacts:")
    for path in summary.artifacts:
        print(f"   {path}")

    if args.command == "oracle" and not summary.all_passed:
        print(f"\n❌ {summary.failed} conservation check(s) failed")
        return EXIT_CHECK_FAILED

    print("\n✅ Done")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
