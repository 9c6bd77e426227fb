"""Command-line interface: ``ks-lab <subcommand> [--config FILE] [--out DIR]``.

Exit status is 0 when every check of every invoked experiment passes, 1
when a check fails or a run errors, and 2 for invalid configuration.
"""

from __future__ import annotations

import argparse
import asyncio
import logging
import sys
from collections.abc import Sequence

from .errors import ConfigValidationError
from .lab import StabilityLab, load_configs
from .models.config import ExperimentConfig, ExperimentKind
from .models.presets import DEFAULT_PRESETS, EXPERIMENT_PRESETS, get_preset
from .models.report import ExperimentReport

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2

SUBCOMMAND_KINDS: dict[str, set[ExperimentKind]] = {
    "dispersion": {ExperimentKind.DISPERSION, ExperimentKind.OPERATOR_SUITE},
    "evolve": {
        ExperimentKind.EVOLVE,
        ExperimentKind.STABILITY,
        ExperimentKind.POSITIVITY,
        ExperimentKind.CONSISTENCY,
        ExperimentKind.CONVERGENCE,
    },
    "picard": {ExperimentKind.PICARD},
    "decay": {ExperimentKind.DECAY},
    "growth": {ExperimentKind.GROWTH},
    "delta-sweep": {ExperimentKind.DELTA_SWEEP},
    "norms-suite": {ExperimentKind.NORMS_SUITE},
    "verify": set(ExperimentKind),
}

DESCRIPTIONS = {
    "dispersion": "Spectral abscissa and operator checks of the linearization",
    "evolve": "Nonlinear ETD evolution (also stability, positivity, consistency, convergence)",
    "picard": "Picard iteration of the mild formulation",
    "decay": "Decay exponent of the linearized semigroup below the threshold",
    "growth": "Exponential growth rate above the threshold",
    "delta-sweep": "Time to a fixed amplitude over a range of initial sizes",
    "norms-suite": "Uniformly local norm inequalities",
    "verify": "Run every acceptance preset",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ks-lab", description="Pseudo-spectral stability lab for Keller-Segel."
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, description in DESCRIPTIONS.items():
        sub = subparsers.add_parser(name, help=description, description=description)
        sub.add_argument("--config", help="YAML experiment file (default: the built-in presets)")
        sub.add_argument("--out", default="runs", help="Output directory (default: runs)")
        sub.add_argument("--seed", type=int, help="Override the seed of every experiment")
        sub.add_argument(
            "-q", "--quiet", action="store_true", help="Only print warnings and the summary"
        )
        sub.add_argument("--workers", type=int, default=None, help="Worker processes for suites")
        if name == "verify":
            sub.add_argument(
                "--preset", action="append", choices=sorted(EXPERIMENT_PRESETS),
                help="Run only this preset (repeatable)",
            )
    return parser


def _select_configs(args: argparse.Namespace) -> list[ExperimentConfig]:
    if args.config:
        configs = load_configs(args.config)
    elif args.command == "verify":
        configs = [get_preset(name) for name in (args.preset or EXPERIMENT_PRESETS)]
    else:
        configs = [get_preset(name) for name in DEFAULT_PRESETS[args.command]]

    allowed = SUBCOMMAND_KINDS[args.command]
    wrong = [c for c in configs if c.kind not in allowed]
    if wrong:
        raise ConfigValidationError(
            [f"{c.name}: kind '{c.kind.value}' does not belong to '{args.command}'" for c in wrong]
        )
    if args.seed is not None:
        configs = [c.model_copy(update={"seed": args.seed}) for c in configs]
    return configs


def _summary(report: ExperimentReport) -> str:
    verdict = "PASS" if report.passed else "FAIL"
    failed = ", ".join(check.name for check in report.failed_checks)
    extra = f" failed: {failed}" if failed else ""
    if report.errors:
        extra += f" error: {report.errors[0]}"
    timing = f"{len(report.checks)} checks, {report.wall_clock_seconds:.1f}s"
    return f"{verdict} {report.name} ({timing}){extra}"


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    lab = StabilityLab(args.out)
    try:
        configs = _select_configs(args)
        if len(configs) == 1:
            reports = [lab.run(configs[0])]
        else:
            reports = asyncio.run(lab.run_suite(configs, max_workers=args.workers))
    except ConfigValidationError as e:
        for message in e.errors:
            print(f"config error: {message}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    for report in reports:
        print(_summary(report))
    return EXIT_OK if all(report.passed for report in reports) else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
