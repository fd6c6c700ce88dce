"""
CLI Interface for tomochaos experiments
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from colorama import Fore, Style, init
from dotenv import load_dotenv

from tomochaos import ConfigError, ExperimentKind, load_config, load_settings
from tomochaos.config import default_config
from tomochaos.runner import EXIT_CONFIG, EXIT_OK, describe_error, run_experiment


# Initialize colorama for Windows support
init()


def print_header(experiment: str):
    """Print application header"""
    print(f"\n{Fore.CYAN}{'=' * 70}")
    print(f"{Fore.CYAN}tomochaos: {experiment}")
    print(f"{Fore.CYAN}{'=' * 70}{Style.RESET_ALL}\n")


def print_error(message: str):
    """Print error message"""
    print(f"{Fore.RED}[X] {message}{Style.RESET_ALL}")


def print_success(message: str):
    """Print success message"""
    print(f"{Fore.GREEN}[OK] {message}{Style.RESET_ALL}")


def print_info(message: str):
    """Print info message"""
    print(f"{Fore.YELLOW}[i] {message}{Style.RESET_ALL}")


def print_checks(summary) -> None:
    """One line per check with a coloured verdict"""
    for name in sorted(summary.empirical):
        verdict = summary.passed.get(name)
        if verdict is None:
            tag = f"{Fore.YELLOW}[INFO]{Style.RESET_ALL}"
        elif verdict:
            tag = f"{Fore.GREEN}[PASS]{Style.RESET_ALL}"
        else:
            tag = f"{Fore.RED}[FAIL]{Style.RESET_ALL}"
        analytic = summary.analytic.get(name)
        reference = "" if analytic is None else f" (analytic {analytic:.4f}, tol {summary.tolerance.get(name)})"
        print(f"  {tag} {name}: {summary.empirical[name]:.6g}{reference}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Quantum state tomography of chaotic kicked-top dynamics",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py PhasePortrait --config configs/phase_portrait_7.0.json
  python main.py FidelitySweep --config configs/fidelity_sweep.json --workers 4
  python main.py AnalyticTable --seed 3 --out results/table
        """,
    )
    subparsers = parser.add_subparsers(dest="experiment", required=True, metavar="EXPERIMENT")
    for kind in ExperimentKind:
        sub = subparsers.add_parser(kind.value, help=f"Run the {kind.value} experiment")
        sub.add_argument("--config", help="JSON configuration file (default grid when omitted)")
        sub.add_argument("--seed", type=int, help="Master seed, overrides the config")
        sub.add_argument("--out", help="Output directory (default: OUTPUT_DIR or results)")
        sub.add_argument("--workers", type=int, help="Parallel workers (default: TOMOCHAOS_WORKERS or 1)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI application; returns the process exit code"""
    # Load environment variables from .env file next to this script
    env_path = Path(__file__).parent / ".env"
    load_dotenv(dotenv_path=env_path)

    args = build_parser().parse_args(argv)
    print_header(args.experiment)

    try:
        settings = load_settings(workers=args.workers, output_dir=args.out)
    except ConfigError as e:
        print_error(str(e))
        return EXIT_CONFIG
    logging.basicConfig(
        level=getattr(logging, settings.log_level, logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        if args.config:
            config = load_config(args.config)
            if config.experiment.value != args.experiment:
                raise ConfigError(
                    f"config is for {config.experiment.value}, subcommand is {args.experiment}",
                    field="experiment",
                )
        else:
            config = default_config(args.experiment)
            print_info("No --config given; using the default grid")
        summary = run_experiment(config, settings=settings, out=args.out, seed=args.seed)
    except Exception as e:
        details = describe_error(e, settings.debug_mode)
        print_error(details["message"])
        if details["technical_details"]:
            print(f"{Fore.RED}[DEBUG] {details['technical_details']}{Style.RESET_ALL}")
        return int(details["exit_code"])

    print_checks(summary)
    out_dir = args.out or config.output or settings.output_dir
    print()
    if summary.all_passed:
        print_success(f"All checks passed; results in {out_dir}")
    else:
        print_info(f"Some checks failed; results in {out_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
