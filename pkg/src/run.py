#!/usr/bin/env python3
"""
Main entry point for the effective-capacity toolkit

Usage:
    python src/run.py constant --pmf "1:0.5,2:0.5" --reward 1 --theta 1
    python src/run.py harq --scheme cc --mode outage --theta-grid "1e-4,10,50,log"
    python src/run.py finite --table "1,S,0.6,1;2,S,0.4,2" --theta 1 --t-max 12
    python src/run.py mc --scheme cc --samples 1000000 --seed 7
    python src/run.py optimize --scheme vr --k 2 --snr-db 15
"""

import sys
import argparse
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.capacity.errors import CapacityError
from src.orchestrator.orchestrator import COMMANDS, CapacityOrchestrator, exit_code
from src.orchestrator.run_config import CHECKS, FORMATS, MODES, THETA_UNITS, RunConfig
from src.utils import load_config, setup_logger


def _common(parser: argparse.ArgumentParser):
    parser.add_argument('--config', type=str, default=None,
                        help='Path to config file (default: config/config.yaml)')
    parser.add_argument('--run-config', type=str, default=None,
                        help='JSON run description; flags given here override it')
    parser.add_argument('--output', type=str, default=None, help='Write rows here instead of stdout')
    parser.add_argument('--format', choices=FORMATS, default=None, help='Row format (default: csv)')
    parser.add_argument('--seed', type=int, default=None, help='Monte Carlo seed')
    parser.add_argument('--samples', type=int, default=None, help='Monte Carlo episodes')
    parser.add_argument('--workers', type=int, default=None, help='Worker threads')
    parser.add_argument('--strict', action='store_true', help='Exit 4 on high-variance estimates')
    parser.add_argument('--verbose', action='store_true', help='Enable verbose logging')


def _theta(parser: argparse.ArgumentParser):
    group = parser.add_mutually_exclusive_group()
    group.add_argument('--theta', type=float, default=None, help='QoS exponent')
    group.add_argument('--theta-grid', type=str, default=None, help='min,max,points[,log]')


def _harq(parser: argparse.ArgumentParser):
    parser.add_argument('--scheme', type=str, default=None, help='typei, cc, ir, vr or xp')
    parser.add_argument('--max-rounds', '--k', dest='max_rounds', type=int, default=None,
                        help='Maximum transmission rounds')
    parser.add_argument('--rates', type=str, default=None, help='Comma separated rates (bits/symbol)')
    parser.add_argument('--snr-db', type=float, default=None, help='Average transmit SNR in dB')
    parser.add_argument('--m', type=float, default=None, help='Nakagami m for every round')
    parser.add_argument('--omega', type=float, default=None, help='Nakagami spread for every round')
    parser.add_argument('--packet-bits', type=int, default=None, help='Packet size b in bits')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Effective capacity of renewal reward processes and HARQ schemes",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python src/run.py constant --pmf "1:1" --reward 3 --theta 0.5
  python src/run.py harq --mode max-arrival --theta 1e4
  python src/run.py finite --table "1,S,0.6,1;2,S,0.4,2" --theta 1 --check all
  python src/run.py optimize --scheme xp --k 2 --snr-db 20
        """
    )
    commands = parser.add_subparsers(dest='command', required=True)

    constant = commands.add_parser('constant', help='Constant-reward renewal capacity')
    _common(constant)
    _theta(constant)
    _harq(constant)
    constant.add_argument('--pmf', type=str, default=None, help='k:prob[,k:prob...]')
    constant.add_argument('--reward', type=float, default=None, help='Reward per renewal')

    harq = commands.add_parser('harq', help='HARQ capacity over theta and SNR')
    _common(harq)
    _theta(harq)
    _harq(harq)
    harq.add_argument('--mode', choices=MODES, default=None, help='Reward credited on failure or not')
    harq.add_argument('--theta-units', choices=THETA_UNITS, default=None,
                      help='normalized (L*theta or b*theta) or raw per-bit theta')
    harq.add_argument('--snr-grid', type=str, default=None, help='min,max,points in dB')

    finite = commands.add_parser('finite', help='Finite-time mgf with cross-checks')
    _common(finite)
    finite.add_argument('--table', type=str, default=None, help='k,state,prob,reward[;...]')
    finite.add_argument('--theta', type=float, default=None, help='QoS exponent')
    finite.add_argument('--t-max', type=int, default=None, help='Last time index')
    finite.add_argument('--check', choices=CHECKS, default=None, help='Routes to compare against')

    mc = commands.add_parser('mc', help='Monte Carlo estimates against exact values')
    _common(mc)
    _harq(mc)
    mc.add_argument('--table', type=str, default=None, help='Simulate renewal paths of this table')
    mc.add_argument('--theta', type=float, default=None, help='QoS exponent for path simulation')
    mc.add_argument('--t', type=int, default=None, help='Horizon for path simulation')

    optimize = commands.add_parser('optimize', help='Exhaustive rate search')
    _common(optimize)
    _harq(optimize)
    optimize.add_argument('--theta', type=float, default=None, help='Packet-normalized b*theta')
    optimize.add_argument('--refine-factor', type=int, default=None, help='Episode multiplier for refinement')
    optimize.add_argument('--grid-initial', type=str, default=None, help='Comma separated first-round rates')
    optimize.add_argument('--grid-subsequent', type=str, default=None, help='Comma separated later-round rates')

    return parser


def overrides_from_args(args: argparse.Namespace) -> dict:
    """Flag values keyed like RunConfig; unset flags are None"""
    keys = RunConfig.allowed_keys()
    overrides = {key: getattr(args, key) for key in keys if hasattr(args, key)}

    if getattr(args, 'm', None) is not None or getattr(args, 'omega', None) is not None:
        overrides['fading'] = [{
            "m": args.m if args.m is not None else 1.0,
            "omega": args.omega if args.omega is not None else 1.0,
        }]

    initial = getattr(args, 'grid_initial', None)
    subsequent = getattr(args, 'grid_subsequent', None)
    if initial is not None or subsequent is not None:
        grid = {}
        if initial is not None:
            grid['initial'] = initial
        if subsequent is not None:
            grid['subsequent'] = subsequent
        overrides['grid'] = grid

    return overrides


def main(argv=None) -> int:
    """Main execution function"""
    args = build_parser().parse_args(argv)

    # Load configuration
    try:
        config = load_config(args.config)

        if args.verbose:
            config.setdefault('logging', {})['level'] = 'DEBUG'

        logger = setup_logger("Main", config)
        logger.debug(f"Command: {args.command}")

    except Exception as e:
        print(f"Error loading configuration: {e}", file=sys.stderr)
        return 2

    try:
        run_config = RunConfig.from_file(args.run_config, overrides_from_args(args))
        orchestrator = CapacityOrchestrator(config)
        report = orchestrator.run(args.command, run_config)
        code = exit_code(report, strict=args.strict)
        if code:
            logger.error(f"{args.command} finished with exit code {code}")
        return code

    except KeyboardInterrupt:
        logger.info("Run interrupted by user")
        return 1
    except CapacityError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except Exception as e:
        logger.error(f"Run failed: {e}", exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
