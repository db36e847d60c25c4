"""
ChiPredict - figure1 command.
Runs the p = 14 risk grid and writes the table plus a run manifest.
"""

import logging

from chipredict.commands.output import build_manifest, write_manifest, write_table
from chipredict.services.experiment import figure1_experiment, run_experiment

logger = logging.getLogger(__name__)


def register(subparsers, parent):
    parser = subparsers.add_parser("figure1", parents=[parent], help="risk grid for the four (n1, n2) panels")
    parser.add_argument("--reps", type=int, default=None, help="replications per cell")
    parser.add_argument(
        "--paper-scale",
        dest="paper_scale",
        action="store_true",
        default=None,
        help="use FULL_REPS (100000) replications unless --reps is given",
    )
    parser.add_argument("--workers", type=int, default=None, help="worker processes")
    parser.add_argument("--out", default=None, help="output CSV (default figure1.csv)")
    parser.set_defaults(handler=run)


def run(args, config) -> int:
    if args.reps is not None:
        reps = args.reps
    elif args.paper_scale:
        reps = config.FULL_REPS
    else:
        reps = config.DEFAULT_REPS
    seed = args.seed if args.seed is not None else config.DEFAULT_SEED
    workers = args.workers if args.workers is not None else config.WORKERS
    out = args.out or "figure1.csv"

    exp = figure1_experiment(reps, seed, workers=workers, block_size=config.BLOCK_SIZE)
    logger.info(f"Running {len(exp.configs) * len(exp.priors) * len(exp.theta_grid)} cells at {reps} reps")
    table = run_experiment(exp, config.quad_settings(), config.VERDICT_TOLERANCE)
    write_table(table, out)

    flags = {"command": "figure1", "reps": reps, "seed": seed}
    manifest = build_manifest("figure1", flags, config.to_public_dict(), seed)
    write_manifest(manifest, f"{out}.manifest.json")
    return 0
