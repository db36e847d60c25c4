"""
ChiPredict - risk command.
Monte Carlo KL risk of one prior over a theta grid, as CSV.
"""

import logging
import math

import pandas as pd

from chipredict.commands.common import (
    add_model_flags,
    add_prior_flags,
    model_config,
    parse_theta,
    require,
    resolve_prior,
)
from chipredict.commands.output import write_table
from chipredict.errors import NumericalError
from chipredict.models.results import ExperimentConfig
from chipredict.services.experiment import RESULT_COLUMNS, ExperimentRunner
from chipredict.services.risk import ref_risk_constant, sample_blocks, semi_analytic_riskdiff

logger = logging.getLogger(__name__)


def register(subparsers, parent):
    parser = subparsers.add_parser("risk", parents=[parent], help="estimate KL risk over a theta grid")
    add_model_flags(parser)
    add_prior_flags(parser)
    group = parser.add_argument_group("simulation")
    group.add_argument("--theta", default=None, help="comma-separated noncentralities, e.g. 0,20,40")
    group.add_argument("--reps", type=int, default=None, help="Monte Carlo replications per theta")
    group.add_argument("--workers", type=int, default=None, help="worker processes")
    group.add_argument(
        "--semi-analytic",
        dest="semi_analytic",
        action="store_true",
        default=None,
        help="add the series/quadrature risk difference as column riskdiff",
    )
    group.add_argument("--out", default=None, help="write CSV here instead of stdout")
    parser.set_defaults(handler=run)


def run(args, config) -> int:
    model = model_config(args)
    prior = resolve_prior(args)
    require(args, "theta")
    thetas = parse_theta(args.theta)
    reps = args.reps if args.reps is not None else config.DEFAULT_REPS
    seed = args.seed if args.seed is not None else config.DEFAULT_SEED
    workers = args.workers if args.workers is not None else config.WORKERS
    settings = config.quad_settings()

    exp = ExperimentConfig(
        configs=[model],
        priors=[prior],
        theta_grid=thetas,
        reps=reps,
        seed=seed,
        workers=workers,
        block_size=config.BLOCK_SIZE,
    )
    runner = ExperimentRunner(settings, config.VERDICT_TOLERANCE)
    ref_risk = ref_risk_constant(model)

    rows = []
    for theta in thetas:
        blocks = sample_blocks(model, theta, reps, seed, config.BLOCK_SIZE)
        row = runner.cell_row(exp, model, prior, theta, blocks, ref_risk)
        if args.semi_analytic:
            row["riskdiff"] = math.nan
            try:
                value = semi_analytic_riskdiff(prior, model, theta, settings, config.POISSON_TAIL_MASS)
                if value is not None:
                    row["riskdiff"] = value
            except (NumericalError, ValueError) as e:
                logger.error(f"Semi-analytic risk difference failed at theta={theta}: {e}")
                row["error"] = "; ".join(filter(None, [row["error"], f"riskdiff: {e}"]))
        rows.append(row)

    columns = RESULT_COLUMNS + (["riskdiff"] if args.semi_analytic else [])
    write_table(pd.DataFrame(rows, columns=columns), args.out)

    if all(row["error"] for row in rows):
        logger.error("every theta failed")
        return 3
    return 0
