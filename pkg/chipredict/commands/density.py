"""
ChiPredict - density command.
Evaluates a predictive density at one point.
"""

import logging
import math

from chipredict.commands.common import add_model_flags, add_prior_flags, model_config, require, resolve_prior
from chipredict.commands.output import print_json
from chipredict.models.sampling import Observation
from chipredict.services.predictive import log_predictive, select_evaluator

logger = logging.getLogger(__name__)


def register(subparsers, parent):
    parser = subparsers.add_parser("density", parents=[parent], help="evaluate a predictive density")
    add_model_flags(parser)
    add_prior_flags(parser)
    group = parser.add_argument_group("point")
    group.add_argument("--v", type=float, default=None, help="observed V")
    group.add_argument("--w", type=float, default=None, help="point w at which to evaluate")
    group.add_argument("--xnormsq", type=float, default=None, help="observed ||x||^2")
    parser.set_defaults(handler=run)


def run(args, config) -> int:
    require(args, "v", "w", "xnormsq")
    model = model_config(args)
    prior = resolve_prior(args)
    obs = Observation(x_norm_sq=args.xnormsq, v=args.v)
    settings = config.quad_settings()

    evaluator = select_evaluator(prior, model)
    log_density = log_predictive(args.w, obs, prior, model, settings)
    logger.info(f"{prior.label()} evaluated by the {evaluator.value} path")
    print_json({
        "prior": prior.label(),
        "evaluator": evaluator.value,
        "log_density": log_density,
        "density": math.exp(log_density),
    })
    return 0
