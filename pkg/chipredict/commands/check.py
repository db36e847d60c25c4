"""
ChiPredict - check command.
Reports which dominance condition decides a hierarchical prior.
"""

import logging

from chipredict.commands.common import add_model_flags, add_prior_flags, model_config, resolve_prior
from chipredict.commands.output import print_json
from chipredict.services.dominance import dominance_report

logger = logging.getLogger(__name__)


def register(subparsers, parent):
    parser = subparsers.add_parser("check", parents=[parent], help="check dominance over the reference density")
    add_model_flags(parser)
    add_prior_flags(parser)
    parser.set_defaults(handler=run)


def run(args, config) -> int:
    model = model_config(args)
    prior = resolve_prior(args, default="hier")
    verdict = dominance_report(prior, model, config.quad_settings(), config.VERDICT_TOLERANCE)
    record = {"prior": prior.label(), **model.to_dict()}
    record.update(verdict.to_dict())
    print_json(record)
    return 0
