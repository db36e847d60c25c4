"""
ChiPredict - Shared command helpers.
Flag resolution into model configurations and priors.
"""

import argparse
import logging
from typing import List, Optional

from chipredict.errors import DomainError
from chipredict.models.priors import BMode, PriorSpec
from chipredict.models.sampling import ModelConfig

logger = logging.getLogger(__name__)

# Model field -> command-line flag, where the two differ.
FLAG_NAMES = {
    "x_norm_sq": "--xnormsq",
    "rel_tol": "--tol",
}


def flag_name(field: Optional[str]) -> str:
    if not field:
        return ""
    if field in FLAG_NAMES:
        return FLAG_NAMES[field]
    return "--" + field.replace("_", "-")


def add_model_flags(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("model")
    group.add_argument("--n1", type=float, default=None, help="degrees of freedom of V")
    group.add_argument("--n2", type=float, default=None, help="degrees of freedom of W")
    group.add_argument("--p", type=int, default=None, help="dimension of x")


def add_prior_flags(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("prior")
    group.add_argument("--prior", choices=["ref", "hier"], default=None, help="reference or hierarchical prior")
    group.add_argument(
        "--b-mode",
        dest="b_mode",
        choices=[mode.value for mode in BMode],
        default=None,
        help="b = n1/2 (half), b = 1 (one), or the value of --b (general)",
    )
    group.add_argument("--b", type=float, default=None, help="hyperparameter b for --b-mode general")
    group.add_argument("--a", type=float, default=None, help="hyperparameter a < p/2")


def require(args: argparse.Namespace, *names: str):
    """Raise a DomainError naming the first missing flag."""
    for name in names:
        if getattr(args, name, None) is None:
            raise DomainError(f"missing required flag {flag_name(name)}", field=name)


def model_config(args: argparse.Namespace) -> ModelConfig:
    require(args, "n1", "n2", "p")
    return ModelConfig(p=args.p, n1=args.n1, n2=args.n2)


def resolve_prior(args: argparse.Namespace, default: str = "ref") -> PriorSpec:
    """
    PriorSpec from --prior/--b-mode/--b/--a.

    Without --prior, any hyperparameter flag selects the hierarchical prior.
    --b without --b-mode means general.
    """
    kind = args.prior
    if kind is None:
        kind = "hier" if any(getattr(args, n) is not None for n in ("b_mode", "b", "a")) else default
    if kind == "ref":
        if args.b_mode is not None or args.b is not None or args.a is not None:
            raise DomainError("the reference prior takes no hyperparameters", field="prior")
        return PriorSpec.reference()

    require(args, "a")
    b_mode = args.b_mode
    if b_mode is None:
        if args.b is None:
            raise DomainError("hierarchical prior needs --b-mode or --b", field="b_mode")
        b_mode = BMode.GENERAL.value
    return PriorSpec.hierarchical(args.a, BMode(b_mode), args.b)


def parse_theta(value) -> List[float]:
    """Comma-separated theta grid, or a number or list from a config file."""
    if isinstance(value, (int, float)):
        return [float(value)]
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    try:
        thetas = [float(part) for part in str(value).split(",") if part.strip()]
    except ValueError as e:
        raise DomainError(f"cannot parse theta grid {value!r}", field="theta") from e
    if not thetas:
        raise DomainError("theta grid is empty", field="theta")
    return thetas
