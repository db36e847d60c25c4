"""
ChiPredict - Risk experiments.
Runs grids of (model configuration, prior, theta) cells and collects the
Monte Carlo risks, the constant reference risk and the dominance verdicts.
"""

import logging
import math
from typing import Dict, List, Optional, Tuple

import pandas as pd

from chipredict.models.numerics import QuadSettings
from chipredict.models.priors import BMode, PriorSpec
from chipredict.models.results import DominanceVerdict, ExperimentConfig
from chipredict.models.sampling import ModelConfig
from chipredict.services.dominance import DEFAULT_TOLERANCE, dominance_report
from chipredict.services.risk import (
    DrawBlock,
    evaluate_blocks,
    ref_risk_constant,
    sample_blocks,
    summarize_losses,
    true_log_density,
)

logger = logging.getLogger(__name__)

RESULT_COLUMNS = [
    "n1", "n2", "p", "b_mode", "b", "a", "theta", "reps", "seed",
    "risk_mean", "risk_stderr", "ref_risk", "verdict", "margin", "error",
]

FIGURE1_DIMENSION = 14
FIGURE1_CASES = ((3, 3), (3, 5), (5, 3), (5, 5))
FIGURE1_THETAS = (0.0, 20.0, 40.0, 60.0)


def figure1_experiment(reps: int, seed: int, workers: int = 1, block_size: int = 1000) -> ExperimentConfig:
    """p = 14, four (n1, n2) cases, b in {n1/2, 1}, a in {0, p/2 - 1}, theta in {0, 20, 40, 60}."""
    top = FIGURE1_DIMENSION / 2.0 - 1.0
    return ExperimentConfig(
        configs=[ModelConfig(p=FIGURE1_DIMENSION, n1=n1, n2=n2) for n1, n2 in FIGURE1_CASES],
        priors=[
            PriorSpec.hierarchical(0.0, BMode.HALF),
            PriorSpec.hierarchical(top, BMode.HALF),
            PriorSpec.hierarchical(0.0, BMode.ONE),
            PriorSpec.hierarchical(top, BMode.ONE),
        ],
        theta_grid=list(FIGURE1_THETAS),
        reps=reps,
        seed=seed,
        workers=workers,
        block_size=block_size,
    )


class ExperimentRunner:
    """Evaluates an ExperimentConfig cell by cell into a result table."""

    def __init__(self, settings: Optional[QuadSettings] = None, tolerance: float = DEFAULT_TOLERANCE):
        self.settings = settings or QuadSettings()
        self.tolerance = tolerance
        self._verdicts: Dict[Tuple[ModelConfig, PriorSpec], DominanceVerdict] = {}

    def verdict(self, prior: PriorSpec, config: ModelConfig) -> Optional[DominanceVerdict]:
        """Dominance verdict of a cell, or None for the reference prior."""
        if prior.is_reference:
            return None
        key = (config, prior)
        if key not in self._verdicts:
            self._verdicts[key] = dominance_report(prior, config, self.settings, self.tolerance)
        return self._verdicts[key]

    def baseline_row(self, config: ModelConfig, ref_risk: float) -> dict:
        return {
            "n1": config.n1, "n2": config.n2, "p": config.p, "b_mode": "ref",
            "b": math.nan, "a": math.nan, "theta": math.nan, "reps": math.nan, "seed": math.nan,
            "risk_mean": ref_risk, "risk_stderr": 0.0, "ref_risk": ref_risk,
            "verdict": "", "margin": math.nan, "error": "",
        }

    def cell_row(
        self,
        exp: ExperimentConfig,
        config: ModelConfig,
        prior: PriorSpec,
        theta: float,
        blocks: List[DrawBlock],
        ref_risk: float,
    ) -> dict:
        row = {
            "n1": config.n1, "n2": config.n2, "p": config.p,
            "b_mode": "ref" if prior.is_reference else prior.hyper.b_mode.value,
            "b": math.nan if prior.is_reference else prior.hyper.resolve_b(config),
            "a": math.nan if prior.is_reference else prior.hyper.a,
            "theta": theta, "reps": exp.reps, "seed": exp.seed,
            "risk_mean": math.nan, "risk_stderr": math.nan, "ref_risk": ref_risk,
            "verdict": "", "margin": math.nan, "error": "",
        }
        errors = []
        try:
            verdict = self.verdict(prior, config)
            if verdict is not None:
                row["verdict"] = verdict.holds.value
                row["margin"] = math.nan if verdict.margin is None else verdict.margin
        except Exception as e:
            logger.error(f"Dominance check failed for {prior.label()} at {config.to_dict()}: {e}")
            errors.append(f"dominance: {e}")
        try:
            predicted = evaluate_blocks(prior, config, blocks, self.settings, exp.workers)
            estimate = summarize_losses(true_log_density(config, blocks) - predicted, exp.reps, exp.seed)
            row["risk_mean"] = estimate.mean
            row["risk_stderr"] = estimate.std_error
        except Exception as e:
            logger.error(f"Risk evaluation failed for {prior.label()} at theta={theta}: {e}")
            errors.append(f"risk: {e}")
        row["error"] = "; ".join(errors)
        return row

    def run(self, exp: ExperimentConfig) -> pd.DataFrame:
        """
        Rows in order: for each model configuration its baseline, then every
        prior over the theta grid. Draws are made once per (configuration,
        theta) and shared by all priors.
        """
        rows = []
        for config in exp.configs:
            ref_risk = ref_risk_constant(config)
            rows.append(self.baseline_row(config, ref_risk))
            draws: Dict[float, List[DrawBlock]] = {}
            for prior in exp.priors:
                for theta in exp.theta_grid:
                    if theta not in draws:
                        draws[theta] = sample_blocks(config, theta, exp.reps, exp.seed, exp.block_size)
                    logger.info(f"Evaluating {prior.label()} at {config.to_dict()}, theta={theta}")
                    rows.append(self.cell_row(exp, config, prior, theta, draws[theta], ref_risk))
        return pd.DataFrame(rows, columns=RESULT_COLUMNS)


def run_experiment(
    exp: ExperimentConfig,
    settings: Optional[QuadSettings] = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> pd.DataFrame:
    """Run every cell of exp; per-cell failures land in the error column."""
    return ExperimentRunner(settings, tolerance).run(exp)
