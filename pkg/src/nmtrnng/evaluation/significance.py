"""Paired bootstrap resampling over test sentences."""
import numpy as np

from ..exceptions import ConfigError
from ..utils.logger import logger
from .metrics import bleu_from_stats, check_aligned, corpus_bleu_stats, sentence_ribes_scores

SIGNIFICANCE_LEVEL = 0.005


def _bleu_scorer(hypotheses, references, smooth):
    stats = corpus_bleu_stats(hypotheses, references)
    return lambda weights: bleu_from_stats(weights @ stats, smooth)


def _ribes_scorer(hypotheses, references, smooth):
    scores = sentence_ribes_scores(hypotheses, references)
    return lambda weights: float(100.0 * (weights @ scores) / weights.sum())


_SCORERS = {'bleu': _bleu_scorer, 'ribes': _ribes_scorer}


def bootstrap_significance(system_a, system_b, references, metric='bleu', resamples=1000, seed=0,
                           smooth=False):
    """
    Paired bootstrap test of whether system B beats system A

    Each resample draws len(references) sentence indices with replacement
    and scores both systems on that same draw.

    Args:
        system_a (list): Baseline hypotheses
        system_b (list): Compared hypotheses, aligned with system_a
        references (list): References, aligned with both
        metric (str): 'bleu' or 'ribes'
        resamples (int): Number of resampled test sets
        seed (int): Seed of the resampling generator
        smooth (bool): Add-one smoothing for BLEU

    Returns:
        float: Fraction of resamples where B does not outperform A

    Raises:
        ConfigError: If the metric is unknown or resamples < 1
    """
    if metric not in _SCORERS:
        raise ConfigError(f"Unknown metric '{metric}', expected one of {sorted(_SCORERS)}")
    if resamples < 1:
        raise ConfigError(f"resamples must be positive, got {resamples}")
    if resamples < 1000:
        logger.warning(f"Bootstrap with {resamples} resamples; at least 1000 are recommended")
    check_aligned(system_a, references)
    check_aligned(system_b, references)
    n = len(references)
    if n == 0:
        return 1.0

    score_a = _SCORERS[metric](system_a, references, smooth)
    score_b = _SCORERS[metric](system_b, references, smooth)
    rng = np.random.default_rng(seed)
    not_better = 0
    for _ in range(resamples):
        weights = np.bincount(rng.integers(0, n, size=n), minlength=n)
        if score_b(weights) <= score_a(weights):
            not_better += 1
    p_value = not_better / resamples
    logger.debug(f"Bootstrap {metric}: p = {p_value:.4f} over {resamples} resamples")
    return p_value


def is_significant(p_value, level=SIGNIFICANCE_LEVEL):
    return p_value < level
