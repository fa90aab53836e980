import math

from ..exceptions import ConfigError, DataError

MODES = ("words", "actions", "joint")


def corpus_totals(model, pairs):
    """
    Summed negative log-likelihoods and symbol counts over pairs

    Returns:
        dict: word_nll, action_nll, words, actions
    """
    word_terms, action_terms = [], []
    words = actions = 0
    for pair in pairs:
        breakdown = model.loss_breakdown(pair)
        word_terms.append(breakdown['word_nll'])
        action_terms.append(breakdown['action_nll'])
        words += breakdown['words']
        actions += breakdown['actions']
    return {
        'word_nll': math.fsum(word_terms),
        'action_nll': math.fsum(action_terms),
        'words': words,
        'actions': actions,
    }


def perplexity_from_totals(totals, mode="joint"):
    if mode not in MODES:
        raise ConfigError(f"Unknown perplexity mode '{mode}', expected one of {MODES}")
    if mode == "words":
        nll, count = totals['word_nll'], totals['words']
    elif mode == "actions":
        nll, count = totals['action_nll'], totals['actions']
    else:
        nll, count = totals['word_nll'] + totals['action_nll'], totals['words'] + totals['actions']
    if count == 0:
        raise DataError(f"No {mode} symbols to compute a perplexity over")
    return math.exp(nll / count)


def perplexity(model, pairs, mode="joint"):
    """
    exp(total NLL / total symbols) of teacher-forced scoring

    Args:
        model (NmtRnng): Model to score with
        pairs (list): SentencePairs
        mode (str): 'words', 'actions' or 'joint' (words + actions)

    Raises:
        ConfigError: If actions are asked of a model without a parser
    """
    if mode == "actions" and not model.config.has_rnng:
        raise ConfigError("The plain translator has no action perplexity")
    return perplexity_from_totals(corpus_totals(model, pairs), mode)


def perplexities(model, pairs):
    """All modes the model supports from a single scoring pass"""
    totals = corpus_totals(model, pairs)
    modes = MODES if model.config.has_rnng else ("words", "joint")
    return {mode: perplexity_from_totals(totals, mode) for mode in modes}
