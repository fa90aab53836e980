"""Corpus BLEU and RIBES over pretokenized sentences."""
from collections import Counter
from itertools import combinations

import numpy as np
from sacrebleu.metrics import BLEU

from ..exceptions import AlignmentError

MAX_ORDER = 4
RIBES_ALPHA = 0.25
RIBES_BETA = 0.10


def check_aligned(hypotheses, references):
    if len(hypotheses) != len(references):
        raise AlignmentError(f"{len(hypotheses)} hypotheses for {len(references)} references",
                             line=min(len(hypotheses), len(references)) + 1)


def _tokens(sentence):
    return sentence.split() if isinstance(sentence, str) else list(sentence)


def _ngrams(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu_stats(hypothesis, reference):
    """
    Sufficient statistics of one sentence

    Returns:
        numpy.ndarray: [hyp_len, ref_len, matches_1..4, totals_1..4]
    """
    hyp, ref = _tokens(hypothesis), _tokens(reference)
    stats = np.zeros(2 + 2 * MAX_ORDER, dtype=np.int64)
    stats[0], stats[1] = len(hyp), len(ref)
    for n in range(1, MAX_ORDER + 1):
        hyp_counts, ref_counts = _ngrams(hyp, n), _ngrams(ref, n)
        stats[1 + n] = sum(min(count, ref_counts[gram]) for gram, count in hyp_counts.items())
        stats[1 + MAX_ORDER + n] = max(len(hyp) - n + 1, 0)
    return stats


def corpus_bleu_stats(hypotheses, references):
    check_aligned(hypotheses, references)
    if not hypotheses:
        return np.zeros((0, 2 + 2 * MAX_ORDER), dtype=np.int64)
    return np.stack([bleu_stats(h, r) for h, r in zip(hypotheses, references)])


def bleu_from_stats(totals, smooth=False):
    """
    BLEU-4 on a 0-100 scale from summed sufficient statistics

    Orders with no hypothesis n-grams in the whole corpus are left out of
    the geometric mean; an order with n-grams but no match gives 0 unless
    smoothing is on.
    """
    totals = [int(x) for x in totals]
    sys_len, ref_len = totals[0], totals[1]
    if sys_len == 0:
        return 0.0
    correct = totals[2:2 + MAX_ORDER]
    total = totals[2 + MAX_ORDER:]
    score = BLEU.compute_bleu(correct, total, sys_len, ref_len,
                              smooth_method='add-k' if smooth else 'none',
                              effective_order=True, max_ngram_order=MAX_ORDER).score
    return float(min(max(score, 0.0), 100.0))


def bleu(hypotheses, references, smooth=False):
    """
    Corpus-level BLEU-4 of tokenized hypotheses against one reference each

    Raises:
        AlignmentError: If the line counts differ
    """
    stats = corpus_bleu_stats(hypotheses, references)
    return bleu_from_stats(stats.sum(axis=0), smooth)


def _align(hyp, ref):
    """Reference position of each hypothesis word, unique tokens first, then leftmost free"""
    hyp_counts, ref_counts = Counter(hyp), Counter(ref)
    positions = [None] * len(hyp)
    used = set()
    for i, token in enumerate(hyp):
        if hyp_counts[token] == 1 and ref_counts[token] == 1:
            j = ref.index(token)
            positions[i] = j
            used.add(j)
    for i, token in enumerate(hyp):
        if positions[i] is not None:
            continue
        for j, ref_token in enumerate(ref):
            if ref_token == token and j not in used:
                positions[i] = j
                used.add(j)
                break
    return [p for p in positions if p is not None]


def kendall_nkt(ranks):
    """Fraction of ascending pairs, i.e. (Kendall's tau + 1) / 2"""
    pairs = len(ranks) * (len(ranks) - 1) // 2
    if pairs == 0:
        return None
    ascending = sum(1 for a, b in combinations(ranks, 2) if a < b)
    return ascending / pairs


def sentence_ribes(hypothesis, reference, alpha=RIBES_ALPHA, beta=RIBES_BETA):
    """RIBES of one sentence in [0, 1]"""
    hyp, ref = _tokens(hypothesis), _tokens(reference)
    if not hyp or not ref:
        return 0.0
    ranks = _align(hyp, ref)
    nkt = kendall_nkt(ranks)
    if nkt is None:
        # a single aligned word only counts for one-word sentences
        nkt = 1.0 if len(ranks) == 1 and len(hyp) == 1 and len(ref) == 1 else 0.0
    precision = len(ranks) / len(hyp)
    brevity = min(1.0, float(np.exp(1.0 - len(ref) / len(hyp))))
    return nkt * precision ** alpha * brevity ** beta


def sentence_ribes_scores(hypotheses, references):
    check_aligned(hypotheses, references)
    return np.array([sentence_ribes(h, r) for h, r in zip(hypotheses, references)], dtype=np.float64)


def ribes(hypotheses, references):
    """Corpus RIBES on a 0-100 scale: the mean sentence score"""
    scores = sentence_ribes_scores(hypotheses, references)
    if scores.size == 0:
        return 0.0
    return float(100.0 * scores.mean())
