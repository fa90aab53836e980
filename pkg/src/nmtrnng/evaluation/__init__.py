from .metrics import bleu, bleu_from_stats, bleu_stats, corpus_bleu_stats, kendall_nkt, ribes, sentence_ribes
from .perplexity import MODES, corpus_totals, perplexities, perplexity
from .report import EvalReport, evaluate, evaluate_files
from .significance import SIGNIFICANCE_LEVEL, bootstrap_significance, is_significant

__all__ = [
    'bleu', 'bleu_from_stats', 'bleu_stats', 'corpus_bleu_stats', 'kendall_nkt', 'ribes',
    'sentence_ribes', 'MODES', 'corpus_totals', 'perplexities', 'perplexity', 'EvalReport',
    'evaluate', 'evaluate_files', 'SIGNIFICANCE_LEVEL', 'bootstrap_significance', 'is_significant',
]
