from dataclasses import dataclass, field

from ..data.corpus import read_lines
from .metrics import bleu, ribes, sentence_ribes_scores
from .significance import SIGNIFICANCE_LEVEL, bootstrap_significance


@dataclass
class EvalReport:
    bleu: float = None
    ribes: float = None
    sentence_ribes: list = field(default_factory=list)
    bleu_b: float = None
    ribes_b: float = None
    p_bleu: float = None
    p_ribes: float = None
    sentences: int = 0
    resamples: int = None

    def values(self):
        """Populated metric keys in a fixed order"""
        keys = ('bleu', 'ribes', 'bleu_b', 'ribes_b', 'p_bleu', 'p_ribes')
        return {key: getattr(self, key) for key in keys if getattr(self, key) is not None}

    def to_records(self):
        """Machine-readable key=value lines"""
        lines = [f"sentences={self.sentences}"]
        lines += [f"{key}={value!r}" for key, value in self.values().items()]
        return lines

    def to_text(self):
        lines = [f"Sentences: {self.sentences}"]
        if self.bleu is not None:
            lines.append(f"BLEU:  {self.bleu:6.2f}" + (f"  vs {self.bleu_b:6.2f}" if self.bleu_b is not None else ""))
        if self.ribes is not None:
            lines.append(f"RIBES: {self.ribes:6.2f}" + (f"  vs {self.ribes_b:6.2f}" if self.ribes_b is not None else ""))
        for metric in ('bleu', 'ribes'):
            p_value = getattr(self, f"p_{metric}")
            if p_value is not None:
                mark = " (significant)" if p_value < SIGNIFICANCE_LEVEL else ""
                lines.append(f"p({metric.upper()}): {p_value:.4f}{mark} over {self.resamples} resamples")
        return '\n'.join(lines)


def evaluate(hypotheses, references, hypotheses_b=None, metrics=("bleu", "ribes"), resamples=1000, seed=0):
    """
    Score a system and optionally test a second one against it

    Args:
        hypotheses (list): Tokenized system output, one per reference
        references (list): Tokenized references
        hypotheses_b (list, optional): Second system; enables paired bootstrap
        metrics (tuple): Subset of 'bleu' and 'ribes'
        resamples (int): Bootstrap resamples
        seed (int): Bootstrap seed

    Returns:
        EvalReport: The scores
    """
    report = EvalReport(sentences=len(references))
    if 'bleu' in metrics:
        report.bleu = bleu(hypotheses, references)
    if 'ribes' in metrics:
        report.ribes = ribes(hypotheses, references)
        report.sentence_ribes = sentence_ribes_scores(hypotheses, references).tolist()
    if hypotheses_b is not None:
        report.resamples = resamples
        if 'bleu' in metrics:
            report.bleu_b = bleu(hypotheses_b, references)
            report.p_bleu = bootstrap_significance(hypotheses, hypotheses_b, references, 'bleu', resamples, seed)
        if 'ribes' in metrics:
            report.ribes_b = ribes(hypotheses_b, references)
            report.p_ribes = bootstrap_significance(hypotheses, hypotheses_b, references, 'ribes', resamples, seed)
    return report


def evaluate_files(hypothesis_path, reference_path, hypothesis_b_path=None, **kwargs):
    hypotheses = read_lines(hypothesis_path)
    references = read_lines(reference_path)
    hypotheses_b = read_lines(hypothesis_b_path) if hypothesis_b_path else None
    return evaluate(hypotheses, references, hypotheses_b, **kwargs)
