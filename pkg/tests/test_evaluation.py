import math

import numpy as np
import pytest

from nmtrnng.evaluation import (bleu, bleu_stats, bootstrap_significance, evaluate, evaluate_files,
                                is_significant, kendall_nkt, perplexities, perplexity, ribes,
                                sentence_ribes)
from nmtrnng.exceptions import AlignmentError, ConfigError
from nmtrnng.training import build_model

from conftest import random_pair, tiny_config

SENTENCES = [
    "the cat sat on the mat",
    "a dog barked at the mailman today",
    "it rained all day long in the city",
    "we went home after the long meeting",
]


def test_identical_output_scores_100():
    assert math.isclose(bleu(SENTENCES, SENTENCES), 100.0)
    assert math.isclose(ribes(SENTENCES, SENTENCES), 100.0)


def test_zero_overlap_scores_0():
    assert bleu(["p q r s t"], ["v w x y z"]) == 0.0
    assert ribes(["p q r s t"], ["v w x y z"]) == 0.0


def test_clipped_ngram_counts():
    stats = bleu_stats("the the the cat", "the cat sat down")
    np.testing.assert_array_equal(stats, [4, 4, 2, 1, 0, 0, 4, 3, 2, 1])
    # no trigram matches, so unsmoothed BLEU is zero
    assert bleu(["the the the cat"], ["the cat sat down"]) == 0.0
    assert bleu(["the the the cat"], ["the cat sat down"], smooth=True) > 0.0


def test_brevity_penalty():
    score = bleu(["the cat sat"], ["the cat sat on the mat"])
    assert math.isclose(score, 100.0 * math.exp(-1.0), rel_tol=1e-9)


def test_misaligned_inputs_are_refused():
    with pytest.raises(AlignmentError):
        bleu(SENTENCES, SENTENCES[:2])
    with pytest.raises(AlignmentError):
        ribes(SENTENCES[:1], SENTENCES)


def test_ribes_of_a_full_reversal_is_zero():
    assert sentence_ribes("d c b a", "a b c d") == 0.0
    assert kendall_nkt([0, 1, 2, 3]) == 1.0
    assert kendall_nkt([3, 2, 1, 0]) == 0.0


def test_ribes_penalizes_reordering():
    swapped = sentence_ribes("b a c d e", "a b c d e")
    assert 0.0 < swapped < 1.0
    assert math.isclose(sentence_ribes("a b c d e", "a b c d e"), 1.0)


def test_one_swapped_pair_of_four():
    # ascending pairs of 0 1 3 2: all but (3, 2)
    ranks = [0, 1, 3, 2]
    ascending = sum(1 for i in range(4) for j in range(i + 1, 4) if ranks[i] < ranks[j])
    assert ascending == 5
    assert math.isclose(kendall_nkt(ranks), 5 / 6)
    assert math.isclose(sentence_ribes("a b d c", "a b c d"), 5 / 6)


def test_bootstrap_self_comparison_is_never_significant():
    refs = SENTENCES * 5
    hyps = [s.replace("the", "a") for s in refs]
    p_value = bootstrap_significance(hyps, hyps, refs, "bleu", resamples=1000, seed=1)
    assert p_value >= 0.99
    assert not is_significant(p_value)


@pytest.mark.parametrize("metric", ["bleu", "ribes"])
def test_bootstrap_detects_a_clearly_better_system(metric):
    refs = SENTENCES * 5
    bad = ["zz yy xx ww vv" for _ in refs]
    p_value = bootstrap_significance(bad, refs, refs, metric, resamples=1000, seed=1)
    assert p_value < 0.005
    assert is_significant(p_value)


def test_bootstrap_is_reproducible_and_validates_its_arguments():
    refs = SENTENCES * 3
    hyps = [s.replace("the", "a") for s in refs]
    first = bootstrap_significance(refs, hyps, refs, "ribes", resamples=200, seed=4)
    assert first == bootstrap_significance(refs, hyps, refs, "ribes", resamples=200, seed=4)
    with pytest.raises(ConfigError):
        bootstrap_significance(refs, hyps, refs, "meteor")
    with pytest.raises(AlignmentError):
        bootstrap_significance(refs, hyps[:1], refs)


def test_bootstrap_p_value_is_stable_across_seeds():
    refs = [' '.join(f"w{i}x{k}" for k in range(5)) for i in range(40)]
    good = list(refs)
    bad = [' '.join(reversed(ref.split())) for ref in refs]
    # A wins on 6 sentences, B on 14, the rest tie
    system_a = good[:6] + bad[6:20] + good[20:]
    system_b = bad[:6] + good[6:20] + good[20:]
    first = bootstrap_significance(system_a, system_b, refs, "ribes", resamples=10000, seed=1)
    second = bootstrap_significance(system_a, system_b, refs, "ribes", resamples=10000, seed=2)
    assert abs(first - second) <= 0.01
    assert 0.005 < first < 0.2


def test_report_with_two_systems(tmp_path):
    paths = {}
    for name, lines in (("hyp", SENTENCES), ("ref", SENTENCES), ("hyp2", SENTENCES)):
        path = tmp_path / f"{name}.txt"
        path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
        paths[name] = str(path)
    report = evaluate_files(paths["hyp"], paths["ref"], paths["hyp2"], resamples=100)
    assert set(report.values()) == {"bleu", "ribes", "bleu_b", "ribes_b", "p_bleu", "p_ribes"}
    assert report.p_bleu == 1.0
    assert "sentences=4" in report.to_records()
    assert "BLEU" in report.to_text()


def test_report_with_one_system():
    report = evaluate(SENTENCES, SENTENCES, metrics=("bleu",))
    assert list(report.values()) == ["bleu"]
    assert math.isclose(report.bleu, 100.0)
    assert report.p_bleu is None


def test_uniform_model_perplexity_is_the_vocabulary_size():
    config = tiny_config(variant="nmt")
    model = build_model(config, seed=0)
    rng = np.random.default_rng(0)
    pairs = [random_pair(rng, config, i) for i in range(3)]
    assert math.isclose(perplexity(model, pairs, "words"), config.target_vocab_size, rel_tol=1e-9)
    with pytest.raises(ConfigError):
        perplexity(model, pairs, "actions")
    with pytest.raises(ConfigError):
        perplexity(model, pairs, "sentences")


def test_joint_perplexity_combines_words_and_actions(toy_pairs):
    config = tiny_config()
    model = build_model(config, seed=0)
    values = perplexities(model, toy_pairs)
    assert set(values) == {"words", "actions", "joint"}
    assert math.isclose(values["words"], config.target_vocab_size, rel_tol=1e-9)
    low, high = sorted((values["words"], values["actions"]))
    assert low <= values["joint"] <= high
