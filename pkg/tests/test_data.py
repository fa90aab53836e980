import numpy as np
import pytest

from nmtrnng.data import (ROOT, ActionVocabulary, DepTree, RawPair, SentencePair, actions_to_tree,
                          build_action_vocab, build_vocab, encode_pairs, filter_corpus, is_projective,
                          load_pairs, random_projective_tree, read_conll, read_parallel, save_pairs,
                          tree_to_actions, write_conll)
from nmtrnng.data.vocabulary import Vocabulary
from nmtrnng.exceptions import (AlignmentError, ConllParseError, DataError, NonProjectiveError,
                                TransitionError, VocabularyError)
from nmtrnng.model import SHIFT, Action, ActionKind

L, R = ActionKind.REDUCE_L, ActionKind.REDUCE_R


def write(path, text):
    path.write_text(text, encoding='utf-8')
    return str(path)


def test_vocabulary_cutoff_maps_rare_tokens_to_unk():
    vocab = build_vocab([["a", "b", "a"], ["c", "a", "b"]], min_frequency=2)
    assert vocab.id_to_token == ["UNK", "EOS", "a", "b"]
    assert vocab.encode(["a", "c"]) == [2, 0, 1]
    assert vocab.decode([3, 2, 1]) == ["b", "a"]
    assert vocab.counts["UNK"] == 1


def test_vocabulary_ties_break_lexicographically():
    vocab = build_vocab([["z", "m", "a"]])
    assert vocab.id_to_token[2:] == ["a", "m", "z"]


def test_vocabulary_save_and_load(tmp_path):
    vocab = build_vocab([["x", "y", "x"]])
    path = str(tmp_path / "vocab.tsv")
    vocab.save(path)
    loaded = Vocabulary.load(path)
    assert loaded.id_to_token == vocab.id_to_token
    assert loaded.content_hash() == vocab.content_hash()
    assert build_vocab([["x", "y", "y"]]).content_hash() != vocab.content_hash()


def test_vocabulary_load_needs_reserved_tokens_first(tmp_path):
    with pytest.raises(VocabularyError):
        Vocabulary.load(write(tmp_path / "bad.tsv", "a\t3\nUNK\t0\nEOS\t0\n"))


def test_empty_corpus_has_no_vocabulary():
    with pytest.raises(DataError):
        build_vocab([[], []])


def test_reserved_spellings_in_text_are_unknown_words():
    vocab = build_vocab([["a", "EOS", "b"], ["UNK", "a"]])
    assert vocab.id_to_token == ["UNK", "EOS", "a", "b"]
    assert vocab.counts["UNK"] == 2
    # only the appended EOS terminates the sentence
    assert vocab.encode(["a", "EOS", "UNK"]) == [2, 0, 0, 1]


def test_action_vocabulary_names_and_persistence(tmp_path):
    trees = [DepTree([1, 2, ROOT], ["nsubj", "obj", None]), DepTree([1, ROOT], ["nsubj", None])]
    vocab = build_action_vocab(trees)
    assert vocab.labels == ["nsubj", "obj"]
    assert len(vocab) == 5
    assert vocab.action_name(Action(R, 1)) == "REDUCE-R(obj)"
    assert vocab.parse_action("REDUCE-L(nsubj)") == Action(L, 0)
    assert vocab.parse_action("SHIFT") == SHIFT

    path = str(tmp_path / "actions.tsv")
    vocab.save(path)
    loaded = ActionVocabulary.load(path)
    assert loaded.labels == vocab.labels
    assert loaded.content_hash() == vocab.content_hash()
    with pytest.raises(VocabularyError):
        vocab.label_id("amod")


CONLL = "1\tthe\t2\tdet\n2\tcat\t3\tnsubj\n3\tsat\t0\troot\n\n"


def test_read_conll_roots_the_tree_at_eos(tmp_path):
    trees = read_conll(write(tmp_path / "a.conll", CONLL))
    assert len(trees) == 1
    tree = trees[0]
    assert tree.heads == (1, 2, 3, ROOT)
    assert tree.labels == ("det", "nsubj", "root", None)
    assert tree.forms == ("the", "cat", "sat", "EOS")


def test_read_conll_accepts_ten_columns_and_comments(tmp_path):
    text = ("# sent_id = 1\n"
            "1\tdogs\tdog\tNOUN\tNNS\t_\t2\tnsubj\t_\t_\n"
            "2\tbark\tbark\tVERB\tVBP\t_\t0\troot\t_\t_\n\n"
            "# sent_id = 2\n\n")
    trees = read_conll(write(tmp_path / "b.conll", text))
    assert trees[0].heads == (1, 2, ROOT)
    assert trees[1].length == 1


@pytest.mark.parametrize("text, line", [
    ("1\tthe\t2\tdet\n2\tcat\t7\troot\n\n", 2),
    ("1\tthe\tx\tdet\n\n", 1),
    ("1\tthe\t2\n\n", 1),
])
def test_read_conll_reports_the_bad_line(tmp_path, text, line):
    with pytest.raises(ConllParseError) as info:
        read_conll(write(tmp_path / "bad.conll", text))
    assert info.value.line == line


def test_read_conll_rejects_cycles(tmp_path):
    with pytest.raises(ConllParseError):
        read_conll(write(tmp_path / "cycle.conll", "1\ta\t2\tx\n2\tb\t1\ty\n3\tc\t0\troot\n\n"))


def test_write_conll_reads_back(tmp_path):
    trees = read_conll(write(tmp_path / "a.conll", CONLL))
    path = str(tmp_path / "out.conll")
    write_conll(path, trees + [None])
    again = read_conll(path)
    assert again[0] == trees[0]
    assert again[1].length == 1


def test_crossing_arcs_are_not_projective():
    # 0 <- 2 crosses 1 <- 3
    tree = DepTree([2, 3, 4, 4, ROOT], ["a", "b", "c", "d", None])
    assert not is_projective(tree)
    with pytest.raises(NonProjectiveError):
        tree_to_actions(tree.with_labels(lambda label: 0))


def random_tree(rng, length):
    """Any tree rooted at EOS, projective or not"""
    heads = [ROOT] * length
    attached = [length - 1]
    for node in rng.permutation(length - 1):
        heads[int(node)] = int(rng.choice(attached))
        attached.append(int(node))
    return DepTree(heads, [0] * (length - 1) + [None])


def has_crossing_arcs(tree):
    spans = [(min(d, h), max(d, h)) for d, h, _ in tree.arcs()]
    return any(a < c < b < d for a, b in spans for c, d in spans)


def test_projectivity_agrees_with_pairwise_crossing_check():
    rng = np.random.default_rng(5)
    verdicts = set()
    for _ in range(200):
        tree = random_tree(rng, int(rng.integers(2, 11)))
        verdict = is_projective(tree)
        assert verdict == (not has_crossing_arcs(tree)), tree.heads
        verdicts.add(verdict)
    assert verdicts == {True, False}


def test_oracle_left_branching_sentence():
    tree = DepTree([1, 2, 3, ROOT], [0, 1, 2, None])
    assert tree_to_actions(tree) == [SHIFT, SHIFT, Action(L, 0), SHIFT, Action(L, 1), SHIFT, Action(L, 2)]


def test_oracle_right_dependent_waits_for_its_children():
    # a <- EOS, b <- a
    tree = DepTree([2, 0, ROOT], [0, 1, None])
    assert tree_to_actions(tree) == [SHIFT, SHIFT, Action(R, 1), SHIFT, Action(L, 0)]


def test_oracle_round_trips_random_projective_trees():
    rng = np.random.default_rng(0)
    for _ in range(200):
        length = int(rng.integers(2, 16))
        tree = random_projective_tree(rng, length, 3)
        assert is_projective(tree)
        actions = tree_to_actions(tree)
        assert len(actions) == 2 * length - 1
        assert sum(action.kind == ActionKind.SHIFT for action in actions) == length
        assert actions_to_tree(actions, length) == tree


def test_actions_to_tree_reports_the_failing_step():
    with pytest.raises(TransitionError) as info:
        actions_to_tree([SHIFT, Action(R, 0)], 2)
    assert info.value.step == 1
    with pytest.raises(TransitionError):
        actions_to_tree([SHIFT, SHIFT], 2)


def test_filter_corpus_drops_empty_and_long_pairs():
    pairs = [
        RawPair(("a",), ("x",), line=1),
        RawPair((), ("x",), line=2),
        RawPair(("a",) * 4, ("x",), line=3),
        RawPair(("a",) * 3, ("x",) * 3, line=4),
    ]
    kept, report = filter_corpus(pairs, max_length=3)
    assert [pair.line for pair in kept] == [1, 4]
    assert (report.total, report.kept, report.empty, report.too_long) == (4, 2, 1, 1)
    assert report.skipped_lines == [2, 3]


def test_read_parallel_checks_alignment(tmp_path):
    source = write(tmp_path / "s.txt", "a b\nc\n")
    target = write(tmp_path / "t.txt", "x\n")
    with pytest.raises(AlignmentError):
        read_parallel(source, target)
    target = write(tmp_path / "t.txt", "the cat sat\nx y\n")
    trees = read_conll(write(tmp_path / "a.conll", CONLL))
    with pytest.raises(AlignmentError) as info:
        read_parallel(source, target, trees)
    assert info.value.line == 2


def test_encode_pairs_skips_non_projective_parses():
    source_vocab = build_vocab([["a", "b"]])
    target_vocab = build_vocab([["w", "x", "y", "z"]])
    good = DepTree([1, 2, ROOT], ["det", "root", None])
    crossing = DepTree([2, 3, 4, 4, ROOT], ["det", "det", "root", "root", None])
    action_vocab = build_action_vocab([good, crossing])
    raw = [RawPair(("a",), ("w", "x"), good, 1), RawPair(("b",), ("w", "x", "y", "z"), crossing, 2)]
    _, report = filter_corpus(raw)
    pairs = encode_pairs(raw, source_vocab, target_vocab, action_vocab, report)
    assert len(pairs) == 1
    assert report.non_projective == 1
    assert report.kept == 1
    pair = pairs[0]
    assert pair.source == (2, 1)
    assert pair.num_shifts == len(pair.target) == 3


def test_sentence_pairs_save_and_load(tmp_path):
    pairs = [SentencePair([2, 1], [3, 1], [SHIFT, SHIFT, Action(L, 0)], 0),
             SentencePair([4, 1], [1], [SHIFT], 1)]
    path = str(tmp_path / "pairs.jsonl")
    save_pairs(path, pairs)
    assert load_pairs(path) == pairs


def test_encode_pairs_skips_labels_unseen_in_training():
    source_vocab = build_vocab([["a", "b"]])
    target_vocab = build_vocab([["w", "x"]])
    train_tree = DepTree([1, 2, ROOT], ["nsubj", "root", None])
    dev_tree = DepTree([1, 2, ROOT], ["amod", "root", None])
    action_vocab = build_action_vocab([train_tree])
    raw = [RawPair(("a",), ("w", "x"), dev_tree, 1), RawPair(("b",), ("x", "w"), train_tree, 2)]
    _, report = filter_corpus(raw)
    pairs = encode_pairs(raw, source_vocab, target_vocab, action_vocab, report)
    assert [pair.source for pair in pairs] == [(3, 1)]
    assert pairs[0].index == 0
    assert report.unknown_label == 1
    assert report.non_projective == 0
    assert report.kept == 1
    assert report.skipped_lines == [1]
