"""Parallel text, sentence pairs and their encoded on-disk form."""
import json
import os
from dataclasses import dataclass, field

from ..exceptions import AlignmentError, DataError, NonProjectiveError, VocabularyError
from ..model.transition import Action, ActionKind
from ..utils.logger import logger
from .oracle import tree_to_actions


@dataclass(frozen=True)
class SentencePair:
    """Encoded training example; source and target are EOS-terminated id lists"""
    source: tuple
    target: tuple
    actions: tuple = ()
    index: int = None

    def __post_init__(self):
        object.__setattr__(self, 'source', tuple(self.source))
        object.__setattr__(self, 'target', tuple(self.target))
        object.__setattr__(self, 'actions', tuple(self.actions))

    @property
    def num_shifts(self):
        return sum(1 for action in self.actions if action.kind == ActionKind.SHIFT)

    def to_dict(self):
        return {
            "index": self.index,
            "source": list(self.source),
            "target": list(self.target),
            "actions": [action.index for action in self.actions],
        }

    @classmethod
    def from_dict(cls, data):
        return cls(data["source"], data["target"],
                   tuple(Action.from_index(i) for i in data.get("actions", ())), data.get("index"))


@dataclass(frozen=True)
class RawPair:
    """Tokenized pair before encoding, with its parse when one is available"""
    source: tuple
    target: tuple
    tree: object = None
    line: int = None


@dataclass
class FilterReport:
    total: int = 0
    kept: int = 0
    empty: int = 0
    too_long: int = 0
    non_projective: int = 0
    unknown_label: int = 0
    skipped_lines: list = field(default_factory=list)


def read_lines(path):
    """One whitespace-tokenized sentence per line"""
    with open(path, 'r', encoding='utf-8') as f:
        return [line.split() for line in f.read().splitlines()]


def read_parallel(source_path, target_path, trees=None):
    """
    Pair line-aligned source and target files (and parses of the target)

    Raises:
        AlignmentError: If the files or the parses do not line up
    """
    sources, targets = read_lines(source_path), read_lines(target_path)
    if len(sources) != len(targets):
        raise AlignmentError(f"{source_path} has {len(sources)} lines but {target_path} has {len(targets)}",
                             line=min(len(sources), len(targets)) + 1)
    if trees is not None and len(trees) != len(targets):
        raise AlignmentError(f"{len(trees)} parses for {len(targets)} target lines",
                             line=min(len(trees), len(targets)) + 1)
    pairs = []
    for i, (source, target) in enumerate(zip(sources, targets)):
        tree = None
        if trees is not None:
            tree = trees[i]
            if tree.length - 1 != len(target):
                raise AlignmentError(f"parse has {tree.length - 1} tokens but the target line has {len(target)}",
                                     line=i + 1)
            if tree.forms is not None and list(tree.forms[:-1]) != list(target):
                raise AlignmentError("parse forms differ from the target tokens", line=i + 1)
        pairs.append(RawPair(tuple(source), tuple(target), tree, i + 1))
    return pairs


def filter_corpus(pairs, max_length=50, report=None):
    """
    Drop pairs with an empty side or a side longer than max_length tokens

    Lengths count tokens before EOS is appended.

    Returns:
        tuple: (kept pairs, FilterReport)
    """
    report = report or FilterReport()
    kept = []
    for pair in pairs:
        report.total += 1
        if not pair.source or not pair.target:
            report.empty += 1
            report.skipped_lines.append(pair.line)
        elif len(pair.source) > max_length or len(pair.target) > max_length:
            report.too_long += 1
            report.skipped_lines.append(pair.line)
        else:
            kept.append(pair)
    report.kept = len(kept)
    logger.info(f"Corpus filter: kept {report.kept}/{report.total} "
                f"(empty {report.empty}, too long {report.too_long})")
    return kept, report


def encode_pairs(pairs, source_vocab, target_vocab, action_vocab=None, report=None):
    """
    Map tokens to ids, append EOS and derive gold actions from the parses

    Non-projective parses, and parses using a label outside action_vocab, are
    skipped with a warning and counted in report.

    Returns:
        list: SentencePair per retained pair, indexed in order
    """
    encoded = []
    for pair in pairs:
        actions = ()
        if action_vocab is not None:
            if pair.tree is None:
                raise DataError(f"line {pair.line}: no parse for the target sentence")
            try:
                actions = tree_to_actions(pair.tree.with_labels(action_vocab.label_id))
            except (NonProjectiveError, VocabularyError) as e:
                logger.warning(f"Skipping parse at line {pair.line}: {e}")
                if report is not None:
                    if isinstance(e, NonProjectiveError):
                        report.non_projective += 1
                    else:
                        report.unknown_label += 1
                    report.kept -= 1
                    report.skipped_lines.append(pair.line)
                continue
        encoded.append(SentencePair(source_vocab.encode(pair.source), target_vocab.encode(pair.target),
                                    actions, len(encoded)))
    return encoded


def save_pairs(path, pairs):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    temp_file = path + ".temp"
    with open(temp_file, 'w', encoding='utf-8') as f:
        for pair in pairs:
            f.write(json.dumps(pair.to_dict(), separators=(',', ':')) + '\n')
    os.replace(temp_file, path)


def load_pairs(path):
    pairs = []
    with open(path, 'r', encoding='utf-8') as f:
        for line_no, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                pairs.append(SentencePair.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError) as e:
                raise DataError(f"{path}: line {line_no}: malformed pair record: {e}") from e
    return pairs
