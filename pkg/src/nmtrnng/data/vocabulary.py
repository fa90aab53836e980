"""Token and action vocabularies with deterministic, frequency-ordered ids."""
import os
from collections import Counter

from ..exceptions import DataError, VocabularyError
from ..model.transition import Action, ActionKind
from ..utils.integrity import calculate_checksum
from ..utils.logger import logger

UNK = "UNK"
EOS = "EOS"
UNK_ID = 0
EOS_ID = 1


def _write_tsv(path, rows):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    temp_file = path + ".temp"
    with open(temp_file, 'w', encoding='utf-8') as f:
        for token, count in rows:
            f.write(f"{token}\t{count}\n")
    os.replace(temp_file, path)


def _read_tsv(path):
    rows = []
    with open(path, 'r', encoding='utf-8') as f:
        for line_no, line in enumerate(f, 1):
            line = line.rstrip('\n')
            if not line:
                continue
            parts = line.split('\t')
            if len(parts) != 2:
                raise DataError(f"{path}: line {line_no}: expected 'token<TAB>count'")
            try:
                rows.append((parts[0], int(parts[1])))
            except ValueError:
                raise DataError(f"{path}: line {line_no}: count is not an integer") from None
    return rows


class Vocabulary:
    """
    Bidirectional token/id map

    Id 0 is UNK and id 1 is EOS; the remaining tokens follow by descending
    count, ties broken lexicographically.
    """

    def __init__(self, tokens, counts=None, min_frequency=1):
        self.min_frequency = min_frequency
        self.counts = dict(counts or {})
        self.id_to_token = [UNK, EOS]
        for token in tokens:
            if token in (UNK, EOS):
                continue
            self.id_to_token.append(token)
        self.token_to_id = {token: index for index, token in enumerate(self.id_to_token)}
        if len(self.token_to_id) != len(self.id_to_token):
            raise VocabularyError("Vocabulary contains duplicate tokens")

    def __len__(self):
        return len(self.id_to_token)

    def __contains__(self, token):
        return token in self.token_to_id

    @property
    def unk_id(self):
        return UNK_ID

    @property
    def eos_id(self):
        return EOS_ID

    def token_id(self, token):
        # a literal "EOS" in text is an ordinary unknown word, never the terminator
        if token == EOS:
            return UNK_ID
        return self.token_to_id.get(token, UNK_ID)

    def token(self, index):
        if not 0 <= index < len(self.id_to_token):
            raise VocabularyError(f"id {index} outside vocabulary of size {len(self)}")
        return self.id_to_token[index]

    def encode(self, tokens, add_eos=True):
        ids = [self.token_id(token) for token in tokens]
        if add_eos:
            ids.append(EOS_ID)
        return ids

    def decode(self, ids, strip_eos=True):
        if strip_eos and ids and ids[-1] == EOS_ID:
            ids = ids[:-1]
        return [self.token(index) for index in ids]

    def rows(self):
        return [(token, self.counts.get(token, 0)) for token in self.id_to_token]

    def save(self, path):
        _write_tsv(path, self.rows())

    @classmethod
    def load(cls, path):
        rows = _read_tsv(path)
        if [token for token, _ in rows[:2]] != [UNK, EOS]:
            raise VocabularyError(f"{path}: first entries must be {UNK} and {EOS}")
        return cls([token for token, _ in rows], counts=dict(rows))

    def content_hash(self):
        text = ''.join(f"{token}\t{count}\n" for token, count in self.rows())
        return calculate_checksum(text.encode('utf-8'))


def build_vocab(corpus, min_frequency=1):
    """
    Build a vocabulary from tokenized sentences

    Args:
        corpus (iterable): Sentences, each a list of tokens
        min_frequency (int): Tokens seen fewer times map to UNK

    Returns:
        Vocabulary: The vocabulary

    Raises:
        DataError: If the corpus has no tokens
    """
    if min_frequency < 1:
        raise DataError(f"min_frequency must be at least 1, got {min_frequency}")
    counts = Counter()
    for sentence in corpus:
        counts.update(sentence)
    if not counts:
        raise DataError("Cannot build a vocabulary from an empty corpus")
    literal = {token: counts.pop(token) for token in (UNK, EOS) if token in counts}
    if literal:
        logger.warning("Corpus spells reserved tokens literally; they are read as unknown words: "
                       + ", ".join(f"{token} x{count}" for token, count in literal.items()))
    kept = sorted((token for token, count in counts.items() if count >= min_frequency),
                  key=lambda token: (-counts[token], token))
    unknown = sum(c for c in counts.values() if c < min_frequency) + sum(literal.values())
    reserved = {UNK: unknown, EOS: 0}
    return Vocabulary(kept, counts={**{t: counts[t] for t in kept}, **reserved}, min_frequency=min_frequency)


class ActionVocabulary:
    """
    Dependency labels and the 2L + 1 fine-grained actions built on them

    Label ids are ordered by descending frequency, then lexicographically.
    """

    def __init__(self, labels, counts=None):
        self.labels = list(labels)
        self.counts = dict(counts or {})
        self.action_counts = {}
        self.label_to_id = {label: index for index, label in enumerate(self.labels)}
        if len(self.label_to_id) != len(self.labels):
            raise VocabularyError("Label inventory contains duplicates")

    @property
    def num_labels(self):
        return len(self.labels)

    def __len__(self):
        return 2 * len(self.labels) + 1

    def label_id(self, label):
        try:
            return self.label_to_id[label]
        except KeyError:
            raise VocabularyError(f"Unknown dependency label '{label}'") from None

    def label(self, index):
        if not 0 <= index < len(self.labels):
            raise VocabularyError(f"label id {index} outside {len(self.labels)} labels")
        return self.labels[index]

    def action_name(self, action):
        if action.kind == ActionKind.SHIFT:
            return "SHIFT"
        prefix = "REDUCE-L" if action.kind == ActionKind.REDUCE_L else "REDUCE-R"
        return f"{prefix}({self.label(action.label)})"

    def parse_action(self, name):
        if name == "SHIFT":
            return Action(ActionKind.SHIFT)
        for prefix, kind in (("REDUCE-L(", ActionKind.REDUCE_L), ("REDUCE-R(", ActionKind.REDUCE_R)):
            if name.startswith(prefix) and name.endswith(")"):
                return Action(kind, self.label_id(name[len(prefix):-1]))
        raise VocabularyError(f"Not an action name: '{name}'")

    def actions(self):
        """All actions in id order"""
        return [Action.from_index(index) for index in range(len(self))]

    def count_actions(self, sequences):
        """Record how often each action occurs in oracle sequences"""
        counts = Counter()
        for actions in sequences:
            counts.update(action.index for action in actions)
        self.action_counts = {self.action_name(Action.from_index(index)): counts.get(index, 0)
                              for index in range(len(self))}

    def rows(self):
        return [(self.action_name(action), self.action_counts.get(self.action_name(action), 0))
                for action in self.actions()]

    def save(self, path):
        """One 'action<TAB>count' row per action in id order"""
        _write_tsv(path, self.rows())

    @classmethod
    def load(cls, path):
        rows = _read_tsv(path)
        if not rows or rows[0][0] != "SHIFT" or len(rows) % 2 != 1:
            raise VocabularyError(f"{path}: expected SHIFT followed by REDUCE-L/REDUCE-R pairs")
        labels, counts = [], {}
        for (left, left_count), (right, right_count) in zip(rows[1::2], rows[2::2]):
            label = left[len("REDUCE-L("):-1]
            if left != f"REDUCE-L({label})" or right != f"REDUCE-R({label})":
                raise VocabularyError(f"{path}: malformed action pair {left!r}, {right!r}")
            labels.append(label)
            counts[label] = left_count + right_count
        vocab = cls(labels, counts)
        vocab.action_counts = dict(rows)
        return vocab

    def content_hash(self):
        text = ''.join(f"{name}\n" for name, _ in self.rows())
        return calculate_checksum(text.encode('utf-8'))


def build_action_vocab(trees):
    """Label inventory of a list of labeled DepTrees"""
    counts = Counter()
    for tree in trees:
        counts.update(label for label in tree.labels if label is not None)
    labels = sorted(counts, key=lambda label: (-counts[label], label))
    return ActionVocabulary(labels, counts)
