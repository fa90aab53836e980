"""Dependency trees and the CoNLL-style files they are read from and written to.

Token positions are 0-based. The EOS token is appended as the last position
and is the ROOT of every tree; its head slot holds ROOT.
"""
import os
from dataclasses import dataclass, replace

from ..exceptions import ConllParseError, DataError
from ..utils.logger import logger
from .vocabulary import EOS

ROOT = -1


@dataclass(frozen=True)
class DepTree:
    heads: tuple
    labels: tuple
    forms: tuple = None

    def __post_init__(self):
        object.__setattr__(self, 'heads', tuple(int(h) for h in self.heads))
        object.__setattr__(self, 'labels', tuple(self.labels))
        if self.forms is not None:
            object.__setattr__(self, 'forms', tuple(self.forms))
        problem = _tree_problem(self.heads)
        if problem:
            raise DataError(f"Invalid dependency tree: {problem}")
        if len(self.labels) != len(self.heads):
            raise DataError(f"{len(self.labels)} labels for {len(self.heads)} tokens")
        if self.forms is not None and len(self.forms) != len(self.heads):
            raise DataError(f"{len(self.forms)} forms for {len(self.heads)} tokens")

    @property
    def length(self):
        """Token count M, EOS included"""
        return len(self.heads)

    @property
    def root(self):
        return len(self.heads) - 1

    def with_labels(self, convert):
        """Same tree with every non-ROOT label passed through convert"""
        labels = tuple(None if head == ROOT else convert(label)
                       for head, label in zip(self.heads, self.labels))
        return replace(self, labels=labels)

    def arcs(self):
        """(dependent, head, label) for every non-ROOT token"""
        return [(d, h, self.labels[d]) for d, h in enumerate(self.heads) if h != ROOT]


def _tree_problem(heads):
    m = len(heads)
    if m == 0:
        return "no tokens"
    if heads[-1] != ROOT:
        return "the last token (EOS) must be the ROOT"
    for dependent, head in enumerate(heads[:-1]):
        if head == ROOT:
            return f"token {dependent} is a second ROOT"
        if not 0 <= head < m or head == dependent:
            return f"token {dependent} has head {head}"
    for start in range(m - 1):
        seen = set()
        node = start
        while node != ROOT:
            if node in seen:
                return f"cycle through token {start}"
            seen.add(node)
            node = heads[node]
    return None


def is_projective(tree):
    """True iff no two arcs cross when drawn above the sentence"""
    heads = tree.heads
    for dependent, head in enumerate(heads):
        if head == ROOT:
            continue
        lo, hi = min(dependent, head), max(dependent, head)
        for between in range(lo + 1, hi):
            node = between
            while node != ROOT and node != head:
                node = heads[node]
            if node != head:
                return False
    return True


def random_projective_tree(rng, length, num_labels):
    """
    Uniformly split intervals into a random projective tree

    Args:
        rng (numpy.random.Generator): Source of randomness
        length (int): Token count M including EOS, at least 1
        num_labels (int): Labels are drawn from range(num_labels)

    Returns:
        DepTree: Tree with integer labels rooted at EOS
    """
    if length < 1:
        raise DataError(f"Tree length must be at least 1, got {length}")
    heads = [ROOT] * length

    def split(lo, hi, head):
        if lo >= hi:
            return
        r = int(rng.integers(lo, hi))
        heads[r] = head
        split(lo, r, r)
        split(r + 1, hi, r)

    split(0, length - 1, length - 1)
    labels = [None if h == ROOT else int(rng.integers(num_labels)) for h in heads]
    return DepTree(heads, labels)


def _parse_row(cols, line_no):
    if len(cols) == 4:
        index, form, head, label = cols
    elif len(cols) == 10:
        index, form, head, label = cols[0], cols[1], cols[6], cols[7]
    else:
        raise ConllParseError(f"expected 4 or 10 tab-separated columns, got {len(cols)}", line=line_no)
    try:
        return int(index), form, int(head), label
    except ValueError:
        raise ConllParseError("index and head must be integers", line=line_no) from None


def _build_tree(rows, first_line):
    n = len(rows)
    heads, labels, forms = [], [], []
    for offset, (index, form, head, label) in enumerate(rows):
        line_no = first_line + offset
        if index != offset + 1:
            raise ConllParseError(f"token index {index} out of sequence, expected {offset + 1}", line=line_no)
        if not 0 <= head <= n:
            raise ConllParseError(f"head {head} outside 0..{n}", line=line_no)
        if head == index:
            raise ConllParseError("token is its own head", line=line_no)
        # the original root token hangs off EOS
        heads.append(n if head == 0 else head - 1)
        labels.append(label)
        forms.append(form)
    heads.append(ROOT)
    labels.append(None)
    forms.append(EOS)
    problem = _tree_problem(heads)
    if problem:
        raise ConllParseError(problem, line=first_line)
    return DepTree(heads, labels, forms)


def read_conll(path):
    """
    Read CoNLL-style dependency trees

    Rows are index, form, head, label separated by tabs (10-column CoNLL-X
    rows are accepted too); blank lines separate sentences and lines
    starting with '#' are comments. A block holding only comments is an
    empty sentence, so files stay line-aligned with their text.

    Returns:
        list: DepTree per sentence, EOS appended as ROOT

    Raises:
        ConllParseError: With the offending line number
    """
    trees = []
    rows, first_line, has_comment = [], None, False
    with open(path, 'r', encoding='utf-8') as f:
        for line_no, raw in enumerate(f, 1):
            line = raw.rstrip('\n').rstrip('\r')
            if not line.strip():
                if rows or has_comment:
                    trees.append(_build_tree(rows, first_line or line_no))
                rows, first_line, has_comment = [], None, False
                continue
            if line.startswith('#'):
                has_comment = True
                continue
            if first_line is None:
                first_line = line_no
            rows.append(_parse_row(line.split('\t'), line_no))
    if rows or has_comment:
        trees.append(_build_tree(rows, first_line or 1))
    logger.debug(f"Read {len(trees)} trees from {path}")
    return trees


def write_conll(path, trees):
    """
    Write trees in the format read_conll reads

    Each sentence starts with a '# sent_id = k' comment; a None entry is
    written as an empty sentence. Labels must be strings.
    """
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    temp_file = path + ".temp"
    with open(temp_file, 'w', encoding='utf-8') as f:
        for k, tree in enumerate(trees, 1):
            f.write(f"# sent_id = {k}\n")
            if tree is not None:
                forms = tree.forms or tuple(f"w{i + 1}" for i in range(tree.length))
                for i in range(tree.length - 1):
                    head = tree.heads[i]
                    head = 0 if head == tree.root else head + 1
                    f.write(f"{i + 1}\t{forms[i]}\t{head}\t{tree.labels[i]}\n")
            f.write("\n")
    os.replace(temp_file, path)
