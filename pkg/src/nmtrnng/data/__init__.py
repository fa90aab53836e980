from .conll import ROOT, DepTree, is_projective, random_projective_tree, read_conll, write_conll
from .corpus import (FilterReport, RawPair, SentencePair, encode_pairs, filter_corpus, load_pairs,
                     read_lines, read_parallel, save_pairs)
from .oracle import SymbolicState, actions_to_tree, tree_to_actions
from .vocabulary import EOS_ID, UNK_ID, ActionVocabulary, Vocabulary, build_action_vocab, build_vocab

__all__ = [
    'ROOT', 'DepTree', 'is_projective', 'random_projective_tree', 'read_conll', 'write_conll',
    'FilterReport', 'RawPair', 'SentencePair', 'encode_pairs', 'filter_corpus', 'load_pairs',
    'read_lines', 'read_parallel', 'save_pairs', 'SymbolicState', 'actions_to_tree',
    'tree_to_actions', 'EOS_ID', 'UNK_ID', 'ActionVocabulary', 'Vocabulary', 'build_action_vocab',
    'build_vocab',
]
