import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'src'))

from nmtrnng.config import ModelConfig  # noqa: E402
from nmtrnng.data.conll import random_projective_tree  # noqa: E402
from nmtrnng.data.corpus import SentencePair  # noqa: E402
from nmtrnng.data.oracle import tree_to_actions  # noqa: E402
from nmtrnng.model.hybrid import NmtRnng  # noqa: E402
from nmtrnng.training.trainer import init_parameters  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running overfit checks")


def tiny_config(**changes):
    values = dict(source_vocab_size=7, target_vocab_size=6, num_labels=2,
                  word_dim=4, action_dim=3, hidden_dim=5)
    values.update(changes)
    return ModelConfig(**values)


def random_model(config, seed=0, scale=0.5):
    """Model whose every slot, output layers included, is drawn uniformly"""
    store = init_parameters(config, seed)
    rng = np.random.default_rng(seed + 1)
    for name in store.names():
        store.value(name)[...] = rng.uniform(-scale, scale, size=store.value(name).shape)
    return NmtRnng(config, store)


def random_pair(rng, config, index=0, max_words=4):
    """Random source, target and gold actions; both sides EOS-terminated"""
    source = [int(w) for w in rng.integers(2, config.source_vocab_size, size=int(rng.integers(1, max_words)))]
    target = [int(w) for w in rng.integers(2, config.target_vocab_size, size=int(rng.integers(1, max_words)))]
    source.append(config.eos_id)
    target.append(config.eos_id)
    actions = ()
    if config.has_rnng:
        actions = tuple(tree_to_actions(random_projective_tree(rng, len(target), config.num_labels)))
    return SentencePair(source, target, actions, index)


@pytest.fixture
def config():
    return tiny_config()


@pytest.fixture
def model(config):
    return random_model(config)


@pytest.fixture
def nmt_model():
    return random_model(tiny_config(variant="nmt"))


@pytest.fixture
def toy_pairs(config):
    rng = np.random.default_rng(7)
    return [random_pair(rng, config, index) for index in range(4)]


TOY_SOURCES = ["a b", "b c", "c a", "a c"]
TOY_TARGETS = ["x y", "y z", "z x", "x z"]


def write_toy_corpus(directory, prefix="train"):
    """Parallel text plus parses: the first target word depends on the second"""
    paths = {}
    for side, lines in (("src", TOY_SOURCES), ("tgt", TOY_TARGETS)):
        path = os.path.join(directory, f"{prefix}.{side}")
        with open(path, 'w', encoding='utf-8') as f:
            f.writelines(line + '\n' for line in lines)
        paths[side] = path
    conll = os.path.join(directory, f"{prefix}.conll")
    with open(conll, 'w', encoding='utf-8') as f:
        for line in TOY_TARGETS:
            first, second = line.split()
            f.write(f"1\t{first}\t2\tdet\n2\t{second}\t0\troot\n\n")
    paths["conll"] = conll
    return paths


@pytest.fixture
def toy_corpus(tmp_path):
    return write_toy_corpus(str(tmp_path))
