"""SGD training with clipping and dev-perplexity learning-rate halving."""
import math
import os
from dataclasses import replace

import numpy as np

from ..config import ABLATION_FLAGS
from ..core.parameters import ParameterStore
from ..evaluation.perplexity import perplexities
from ..exceptions import ConfigError, DataError, NonFiniteError
from ..model.hybrid import NmtRnng, parameter_specs
from ..utils.logger import logger
from ..utils.system_info import SystemInfo
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint

INIT_RANGE = 0.1
BEST_CHECKPOINT = "best.ckpt"
LAST_CHECKPOINT = "last.ckpt"


def init_parameters(config, seed):
    """
    Fresh parameters for a model configuration

    Weights are uniform in [-0.1, 0.1]; biases are zero except LSTM forget
    gates, which start at 1; the word and action softmax weights start at 0.
    Slots are filled in parameter_specs order from one seeded generator.

    Returns:
        ParameterStore: The parameters
    """
    rng = np.random.default_rng(seed)
    store = ParameterStore(config.dtype)
    for name, shape, kind in parameter_specs(config):
        if kind == "weight":
            value = rng.uniform(-INIT_RANGE, INIT_RANGE, size=shape)
        elif kind == "lstm_bias":
            value = np.zeros(shape)
            d = shape[0] // 4
            value[d:2 * d] = 1.0
        elif kind in ("bias", "output"):
            value = np.zeros(shape)
        else:
            raise ConfigError(f"Unknown initialization kind '{kind}' for slot '{name}'")
        store.add(name, value)
    logger.debug(f"Initialized {len(store)} slots, {store.num_parameters()} parameters (seed {seed})")
    return store


def global_norm(store):
    return math.sqrt(math.fsum(float(np.sum(store.grad(name) ** 2)) for name in store.names()))


def clip_gradients(store, threshold):
    """
    Rescale all gradients together when their global L2 norm exceeds threshold

    Returns:
        float: The norm before clipping

    Raises:
        NonFiniteError: Naming the first slot with a nan or infinite gradient
    """
    for name in store.names():
        if not np.all(np.isfinite(store.grad(name))):
            raise NonFiniteError("non-finite gradient", slot=name)
    norm = global_norm(store)
    if norm > threshold:
        scale = threshold / norm
        for name in store.names():
            store.grad(name)[...] *= scale
    return norm


def sgd_step(store, learning_rate):
    for name in store.names():
        store.value(name)[...] -= learning_rate * store.grad(name)


def lr_schedule_step(history, learning_rate, checkpoints):
    """
    Halve the learning rate and fall back to the best model when dev perplexity rises

    Args:
        history (list): Dev perplexity per completed epoch, epoch 1 first
        learning_rate (float): Current learning rate
        checkpoints (dict): Epoch number -> saved parameters

    Returns:
        tuple: (new learning rate, parameters to reload or None)
    """
    if not history:
        raise DataError("lr_schedule_step needs at least one completed epoch")
    if len(history) < 2:
        return learning_rate, None
    earlier = history[:-1]
    best_epoch = int(np.argmin(earlier)) + 1
    if history[-1] > earlier[best_epoch - 1]:
        return learning_rate / 2.0, checkpoints.get(best_epoch)
    return learning_rate, None


def configure_ablation(config, flags):
    """
    Model configuration with the given components removed from the action model

    Raises:
        ConfigError: If a flag is unknown
    """
    unknown = [flag for flag in flags if flag not in ABLATION_FLAGS]
    if unknown:
        raise ConfigError(f"Unknown ablation flag(s) {unknown}, expected a subset of {ABLATION_FLAGS}")
    return replace(config, ablation=tuple(flags))


class Trainer:
    def __init__(self, model, train_pairs, dev_pairs, train_config, output_dir=None, vocab_hashes=None):
        """
        Initialize the trainer

        Args:
            model (NmtRnng): Model whose store is updated in place
            train_pairs (list): SentencePairs to train on
            dev_pairs (list): SentencePairs for the learning-rate schedule
            train_config (TrainConfig): Optimization settings
            output_dir (str, optional): Where checkpoints and records go
            vocab_hashes (dict, optional): Stored in checkpoints for decoding checks
        """
        if not train_pairs:
            raise DataError("No training pairs")
        self.model = model
        self.train_pairs = list(train_pairs)
        self.dev_pairs = list(dev_pairs or [])
        self.config = train_config
        self.output_dir = output_dir
        self.vocab_hashes = dict(vocab_hashes or {})
        self.learning_rate = train_config.learning_rate
        self.clip_threshold = train_config.effective_clip_threshold
        self.epoch = 0
        self.ppl_history = []
        self.best_epoch = None
        self.best_state = None
        self.system_info = SystemInfo()

    @property
    def schedule_mode(self):
        """Dev perplexity driving the schedule: joint for the parser model, words otherwise"""
        return "joint" if self.model.config.has_rnng else "words"

    def batches(self, epoch):
        """Minibatches of epoch; the order depends only on (seed, epoch)"""
        rng = np.random.default_rng([self.config.seed, epoch])
        order = rng.permutation(len(self.train_pairs))
        size = self.config.batch_size
        return [[self.train_pairs[i] for i in order[start:start + size]] for start in range(0, len(order), size)]

    def train_batch(self, batch):
        """
        One SGD update on the summed loss of a batch

        Returns:
            float: Summed loss of the batch before the update
        """
        store = self.model.store
        store.zero_grad()
        losses = []
        for pair in batch:
            tape = self.model.tape()
            loss = self.model.joint_nll(tape, pair.source, pair.target, pair.actions, sentence=pair.index)
            tape.backward(loss)
            tape.accumulate()
            losses.append(float(loss.value))
        clip_gradients(store, self.clip_threshold)
        sgd_step(store, self.learning_rate)
        return math.fsum(losses)

    def train_epoch(self, epoch):
        """
        Run every minibatch of an epoch

        Returns:
            float: Mean per-sentence training loss
        """
        total = [self.train_batch(batch) for batch in self.batches(epoch)]
        return math.fsum(total) / len(self.train_pairs)

    def evaluate_dev(self):
        if not self.dev_pairs:
            return {}
        return perplexities(self.model, self.dev_pairs)

    def _path(self, name):
        return os.path.join(self.output_dir, name) if self.output_dir else None

    def _checkpoint(self, dev_perplexity=None):
        return Checkpoint(
            store=self.model.store,
            model_config=self.model.config,
            epoch=self.epoch,
            learning_rate=self.learning_rate,
            dev_perplexity=dev_perplexity,
            ppl_history=list(self.ppl_history),
            best_perplexity=self.ppl_history[self.best_epoch - 1] if self.best_epoch else None,
            best_epoch=self.best_epoch,
            seed=self.config.seed,
            vocab_hashes=self.vocab_hashes,
        )

    def resume(self):
        """
        Continue from last.ckpt in the output directory

        Returns:
            bool: True if a checkpoint was loaded
        """
        path = self._path(LAST_CHECKPOINT)
        if path is None or not os.path.exists(path):
            logger.warning("No checkpoint to resume from; starting fresh")
            return False
        last = load_checkpoint(path)
        self.model.store.load_state_dict(last.store.state_dict())
        self.epoch = last.epoch
        self.learning_rate = last.learning_rate
        self.ppl_history = list(last.ppl_history)
        self.best_epoch = last.best_epoch
        best_path = self._path(BEST_CHECKPOINT)
        if self.best_epoch is not None and os.path.exists(best_path):
            self.best_state = load_checkpoint(best_path).store.state_dict()
        logger.info(f"Resumed from {path} after epoch {self.epoch} (lr {self.learning_rate})")
        return True

    def fit(self, max_epochs=None, resume=False):
        """
        Train for max_epochs epochs in total

        Each epoch ends with a dev evaluation, the learning-rate schedule and
        checkpoint writes (best.ckpt on improvement, last.ckpt always).

        Returns:
            list: Dev perplexity history driving the schedule
        """
        max_epochs = max_epochs or self.config.max_epochs
        if resume:
            self.resume()
        if self.epoch == 0:
            logger.info(f"Host: {self.system_info.dump_system_info()}")
            logger.record("start", parameters=self.model.store.num_parameters(),
                          train_pairs=len(self.train_pairs), dev_pairs=len(self.dev_pairs),
                          lr=float(self.learning_rate), clip=float(self.clip_threshold))
        if not self.dev_pairs:
            logger.warning("No development pairs; the learning rate stays fixed")

        while self.epoch < max_epochs:
            self.epoch += 1
            train_loss = self.train_epoch(self.epoch)
            dev = self.evaluate_dev()
            fields = {"epoch": self.epoch, "train_loss": train_loss, "lr": float(self.learning_rate)}
            fields.update({f"dev_ppl_{mode}": value for mode, value in dev.items()})
            logger.record("epoch", **fields)
            logger.debug(f"Process memory after epoch {self.epoch}: {self.system_info.process_memory_mb():.1f} MB")

            if dev:
                current = dev[self.schedule_mode]
                self.ppl_history.append(current)
                improved = self.best_epoch is None or current < self.ppl_history[self.best_epoch - 1]
                if improved:
                    self.best_epoch = self.epoch
                    self.best_state = self.model.store.state_dict()
                    if self.output_dir:
                        save_checkpoint(self._path(BEST_CHECKPOINT), self._checkpoint(current))
                new_lr, reload_state = lr_schedule_step(self.ppl_history, self.learning_rate,
                                                        {self.best_epoch: self.best_state})
                if new_lr != self.learning_rate:
                    logger.record("lr_halved", epoch=self.epoch, lr=float(new_lr), reload_epoch=self.best_epoch)
                    self.learning_rate = new_lr
                if reload_state is not None:
                    self.model.store.load_state_dict(reload_state)
            if self.output_dir:
                save_checkpoint(self._path(LAST_CHECKPOINT), self._checkpoint(dev.get(self.schedule_mode)))
        return list(self.ppl_history)


def build_model(model_config, seed):
    return NmtRnng(model_config, init_parameters(model_config, seed))
