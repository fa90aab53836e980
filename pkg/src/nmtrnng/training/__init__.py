from .checkpoint import Checkpoint, check_vocab_hashes, load_checkpoint, read_header, save_checkpoint
from .trainer import (BEST_CHECKPOINT, LAST_CHECKPOINT, Trainer, build_model, clip_gradients,
                      configure_ablation, global_norm, init_parameters, lr_schedule_step, sgd_step)

__all__ = [
    'Checkpoint', 'check_vocab_hashes', 'load_checkpoint', 'read_header', 'save_checkpoint',
    'BEST_CHECKPOINT', 'LAST_CHECKPOINT', 'Trainer', 'build_model', 'clip_gradients',
    'configure_ablation', 'global_norm', 'init_parameters', 'lr_schedule_step', 'sgd_step',
]
