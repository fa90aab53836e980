"""Command-line surface: preprocess, train, translate, eval and gradcheck."""
import os
from contextlib import contextmanager
from dataclasses import replace

import click
import numpy as np

from ..config import ModelConfig, load_config
from ..core.gradcheck import grad_check
from ..core.tensor import add_n
from ..data.conll import random_projective_tree, read_conll, write_conll
from ..data.corpus import encode_pairs, filter_corpus, load_pairs, read_lines, read_parallel, save_pairs
from ..data.oracle import tree_to_actions
from ..data.vocabulary import EOS, ActionVocabulary, Vocabulary, build_action_vocab, build_vocab
from ..evaluation.report import evaluate_files
from ..exceptions import ConfigError, NmtRnngError, ValidationFailure
from ..inference.decoder import Translator
from ..model.hybrid import NmtRnng
from ..training.checkpoint import check_vocab_hashes, load_checkpoint
from ..training.trainer import BEST_CHECKPOINT, LAST_CHECKPOINT, Trainer, build_model, init_parameters
from ..utils.logger import logger

SOURCE_VOCAB = "vocab.src.tsv"
TARGET_VOCAB = "vocab.tgt.tsv"
ACTION_VOCAB = "vocab.act.tsv"
TRAIN_PAIRS = "train.jsonl"
DEV_PAIRS = "dev.jsonl"
STATS = "stats.tsv"
EFFECTIVE_CONFIG = "effective_config.json"

GRADCHECK_TOLERANCE = 1e-4


@contextmanager
def command_session(config, command, append_records=False):
    """
    Per-command log file, records file and effective config in the output directory
    """
    output_dir = config.paths.output_dir
    os.makedirs(output_dir, exist_ok=True)
    handler = logger.attach_file(os.path.join(output_dir, f"{command}.log"))
    logger.set_records_file(os.path.join(output_dir, f"{command}.records"), append=append_records)
    config.save(os.path.join(output_dir, EFFECTIVE_CONFIG))
    try:
        yield output_dir
    except NmtRnngError as e:
        logger.error(f"Failed to {command}: {e}")
        raise
    finally:
        logger.set_records_file(None)
        logger.detach(handler)


def _data_dir(config):
    return config.paths.data_dir or config.paths.output_dir


def _load_vocabularies(config, need_actions):
    data_dir = _data_dir(config)
    source_vocab = Vocabulary.load(os.path.join(data_dir, SOURCE_VOCAB))
    target_vocab = Vocabulary.load(os.path.join(data_dir, TARGET_VOCAB))
    action_path = os.path.join(data_dir, ACTION_VOCAB)
    action_vocab = None
    if need_actions or os.path.exists(action_path):
        action_vocab = ActionVocabulary.load(action_path)
    return source_vocab, target_vocab, action_vocab


def _vocab_hashes(source_vocab, target_vocab, action_vocab=None):
    hashes = {"source": source_vocab.content_hash(), "target": target_vocab.content_hash()}
    if action_vocab is not None:
        hashes["action"] = action_vocab.content_hash()
    return hashes


def _read_split(source_path, target_path, parses_path, max_length):
    trees = read_conll(parses_path) if parses_path else None
    pairs = read_parallel(source_path, target_path, trees)
    return filter_corpus(pairs, max_length)


@click.group()
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False),
              help='JSON run configuration')
@click.option('--set', 'overrides', multiple=True, metavar='SECTION.KEY=VALUE',
              help='Override one configuration value; repeatable')
@click.option('--output-dir', help='Shortcut for --set paths.output_dir=...')
@click.pass_context
def cli(ctx, config_path, overrides, output_dir):
    """Joint neural translation and dependency parsing"""
    overrides = list(overrides)
    if output_dir:
        overrides.append(f"paths.output_dir={output_dir}")
    ctx.obj = load_config(config_path, overrides)


@cli.command()
@click.pass_obj
def preprocess(config):
    """Build vocabularies, gold actions and the encoded corpus"""
    paths = config.paths
    with_parses = config.train.variant == "nmt+rnng" or paths.train_parses is not None
    paths.require('train_source', 'train_target', *(['train_parses'] if with_parses else []))

    with command_session(config, 'preprocess') as output_dir:
        data_dir = paths.data_dir or output_dir
        max_length = config.preprocess.max_length
        train_raw, train_report = _read_split(paths.train_source, paths.train_target,
                                              paths.train_parses if with_parses else None, max_length)
        dev_raw, dev_report = [], None
        if paths.dev_source and paths.dev_target:
            paths.require('dev_source', 'dev_target', *(['dev_parses'] if with_parses else []))
            dev_raw, dev_report = _read_split(paths.dev_source, paths.dev_target,
                                              paths.dev_parses if with_parses else None, max_length)

        source_vocab = build_vocab([pair.source for pair in train_raw], config.preprocess.source_min_frequency)
        target_vocab = build_vocab([pair.target for pair in train_raw], config.preprocess.target_min_frequency)
        action_vocab = build_action_vocab([pair.tree for pair in train_raw]) if with_parses else None

        train_pairs = encode_pairs(train_raw, source_vocab, target_vocab, action_vocab, train_report)
        dev_pairs = encode_pairs(dev_raw, source_vocab, target_vocab, action_vocab, dev_report)

        source_vocab.save(os.path.join(data_dir, SOURCE_VOCAB))
        target_vocab.save(os.path.join(data_dir, TARGET_VOCAB))
        if action_vocab is not None:
            action_vocab.count_actions(pair.actions for pair in train_pairs)
            action_vocab.save(os.path.join(data_dir, ACTION_VOCAB))
        save_pairs(os.path.join(data_dir, TRAIN_PAIRS), train_pairs)
        save_pairs(os.path.join(data_dir, DEV_PAIRS), dev_pairs)

        stats = {
            'train': len(train_pairs),
            'dev': len(dev_pairs),
            'voc_src': len(source_vocab),
            'voc_tgt': len(target_vocab),
            'voc_act': len(action_vocab) if action_vocab is not None else 0,
        }
        with open(os.path.join(data_dir, STATS), 'w', encoding='utf-8') as f:
            f.write('\t'.join(stats) + '\n')
            f.write('\t'.join(str(value) for value in stats.values()) + '\n')

        reports = [r for r in (train_report, dev_report) if r is not None]
        logger.record("preprocess", **stats, non_projective=train_report.non_projective,
                      too_long=train_report.too_long, empty=train_report.empty,
                      unknown_label=sum(r.unknown_label for r in reports))
        click.echo('\t'.join(f"{key}={value}" for key, value in stats.items()))
        if train_report.non_projective:
            click.echo(f"Skipped {train_report.non_projective} non-projective training parse(s)")
        if dev_report is not None and dev_report.unknown_label:
            click.echo(f"Skipped {dev_report.unknown_label} dev parse(s) with labels unseen in training")


@cli.command()
@click.option('--resume', is_flag=True, help='Continue from last.ckpt in the output directory')
@click.pass_obj
def train(config, resume):
    """Train with SGD and dev-perplexity learning-rate halving"""
    with command_session(config, 'train', append_records=resume) as output_dir:
        data_dir = _data_dir(config)
        has_rnng = config.train.variant == "nmt+rnng"
        source_vocab, target_vocab, action_vocab = _load_vocabularies(config, need_actions=has_rnng)
        train_pairs = load_pairs(os.path.join(data_dir, TRAIN_PAIRS))
        dev_path = os.path.join(data_dir, DEV_PAIRS)
        dev_pairs = load_pairs(dev_path) if os.path.exists(dev_path) else []

        model_config = config.train.model_config(
            len(source_vocab), len(target_vocab), action_vocab.num_labels if action_vocab else 0)
        model = build_model(model_config, config.train.seed)
        trainer = Trainer(model, train_pairs, dev_pairs, config.train, output_dir,
                          _vocab_hashes(source_vocab, target_vocab, action_vocab))
        history = trainer.fit(resume=resume)

        if trainer.best_epoch is not None:
            click.echo(f"Best dev perplexity {history[trainer.best_epoch - 1]:.4f} at epoch {trainer.best_epoch}")
        click.echo(f"Checkpoints written to {output_dir}")


@cli.command()
@click.option('--input', 'input_path', type=click.Path(exists=True, dir_okay=False),
              help='Tokenized source sentences, one per line')
@click.option('--output', 'output_path', help='Where translations are written')
@click.option('--checkpoint', 'checkpoint_path', type=click.Path(exists=True, dir_okay=False))
@click.option('--joint/--beam', default=None, help='Greedy translate-and-parse instead of beam search')
@click.option('--parse-beam/--no-parse-beam', default=None,
              help='Beam search translation, then a greedy parse of each output')
@click.option('--beam-width', type=int)
@click.option('--workers', type=int)
@click.pass_obj
def translate(config, input_path, output_path, checkpoint_path, joint, parse_beam, beam_width, workers):
    """Translate a file, and in joint or parse-beam mode also write its parses"""
    paths = replace(config.paths, input=input_path or config.paths.input,
                    output=output_path or config.paths.output,
                    checkpoint=checkpoint_path or config.paths.checkpoint)
    decode = config.decode
    if joint:
        parse_beam = False
    elif parse_beam:
        joint = False
    decode = replace(decode,
                     joint=decode.joint if joint is None else joint,
                     parse_beam=decode.parse_beam if parse_beam is None else parse_beam,
                     beam_width=beam_width or decode.beam_width,
                     workers=workers or decode.workers)
    config = replace(config, paths=paths, decode=decode)
    if not paths.checkpoint:
        best = os.path.join(paths.output_dir, BEST_CHECKPOINT)
        last = os.path.join(paths.output_dir, LAST_CHECKPOINT)
        paths = replace(paths, checkpoint=best if os.path.exists(best) else last)
        config = replace(config, paths=paths)
    paths.require('input', 'checkpoint')
    if not paths.output:
        raise ConfigError("paths.output is required")

    with command_session(config, 'translate'):
        checkpoint = load_checkpoint(paths.checkpoint)
        parsing = decode.joint or decode.parse_beam
        source_vocab, target_vocab, action_vocab = _load_vocabularies(config, need_actions=parsing)
        check_vocab_hashes(checkpoint, _vocab_hashes(source_vocab, target_vocab, action_vocab))
        model = NmtRnng(checkpoint.model_config, checkpoint.store)

        sources = [source_vocab.encode(tokens) for tokens in read_lines(paths.input)]
        translator = Translator(model, decode)
        results = translator.translate_all(sources, decode.workers)

        lines, trees, unfinished = [], [], 0
        for result in results:
            tokens = target_vocab.decode(list(result.tokens))
            lines.append(' '.join(tokens))
            if parsing:
                tree = None
                if not result.partial:
                    tree = replace(result.tree.with_labels(action_vocab.label), forms=tuple(tokens) + (EOS,))
                trees.append(tree)
                unfinished += result.partial
            else:
                unfinished += not result.finished

        os.makedirs(os.path.dirname(os.path.abspath(paths.output)), exist_ok=True)
        with open(paths.output, 'w', encoding='utf-8') as f:
            f.writelines(line + '\n' for line in lines)
        if parsing:
            parse_output = paths.parse_output or paths.output + ".conll"
            write_conll(parse_output, trees)
            click.echo(f"Parses written to {parse_output}")

        logger.record("translate", sentences=len(lines), unfinished=unfinished, joint=decode.joint,
                      parse_beam=decode.parse_beam, beam_width=decode.beam_width)
        click.echo(f"Translated {len(lines)} sentence(s) to {paths.output}")


@cli.command(name='eval')
@click.argument('hypothesis', type=click.Path(exists=True, dir_okay=False))
@click.argument('reference', type=click.Path(exists=True, dir_okay=False))
@click.option('--hyp2', type=click.Path(exists=True, dir_okay=False),
              help='Second system output for paired bootstrap significance')
@click.option('--resamples', type=int)
@click.pass_obj
def eval_command(config, hypothesis, reference, hyp2, resamples):
    """Score a translation file with BLEU and RIBES"""
    settings = config.eval
    with command_session(config, 'eval'):
        report = evaluate_files(hypothesis, reference, hyp2, metrics=tuple(settings.metrics),
                                resamples=resamples or settings.bootstrap_resamples, seed=settings.seed)
        logger.record("eval", sentences=report.sentences, **report.values())
        click.echo(report.to_text())


def toy_problem(config, seed, pairs=2, max_length=4):
    """
    A tiny random model and corpus for gradient checking

    Dimensions stay at most 8 so every parameter entry can be perturbed.
    """
    rng = np.random.default_rng(seed)
    model_config = ModelConfig(
        source_vocab_size=7, target_vocab_size=6, num_labels=2,
        word_dim=min(config.train.word_dim, 4), action_dim=min(config.train.action_dim, 3),
        hidden_dim=min(config.train.hidden_dim, 5), variant=config.train.variant,
        ablation=tuple(config.train.ablation), tie_target_embeddings=config.train.tie_target_embeddings,
    )
    store = init_parameters(model_config, seed)
    for name in store.names():
        store.value(name)[...] = rng.uniform(-0.5, 0.5, size=store.value(name).shape)
    model = NmtRnng(model_config, store)

    problems = []
    for _ in range(pairs):
        source = [int(w) for w in rng.integers(2, model_config.source_vocab_size, size=rng.integers(1, max_length))]
        target = [int(w) for w in rng.integers(2, model_config.target_vocab_size, size=rng.integers(1, max_length))]
        source.append(model_config.eos_id)
        target.append(model_config.eos_id)
        actions = ()
        if model_config.has_rnng:
            actions = tuple(tree_to_actions(random_projective_tree(rng, len(target), model_config.num_labels)))
        problems.append((source, target, actions))
    return model, problems


def gradcheck_losses(model, problems):
    """Named loss functions: the joint loss and, for the parser model, its two halves"""
    def loss(include_words, include_actions):
        def loss_fn(tape):
            return add_n([model.joint_nll(tape, source, target, actions, include_words, include_actions)
                          for source, target, actions in problems])
        return loss_fn

    if not model.config.has_rnng:
        return {"words": loss(True, False)}
    return {"joint": loss(True, True), "words": loss(True, False), "actions": loss(False, True)}


@cli.command()
@click.option('--epsilon', type=float, default=1e-5, show_default=True)
@click.option('--tolerance', type=float, default=GRADCHECK_TOLERANCE, show_default=True)
@click.option('--max-entries', type=int, help='Sample at most this many entries per slot')
@click.pass_obj
def gradcheck(config, epsilon, tolerance, max_entries):
    """Compare analytic and finite-difference gradients on a tiny model"""
    with command_session(config, 'gradcheck'):
        model, problems = toy_problem(config, config.train.seed)
        failures = []
        for name, loss_fn in gradcheck_losses(model, problems).items():
            report = grad_check(loss_fn, model.store, epsilon=epsilon, max_entries=max_entries,
                                seed=config.train.seed)
            logger.record("gradcheck", loss=name, max_error=report.max_error, worst_slot=report.worst_slot,
                          entries=report.checked_entries)
            click.echo(f"{name:8s} max relative error {report.max_error:.3e} "
                       f"(worst slot {report.worst_slot} at {report.worst_index})")
            if not report.passed(tolerance):
                failures.append(f"{name} loss: {report.max_error:.3e} in '{report.worst_slot}'")
        if failures:
            raise ValidationFailure(f"Gradient check above {tolerance:g}: {'; '.join(failures)}")
        click.echo("Gradient check passed")
