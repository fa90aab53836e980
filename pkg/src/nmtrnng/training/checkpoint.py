"""Checkpoint container.

Layout: MAGIC | u32 big-endian header size | JSON header | tensor payload.
The payload is every parameter slot's raw little-endian bytes in slot order;
the header lists name, dtype, shape, offset and size for each slot plus a
sha256 checksum of the payload.
"""
import json
import os
from dataclasses import dataclass, field

import numpy as np

from ..config import CONFIG_VERSION, ModelConfig
from ..core.parameters import ParameterStore
from ..exceptions import CheckpointError
from ..utils.integrity import calculate_checksum
from ..utils.logger import logger

MAGIC = b"NMTRNNG\0"
MAX_HEADER_SIZE = 16 * 1024 * 1024


@dataclass
class Checkpoint:
    store: ParameterStore
    model_config: ModelConfig
    epoch: int = 0
    learning_rate: float = 1.0
    dev_perplexity: float = None
    ppl_history: list = field(default_factory=list)
    best_perplexity: float = None
    best_epoch: int = None
    seed: int = 0
    vocab_hashes: dict = field(default_factory=dict)


def _payload(store):
    entries, chunks, offset = [], [], 0
    for name, value in store.items():
        data = np.ascontiguousarray(value, dtype=value.dtype.newbyteorder('<')).tobytes()
        entries.append({
            "name": name,
            "dtype": value.dtype.name,
            "shape": list(value.shape),
            "offset": offset,
            "nbytes": len(data),
        })
        chunks.append(data)
        offset += len(data)
    return entries, b''.join(chunks)


def save_checkpoint(path, checkpoint):
    """
    Write a checkpoint atomically (temp file + os.replace)

    Args:
        path (str): Destination
        checkpoint (Checkpoint): What to store
    """
    entries, payload = _payload(checkpoint.store)
    header = {
        "version": CONFIG_VERSION,
        "epoch": checkpoint.epoch,
        "learning_rate": checkpoint.learning_rate,
        "dev_perplexity": checkpoint.dev_perplexity,
        "ppl_history": list(checkpoint.ppl_history),
        "best_perplexity": checkpoint.best_perplexity,
        "best_epoch": checkpoint.best_epoch,
        "seed": checkpoint.seed,
        "model_config": checkpoint.model_config.to_dict(),
        "vocab_hashes": dict(checkpoint.vocab_hashes),
        "tensors": entries,
        "payload_checksum": calculate_checksum(payload),
    }
    header_bytes = json.dumps(header, sort_keys=True).encode('utf-8')

    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    temp_file = path + ".temp"
    with open(temp_file, 'wb') as f:
        f.write(MAGIC)
        f.write(len(header_bytes).to_bytes(4, byteorder='big'))
        f.write(header_bytes)
        f.write(payload)
    os.replace(temp_file, path)
    logger.debug(f"Saved checkpoint {path} (epoch {checkpoint.epoch}, {len(payload)} payload bytes)")


def read_header(path):
    """Header dict and payload bytes of a checkpoint file"""
    if not os.path.exists(path):
        raise CheckpointError(f"Checkpoint not found: {path}")
    with open(path, 'rb') as f:
        magic = f.read(len(MAGIC))
        if magic != MAGIC:
            raise CheckpointError(f"{path} is not a checkpoint (bad magic {magic!r})")
        size_bytes = f.read(4)
        if len(size_bytes) < 4:
            raise CheckpointError(f"{path}: truncated header size")
        header_size = int.from_bytes(size_bytes, byteorder='big')
        if header_size <= 0 or header_size > MAX_HEADER_SIZE:
            raise CheckpointError(f"{path}: invalid header size {header_size}")
        header_bytes = f.read(header_size)
        if len(header_bytes) < header_size:
            raise CheckpointError(f"{path}: expected {header_size} header bytes, got {len(header_bytes)}")
        try:
            header = json.loads(header_bytes.decode('utf-8'))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise CheckpointError(f"{path}: unreadable header: {e}") from e
        payload = f.read()
    return header, payload


def load_checkpoint(path):
    """
    Read a checkpoint and verify its checksum and tensor table

    Returns:
        Checkpoint: With a fresh ParameterStore holding bit-identical values

    Raises:
        CheckpointError: If the file is damaged or inconsistent
    """
    header, payload = read_header(path)
    if calculate_checksum(payload) != header.get("payload_checksum"):
        raise CheckpointError(f"{path}: payload checksum mismatch")

    model_config = ModelConfig.from_dict(header["model_config"])
    store = ParameterStore(model_config.dtype)
    for entry in header["tensors"]:
        end = entry["offset"] + entry["nbytes"]
        if end > len(payload):
            raise CheckpointError(f"{path}: slot '{entry['name']}' runs past the payload")
        dtype = np.dtype(entry["dtype"]).newbyteorder('<')
        value = np.frombuffer(payload[entry["offset"]:end], dtype=dtype)
        expected = int(np.prod(entry["shape"], dtype=np.int64))
        if value.size != expected:
            raise CheckpointError(f"{path}: slot '{entry['name']}' holds {value.size} values, shape says {expected}")
        store.add(entry["name"], value.reshape(entry["shape"]).astype(entry["dtype"]))

    return Checkpoint(
        store=store,
        model_config=model_config,
        epoch=header["epoch"],
        learning_rate=header["learning_rate"],
        dev_perplexity=header.get("dev_perplexity"),
        ppl_history=list(header.get("ppl_history", [])),
        best_perplexity=header.get("best_perplexity"),
        best_epoch=header.get("best_epoch"),
        seed=header.get("seed", 0),
        vocab_hashes=dict(header.get("vocab_hashes", {})),
    )


def check_vocab_hashes(checkpoint, vocab_hashes):
    """
    Refuse a checkpoint trained on different vocabularies

    Raises:
        CheckpointError: Naming every vocabulary whose hash differs
    """
    mismatched = [name for name, digest in vocab_hashes.items()
                  if checkpoint.vocab_hashes.get(name) != digest]
    if mismatched:
        raise CheckpointError(f"Checkpoint was trained with different vocabularies: {', '.join(sorted(mismatched))}; "
                              f"re-run preprocess or point paths.data_dir at the matching files")
