import json

import pytest

from nmtrnng.config import DecodeConfig, ModelConfig, RunConfig, load_config
from nmtrnng.exceptions import ConfigError
from nmtrnng.utils import SystemInfo, calculate_checksum, logger, parse_record


def test_overrides_are_parsed_as_json_when_possible():
    config = load_config(overrides=["train.learning_rate=0.5", "train.ablation=[\"without_stack\"]",
                                     "paths.output_dir=/tmp/run", "decode.joint=true"])
    assert config.train.learning_rate == 0.5
    assert config.train.ablation == ["without_stack"]
    assert config.paths.output_dir == "/tmp/run"
    assert config.decode.joint is True


@pytest.mark.parametrize("override", ["train.unknown=1", "nosection.key=1", "train.learning_rate",
                                      "learning_rate=1", "train.batch_size=0"])
def test_bad_overrides_are_refused(override):
    with pytest.raises(ConfigError):
        load_config(overrides=[override])


def test_saved_config_reloads_to_the_same_run(tmp_path):
    config = load_config(overrides=["train.hidden_dim=32", "eval.bootstrap_resamples=200"])
    path = str(tmp_path / "run.json")
    config.save(path)
    with open(path, 'r', encoding='utf-8') as f:
        data = json.load(f)
    assert data["version"] == "1.0"
    assert load_config(path) == config


def test_unreadable_config_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding='utf-8')
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_model_config_round_trip_and_validation():
    config = ModelConfig(10, 12, 3, ablation=("without_stack", "without_buffer"))
    assert config.ablation == ("without_buffer", "without_stack")
    assert config.num_actions == 7
    assert ModelConfig.from_dict(config.to_dict()) == config
    with pytest.raises(ConfigError):
        ModelConfig(10, 12, 3, variant="rnng")
    with pytest.raises(ConfigError):
        ModelConfig(0, 12, 3)


def test_default_decode_length_bound():
    assert DecodeConfig().max_length_for(7) == 24
    assert DecodeConfig(max_length=5).max_length_for(7) == 5


def test_records_are_key_value_lines(tmp_path):
    path = str(tmp_path / "run.records")
    logger.set_records_file(path)
    try:
        line = logger.record("epoch", epoch=3, train_loss=0.25, lr=1.0)
    finally:
        logger.set_records_file(None)
    assert line == "event=epoch epoch=3 train_loss=0.25 lr=1.0"
    with open(path, 'r', encoding='utf-8') as f:
        assert parse_record(f.read()) == {"event": "epoch", "epoch": "3", "train_loss": "0.25", "lr": "1.0"}


def test_log_file_receives_debug_messages(tmp_path):
    path = tmp_path / "command.log"
    handler = logger.attach_file(str(path))
    try:
        logger.debug("tape built")
    finally:
        logger.detach(handler)
    assert "DEBUG - tape built" in path.read_text(encoding='utf-8')


def test_hashes_and_host_facts():
    assert calculate_checksum(b"abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
    assert len(calculate_checksum(b"")) == 64
    info = SystemInfo().dump_system_info()
    assert info["cpu_count"] >= 1
    assert SystemInfo().process_memory_mb() > 0
