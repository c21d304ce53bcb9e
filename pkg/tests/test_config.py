import json
import logging

import numpy as np
import pytest
import yaml
from pydantic import ValidationError

from src.core.cli_args import CLIArgs
from src.core.config import (
    DEFAULT_TOWER_DIMENSION_CAP,
    AppConfig,
    Config,
    ExecutionMode,
    ExperimentSettings,
    ResourceCaps,
    load_structured_file,
)
from src.core.exceptions import ConfigFileNotFoundError, InvalidFileFormatError, InvalidInputError
from src.core.logs import get_logger, timed, update_loggers_level
from src.core.seeding import derive_rng, derive_seed

CONFIG = {
    "app": {"seed": 11, "p_values": [1, 2, 3], "budget": {"starts": 4}},
    "logging": {"version": 1, "loggers": {"src": {"level": "INFO"}}},
    "experiments": [
        {"type": "uhf", "name": "small", "config": {"dims": [1, 2]}},
        {"type": "check", "enabled": False},
    ],
}


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "config.yml"
    path.write_text(yaml.safe_dump(CONFIG))
    return str(path)


def test_load_yaml_and_json(tmp_path, config_file):
    json_path = tmp_path / "config.json"
    json_path.write_text(json.dumps(CONFIG))

    assert load_structured_file(config_file) == load_structured_file(str(json_path)) == CONFIG


def test_load_rejects_unknown_suffix_and_missing_file(tmp_path):
    with pytest.raises(InvalidFileFormatError):
        load_structured_file(str(tmp_path / "config.toml"))
    with pytest.raises(ConfigFileNotFoundError):
        load_structured_file(str(tmp_path / "missing.yml"))


@pytest.mark.parametrize("content", ["- a\n- b\n", "app: [unclosed\n"])
def test_load_rejects_malformed_content(tmp_path, content):
    path = tmp_path / "config.yml"
    path.write_text(content)
    with pytest.raises(InvalidFileFormatError):
        load_structured_file(str(path))


def test_config_from_file(config_file):
    config = Config.from_file(config_file)

    assert config.app.seed == 11
    assert config.app.p_values == [1.0, 2.0, 3.0]
    assert config.app.budget.starts == 4
    assert config.app.budget.iterations == 200
    assert config.app.execution_mode == ExecutionMode.SYNC.value
    assert [settings.qualified_name for settings in config.experiments] == ["uhf.small", "check"]
    assert not config.experiments[1].enabled


def test_experiment_settings_are_frozen():
    settings = ExperimentSettings(type="uhf")
    with pytest.raises(ValidationError):
        settings.type = "norm"


@pytest.mark.parametrize("p_values", [[], [0.5], [float("inf")]])
def test_app_config_rejects_bad_exponents(p_values):
    with pytest.raises(ValidationError):
        AppConfig(p_values=p_values)


def test_raised_caps_require_acknowledgment():
    assert ResourceCaps(tower_dimension=16).tower_dimension == 16
    with pytest.raises(ValidationError):
        ResourceCaps(tower_dimension=DEFAULT_TOWER_DIMENSION_CAP + 1)
    assert ResourceCaps(tower_dimension=DEFAULT_TOWER_DIMENSION_CAP + 1, acknowledged=True).acknowledged


def test_cli_defaults():
    cli_args = CLIArgs.from_parsing([])

    assert cli_args.config_file == "config/config.yml"
    assert cli_args.experiments_dir == "src/experiments/"
    assert cli_args.command is None
    assert cli_args.options == {}
    assert cli_args.cap_override == []
    assert not cli_args.verbose


def test_cli_subcommand_options():
    cli_args = CLIArgs.from_parsing(["metric", "--dims", "1,2", "--alpha", "auto", "--states", "point:0,trace",
                                     "--oracle"])

    assert cli_args.command == "metric"
    assert cli_args.options == {"dims": [1, 2], "alpha": "auto", "states": ["point:0", "trace"], "oracle": True}

    group = CLIArgs.from_parsing(["group", "--group", "z", "--radius", "2,4", "--coeffs", "c.txt"])
    assert group.options == {"group": "z", "radii": [2.0, 4.0], "coefficients_file": "c.txt"}


def test_cli_global_flags_before_and_after_the_subcommand():
    before = CLIArgs.from_parsing(["--seed", "5", "--out", "o", "uhf", "--dims", "1,2"])
    after = CLIArgs.from_parsing(["uhf", "--dims", "1,2", "--seed", "5", "--out", "o"])

    assert before.seed == after.seed == 5
    assert before.out == after.out == "o"
    assert before.options == after.options == {"dims": [1, 2]}
    assert after.config_file == "config/config.yml"


def test_cli_rejects_bad_lists():
    with pytest.raises(SystemExit):
        CLIArgs.from_parsing(["uhf", "--dims", "1,x"])
    with pytest.raises(ValidationError):
        CLIArgs.from_parsing(["--workers", "0"])


def test_apply_overrides(config_file):
    cli_args = CLIArgs.from_parsing(["--config", config_file, "--seed", "9", "--out", "elsewhere", "--p", "1.5",
                                     "--workers", "3", "--cap-override", "ball_size=50"])
    config = cli_args.apply(Config.from_file(config_file))

    assert config.app.seed == 9
    assert config.app.output_dir == "elsewhere"
    assert config.app.p_values == [1.5]
    assert config.app.max_workers == 3
    assert config.app.execution_mode == ExecutionMode.MULTITHREADED.value
    assert config.app.caps.ball_size == 50
    assert len(config.experiments) == 2


def test_apply_subcommand_replaces_experiments(config_file):
    cli_args = CLIArgs.from_parsing(["--config", config_file, "uhf", "--dims", "1,2,2", "--workers", "1"])
    config = cli_args.apply(Config.from_file(config_file))

    assert config.app.execution_mode == ExecutionMode.SYNC.value
    assert len(config.experiments) == 1
    assert config.experiments[0].type == "uhf"
    assert config.experiments[0].config == {"dims": [1, 2, 2]}


def test_apply_cap_overrides(config_file):
    config = Config.from_file(config_file)
    raised = ["--cap-override", f"tower_dimension={DEFAULT_TOWER_DIMENSION_CAP * 2}"]

    with pytest.raises(ValidationError):
        CLIArgs.from_parsing(raised).apply(config)
    acknowledged = CLIArgs.from_parsing(raised + ["--acknowledge-caps"]).apply(config)
    assert acknowledged.app.caps.tower_dimension == DEFAULT_TOWER_DIMENSION_CAP * 2

    for override in ["depth=3", "ball_size", "ball_size=many"]:
        with pytest.raises(InvalidInputError):
            CLIArgs.from_parsing(["--cap-override", override]).apply(config)


def test_update_loggers_level():
    logging_config = {"loggers": {"src": {"level": "INFO"}, "experiments": {"level": "WARNING"}},
                      "root": {"level": "ERROR"}}
    update_loggers_level(logging_config, logging.DEBUG)

    assert logging_config["loggers"]["src"]["level"] == logging.DEBUG
    assert logging_config["loggers"]["experiments"]["level"] == logging.DEBUG
    assert logging_config["root"]["level"] == logging.DEBUG


def test_get_logger_and_timed():
    logger = get_logger("experiments", "", "uhf")
    assert logger.name == "experiments.uhf"

    with timed(logger, "block") as record:
        pass
    assert record["seconds"] >= 0.0


def test_derived_generators_are_reproducible():
    first = derive_rng(3, "mk", 0).standard_normal(4)
    assert np.array_equal(first, derive_rng(3, "mk", 0).standard_normal(4))
    assert not np.array_equal(first, derive_rng(3, "mk", 1).standard_normal(4))
    assert derive_seed(3, 2.0) == derive_seed(3, 2.0)
    assert derive_seed(3, -1) >= 0
