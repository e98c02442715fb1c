import json

import pytest

from adpersuasion.analytics import BucketThresholds
from adpersuasion.config import RunConfig
from adpersuasion.errors import ConfigError
from adpersuasion.model import DEFAULT_GRID, LossConfig

TOML = """
seed = 3

[paths]
out_dir = "results"

[training]
lr = 10.0
epochs = 1500

[calibration]
grid = [0.25, 0.5, 0.75]

[analysis]
window = 7
reference_date = "2022-05-23"

[prep]
stem = true
"""


def test_defaults():
    cfg = RunConfig()
    assert cfg.seed == 0
    assert cfg.training.lr == 2.0 and cfg.training.epochs == 500
    assert cfg.training.test_fraction == 0.25 and cfg.training.dev_fraction == 0.1
    assert cfg.calibration.threshold == 0.5
    assert cfg.calibration.grid == DEFAULT_GRID
    assert cfg.analysis.thresholds() == BucketThresholds(0.8, 0.2)
    assert cfg.analysis.window == 3 and cfg.analysis.alpha == 0.05
    assert cfg.loss.beta is None
    assert cfg.paths.model_path().as_posix() == "out/model.json"


def test_load_toml(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(TOML, encoding="utf-8")
    cfg = RunConfig.load(path)
    assert cfg.seed == 3
    assert cfg.paths.out("x.json").as_posix() == "results/x.json"
    assert (cfg.training.lr, cfg.training.epochs) == (10.0, 1500)
    assert cfg.calibration.grid == (0.25, 0.5, 0.75)
    assert cfg.analysis.window == 7
    assert cfg.analysis.reference().isoformat() == "2022-05-23"
    assert cfg.prep.stem and cfg.prep.split_punctuation is False


def test_load_json(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"loss": {"beta": 0.7}, "analysis": {"attribution": "created"}}), encoding="utf-8")
    cfg = RunConfig.load(path)
    assert cfg.loss.resolve([[1, 0]]) == LossConfig(0.7)
    assert cfg.analysis.attribution == "created"


def test_balanced_beta_from_labels():
    assert RunConfig().loss.resolve([[1, 0, 0, 0]]).beta == 0.75


@pytest.mark.parametrize("data", [
    {"unknown_section": {}},
    {"training": {"learning_rate": 1.0}},
    {"training": {"test_fraction": 0.0}},
    {"training": {"dev_fraction": 1.0}},
    {"training": {"dev_fraction": -0.1}},
    {"training": {"target": "multiclass"}},
    {"analysis": {"window": 4}},
    {"analysis": {"high": 0.2, "low": 0.8}},
    {"analysis": {"alpha": 1.5}},
    {"analysis": {"reference_date": "23/05/2022"}},
    {"calibration": {"grid": [0.5, 0.4]}},
    {"loss": {"beta": 1.5}},
    {"prep": {"lemmatize": True}},
    {"seed": "seven"},
    {"paths": "out"},
])
def test_invalid_config(data):
    with pytest.raises(ConfigError):
        RunConfig.from_dict(data)


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.load(tmp_path / "absent.toml")
    broken = tmp_path / "broken.toml"
    broken.write_text("[training\nlr = ", encoding="utf-8")
    with pytest.raises(ConfigError):
        RunConfig.load(broken)
    yaml = tmp_path / "run.yaml"
    yaml.write_text("seed: 1\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        RunConfig.load(yaml)


def test_overrides():
    cfg = RunConfig().with_overrides(seed=9, out_dir="elsewhere", threshold=0.3, beta=0.6, window=5, alpha=0.01)
    assert cfg.seed == 9
    assert cfg.paths.out_dir == "elsewhere"
    assert cfg.calibration.threshold == 0.3
    assert cfg.loss.beta == 0.6
    assert (cfg.analysis.window, cfg.analysis.alpha) == (5, 0.01)


def test_overrides_are_validated():
    with pytest.raises(ConfigError):
        RunConfig().with_overrides(window=2)
    with pytest.raises(ConfigError):
        RunConfig().with_overrides(threshold=1.0)


def test_unset_overrides_keep_values():
    cfg = RunConfig.from_dict({"seed": 4})
    assert cfg.with_overrides() == cfg


def test_round_trip_and_hash(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(TOML, encoding="utf-8")
    cfg = RunConfig.load(path)
    cfg.write(tmp_path / "run_config.json")
    restored = RunConfig.load(tmp_path / "run_config.json")
    assert restored == cfg
    assert restored.config_hash() == cfg.config_hash()
    assert RunConfig().with_overrides(seed=1).config_hash() != RunConfig().config_hash()
    assert len(cfg.config_hash()) == 64
