import json

import pytest

from hrl_dialog.config.experiment import ExperimentConfig, build_config, load_config
from hrl_dialog.config.ontology import option_for
from hrl_dialog.core.errors import ConfigError
from hrl_dialog.core.types import ExperimentMode


def test_defaults():
    config = ExperimentConfig()
    assert config.hierarchy.gamma == 0.99
    assert config.hierarchy.max_dialogue_length == 30
    assert config.hierarchy.master_exploration_scale >= config.hierarchy.sub_exploration_scale
    assert config.experiment.n_train_dialogues % config.experiment.eval_every == 0


@pytest.mark.parametrize("data, field", [
    ({"experiment": {"n_train_dialogues": 10, "eval_every": 3}}, "experiment"),
    ({"experiment": {"seeds": []}}, "experiment"),
    ({"gp": {"noise_variance": 0}}, "gp.noise_variance"),
    ({"gp": {"kernel": "linear"}}, "gp.kernel"),
    ({"hierarchy": {"master_exploration_scale": 0.5, "sub_exploration_scale": 1.0}}, "hierarchy"),
    ({"user": {"p_change": 1.5}}, "user.p_change"),
    ({"user": {"master_weights": {"restaurant": 0, "hotel": 0}}}, "user.master_weights"),
])
def test_invalid_fields_name_the_field(data, field):
    with pytest.raises(ConfigError) as exc:
        build_config(data)
    assert field in str(exc.value)


def test_load_config(tmp_path):
    path = tmp_path / "desk.json"
    path.write_text(json.dumps({"experiment": {"n_train_dialogues": 20, "eval_every": 10, "seeds": [3]}}))
    config = load_config(path)
    assert config.experiment.seeds == [3]
    assert config.gp.dictionary_cap == ExperimentConfig().gp.dictionary_cap


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)
    bad.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_overrides():
    config = ExperimentConfig()
    assert config.with_overrides() is config
    changed = config.with_overrides(seeds=[9], output_dir="out", mode=ExperimentMode.FLAT)
    assert changed.experiment.seeds == [9]
    assert changed.experiment.output_dir == "out"
    assert changed.experiment.mode == ExperimentMode.FLAT
    assert config.experiment.mode == ExperimentMode.HIERARCHICAL


def test_option_for_sub_domain():
    assert option_for("booking") == "book"
    assert option_for("payment") == "pay"
    with pytest.raises(KeyError):
        option_for("taxi")
