"""
Run configuration resolution and validation
"""

import json
from dataclasses import replace
from pathlib import Path

import pytest

from polyparse.config import BlockDropoutVariant, RunConfig, load_run_config
from polyparse.errors import ConfigError
from polyparse.lexicon.language import LanguageVectorMode

DEFAULT_CONFIG = Path(__file__).resolve().parent.parent / "config" / "default_config.json"


@pytest.fixture
def config_file(tmp_path):
    def write(data):
        path = tmp_path / "run.json"
        path.write_text(json.dumps(data), encoding="utf-8")
        return path
    return write


class TestValidate:
    def test_defaults_are_valid(self):
        assert RunConfig().validate() == RunConfig()

    def test_lexical_needs_embeddings(self):
        with pytest.raises(ConfigError, match="embeddings"):
            RunConfig(lexical=True).validate(check_files=False)

    def test_joint_needs_lexical(self):
        with pytest.raises(ConfigError, match="lexical"):
            RunConfig(joint_tagging=True).validate(check_files=False)

    @pytest.mark.parametrize("mode", [LanguageVectorMode.WORD_ORDER, LanguageVectorMode.FULL_WALS])
    def test_typology_needs_wals(self, mode):
        with pytest.raises(ConfigError, match="WALS"):
            RunConfig(language_vector=mode).validate(check_files=False)
        RunConfig(language_vector=mode, wals="wals.tsv").validate(check_files=False)

    def test_injection_points(self):
        with pytest.raises(ConfigError, match="injection"):
            RunConfig(language_injection=("token", "output")).validate()
        config = RunConfig(language_vector=LanguageVectorMode.LANG_ID, language_injection=("state",))
        assert config.injects("state")
        assert not config.injects("token")
        assert not RunConfig(language_injection=("state",)).injects("state")

    @pytest.mark.parametrize("change", [
        {"lstm_dim": 0}, {"lstm_layers": 0}, {"workers": 0}, {"patience": 0}, {"eta0": 0.0},
        {"clip": -1.0}, {"unk_replace": 1.5}, {"fine_pos_dropout": -0.1}, {"precision": "float16"},
        {"dev_sentences": -1},
    ])
    def test_out_of_range(self, change):
        with pytest.raises(ConfigError):
            replace(RunConfig(), **change).validate()

    def test_missing_files(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            RunConfig(wals=str(tmp_path / "absent.tsv")).validate()
        with pytest.raises(ConfigError, match=r"train\[de\]"):
            RunConfig(train={"de": str(tmp_path / "de.conllu")}).validate()
        RunConfig(train={"de": str(tmp_path / "de.conllu")}).validate(check_files=False)


class TestLoadRunConfig:
    def test_default_file_matches_defaults(self):
        assert load_run_config(DEFAULT_CONFIG) == RunConfig()

    def test_preset(self):
        config = load_run_config(preset="language-id")
        assert config.lexical
        assert config.language_vector is LanguageVectorMode.LANG_ID
        assert not config.fine_pos
        assert load_run_config(preset="fine-pos").fine_pos

    def test_file_then_flags(self, config_file):
        path = config_file({"lstm_dim": 40, "langs": ["de", "en"], "block-dropout": "normalized", "eta0": 1})
        config = load_run_config(path, {"lstm_dim": 20, "seed": None, "langs": "sv,da"}, preset="lexical")
        assert config.lstm_dim == 20
        assert config.seed == RunConfig().seed
        assert config.langs == ("sv", "da")
        assert config.block_dropout is BlockDropoutVariant.NORMALIZED
        assert config.eta0 == 1.0 and isinstance(config.eta0, float)
        assert config.lexical

    def test_train_mapping(self, config_file):
        config = load_run_config(config_file({"train": {"de": "de.conllu"}}))
        assert config.train == {"de": "de.conllu"}
        with pytest.raises(ConfigError):
            load_run_config(config_file({"train": ["de.conllu"]}))

    @pytest.mark.parametrize("data", [
        {"hidden_size": 10},
        {"lstm_dim": "wide"},
        {"lstm_dim": True},
        {"lexical": "yes"},
        {"language_vector": "genus"},
        {"block_dropout": "sometimes"},
    ])
    def test_bad_values(self, config_file, data):
        with pytest.raises(ConfigError):
            load_run_config(config_file(data))

    def test_unknown_preset(self):
        with pytest.raises(ConfigError, match="preset"):
            load_run_config(preset="everything")

    def test_unreadable_files(self, tmp_path):
        with pytest.raises(ConfigError):
            load_run_config(tmp_path / "absent.json")
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError, match="invalid JSON"):
            load_run_config(bad)
        bad.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigError, match="object"):
            load_run_config(bad)


class TestRoundTrip:
    def test_dict_round_trip(self):
        config = RunConfig(
            langs=("de", "en"),
            language_vector=LanguageVectorMode.WORD_ORDER,
            wals="wals.tsv",
            block_dropout=BlockDropoutVariant.NORMALIZED,
            train={"de": "de.conllu"},
        )
        data = config.to_dict()
        assert data["language_vector"] == "word-order"
        assert json.loads(json.dumps(data)) == data
        assert RunConfig.from_dict(data) == config
