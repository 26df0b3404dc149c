"""
Pruebas del documento de ejecución, los presets y el benchmark.
"""
import json
from pathlib import Path

import pytest

from heurlink.application.use_cases.benchmark import run_forward_benchmark
from heurlink.domain.entities.models import BetaInit, LossKind, ModelConfig, PredictorKind
from heurlink.domain.exceptions import ConfigError
from heurlink.infrastructure.config.settings import PRESET_MAP, DatasetPreset, get_settings
from heurlink.presentation.schemas.run_config import load_run_config, parse_run_config

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


class TestRunConfig:

    def test_preset_fills_sections(self):
        config = parse_run_config({"preset": "triangular", "dataset": {"synthetic": "triangular"}})
        assert config.model.depth == 20
        assert config.model.beta_init is BetaInit.KATZ
        assert config.model.predictor is PredictorKind.HEURISTIC
        assert not config.model.learn_operators
        assert config.model.loss is LossKind.AUC
        assert config.train.mask_targets
        assert config.train.epochs == PRESET_MAP[DatasetPreset.TRIANGULAR]["train"]["epochs"]

    def test_explicit_values_override_preset(self):
        config = parse_run_config({
            "preset": "cora",
            "dataset": {"edges": "cora.edges"},
            "model": {"depth": 4, "input_dim": 1433},
            "train": {"epochs": 3},
        })
        assert config.model.depth == 4
        assert config.model.hidden_dim == 1433
        assert config.model.loss is LossKind.BCE
        assert config.train.epochs == 3

    def test_defaults_without_preset(self):
        config = parse_run_config({"dataset": {"synthetic": "hexagonal"}, "model": {
            "input_dim": 0, "use_node_embeddings": True}})
        assert config.eval.metric == "hits@100"
        assert config.dataset.valid_ratio == 0.05

    @pytest.mark.parametrize("document", [
        {"dataset": {}},
        {"dataset": {"edges": "g.edges", "synthetic": "triangular"}},
        {"dataset": {"synthetic": "triangular", "features": "x.csv"}},
        {"dataset": {"edges": "g.edges", "valid_ratio": 0.5, "test_ratio": 0.5}},
        {"dataset": {"edges": "g.edges"}, "unknown": 1},
        {"dataset": {"edges": "g.edges"}, "preset": "imaginary"},
        {"dataset": {"edges": "g.edges"}, "train": {"eval_metric": "precision"}},
        {"dataset": {"edges": "g.edges"}, "eval": {"metric": "hits@"}},
    ])
    def test_invalid_documents(self, document):
        with pytest.raises(ConfigError):
            parse_run_config(document)

    def test_shipped_configs_are_valid(self):
        for name in ("triangular", "hexagonal", "cora"):
            config = load_run_config(CONFIG_DIR / f"{name}.json")
            assert config.preset is DatasetPreset(name)

    def test_missing_and_malformed_files(self, tmp_path):
        with pytest.raises(ConfigError):
            load_run_config(tmp_path / "nope.json")
        (tmp_path / "bad.json").write_text("{", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_run_config(tmp_path / "bad.json")

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"dataset": {"edges": "g.edges"}, "model": {"input_dim": 8}}),
                        encoding="utf-8")
        assert load_run_config(path).model.input_dim == 8


class TestPresets:

    # (embedding, hidden, predictor hidden, γ de KI, épocas, dropout) de las tablas de OGB
    OGB_TABLE = {
        "collab": (256, 256, 256, 0.5, 800, 0.3),
        "ddi": (512, 512, 512, 0.5, 500, 0.3),
        "ppa": (256, 512, 512, 0.5, 500, 0.5),
        "citation2": (64, 256, 256, 0.6, 100, 0.3),
    }

    # (hidden, capas del predictor, hidden del predictor, β inicial, parámetro, épocas, dropout)
    PLANETOID_TABLE = {
        "cora": (1433, 3, 8192, "rwr", 0.2, 100, 0.5),
        "citeseer": (3703, 2, 8192, "rwr", 0.2, 100, 0.5),
        "pubmed": (500, 3, 512, "ki", 0.2, 300, 0.6),
        "photo": (745, 3, 512, "rwr", 0.2, 200, 0.6),
        "computers": (767, 3, 512, "rwr", 0.2, 200, 0.6),
    }

    @pytest.mark.parametrize("name", sorted(OGB_TABLE))
    def test_ogb_dimensions(self, name):
        emb, hidden, mlp_hidden, param, epochs, dropout = self.OGB_TABLE[name]
        preset = PRESET_MAP[DatasetPreset(name)]
        model = ModelConfig(**preset["model"])
        assert model.depth == 15
        assert model.mlp_layers == 2
        assert (model.embedding_dim, model.hidden_dim, model.mlp_hidden_dim) == (emb, hidden, mlp_hidden)
        assert model.beta_init is BetaInit.KI
        assert model.init_parameter == param
        assert model.dropout_rate == dropout
        assert preset["train"]["epochs"] == epochs

    @pytest.mark.parametrize("name", sorted(PLANETOID_TABLE))
    def test_planetoid_dimensions(self, name):
        hidden, mlp_layers, mlp_hidden, init, param, epochs, dropout = self.PLANETOID_TABLE[name]
        preset = PRESET_MAP[DatasetPreset(name)]
        model = ModelConfig(input_dim=hidden, **preset["model"])
        assert model.depth == 20
        assert (model.hidden_dim, model.mlp_layers, model.mlp_hidden_dim) == (hidden, mlp_layers, mlp_hidden)
        assert model.beta_init is BetaInit(init)
        assert model.init_parameter == param
        assert model.dropout_rate == dropout
        assert preset["train"]["epochs"] == epochs

    def test_ppa_embeddings_are_projected(self):
        model = ModelConfig(**PRESET_MAP[DatasetPreset.PPA]["model"])
        shapes = model.parameter_shapes(num_nodes=10)
        assert shapes["embeddings"] == (10, 256)
        assert shapes["combine.weight"] == (256, 512)
        assert shapes["mlp.0.weight"] == (512, 512)



class TestBenchmark:

    def test_rows_sweep_each_factor(self):
        rows = run_forward_benchmark(depths=[1, 2], edge_counts=[40, 60], feature_dims=[2, 4],
                                     num_nodes=30, repeats=1)
        assert [row["factor"] for row in rows] == ["L", "L", "M", "M", "F", "F"]
        assert [row["L"] for row in rows[:2]] == [1, 2]
        assert all(row["N"] == 30 and row["threads"] == 1 and row["seconds"] >= 0.0 for row in rows)
        # Los factores no barridos quedan en su valor central
        assert {row["M"] for row in rows if row["factor"] != "M"} == {60}


def test_settings_expose_numeric_limits():
    settings = get_settings()
    assert settings["limits"]["oracle_max_nodes"] == 60
    assert settings["limits"]["dense_export_max_nodes"] == 500
    assert settings["runtime"]["threads"] >= 1
