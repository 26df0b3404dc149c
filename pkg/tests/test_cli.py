"""
Pruebas de la línea de comandos: códigos de salida, archivos generados y
flujo completo synth → train → eval → recover.
"""
import json

import pytest

from heurlink.main import main


@pytest.fixture
def triangle_file(tmp_path):
    path = tmp_path / "triangle.edges"
    path.write_text("0 1\n1 2\n0 2\n", encoding="utf-8")
    return path


@pytest.fixture
def synthetic_files(tmp_path):
    assert main(["synth", "--kind", "triangular", "--size", "20", "--seed", "1", "--out-dir", str(tmp_path)]) == 0
    return tmp_path / "triangular.edges", tmp_path / "triangular_split.json"


def _run_config(tmp_path, edges, split) -> str:
    document = {
        "dataset": {"edges": str(edges), "split": str(split)},
        "model": {
            "depth": 2,
            "input_dim": 0,
            "hidden_dim": 8,
            "use_node_embeddings": True,
            "embedding_dim": 8,
            "mlp_layers": 2,
            "mlp_hidden_dim": 8,
            "loss": "auc",
        },
        "train": {"epochs": 2, "learning_rate": 0.01, "seed": 3, "eval_metric": "hits@5"},
        "eval": {"metric": "auc"},
    }
    path = tmp_path / "run.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    return str(path)


class TestHeuristicCommand:

    def test_common_neighbors_csv(self, tmp_path, triangle_file):
        out = tmp_path / "scores.csv"
        code = main(["heuristic", "--graph", str(triangle_file), "--method", "cn", "--pairs", "0,1",
                     "--out", str(out)])
        assert code == 0
        assert out.read_text(encoding="utf-8") == "src,dst,score\n0,1,3\n"

    def test_rwr_order_zero(self, tmp_path):
        graph = tmp_path / "edge.edges"
        graph.write_text("0 1\n", encoding="utf-8")
        out = tmp_path / "scores.csv"
        code = main(["heuristic", "--graph", str(graph), "--method", "rwr", "--alpha", "0.5", "--order", "0",
                     "--pairs", "1,1", "0,1", "--out", str(out)])
        assert code == 0
        assert out.read_text(encoding="utf-8").splitlines()[1:] == ["1,1,0.5", "0,1,0"]

    def test_pairs_file_and_verify(self, tmp_path, triangle_file, capsys):
        pairs = tmp_path / "pairs.txt"
        pairs.write_text("# pares\n0 1\n2,2\n", encoding="utf-8")
        code = main(["heuristic", "--graph", str(triangle_file), "--method", "katz", "--gamma", "0.3",
                     "--order", "4", "--pairs-file", str(pairs), "--verify"])
        assert code == 0
        assert "max_deviation" in capsys.readouterr().out

    def test_all_non_edges(self, tmp_path):
        graph = tmp_path / "path.edges"
        graph.write_text("0 1\n1 2\n", encoding="utf-8")
        out = tmp_path / "scores.csv"
        assert main(["heuristic", "--graph", str(graph), "--method", "ra", "--all-nonedges",
                     "--out", str(out)]) == 0
        assert out.read_text(encoding="utf-8").splitlines()[1:] == ["0,2,0.33333333333333331"]

    def test_missing_arguments(self, capsys):
        assert main(["heuristic", "--method", "cn"]) == 1
        error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert error["exit_code"] == 1

    def test_invalid_damping(self, triangle_file):
        assert main(["heuristic", "--graph", str(triangle_file), "--method", "katz", "--gamma", "1.5",
                     "--pairs", "0,1"]) == 1

    def test_bad_pair_token(self, triangle_file):
        assert main(["heuristic", "--graph", str(triangle_file), "--method", "cn", "--pairs", "0-1"]) == 1

    def test_missing_graph_is_contract_error(self, tmp_path):
        assert main(["heuristic", "--graph", str(tmp_path / "nope.edges"), "--method", "cn",
                     "--pairs", "0,1"]) == 2

    def test_oracle_limit_on_large_graph(self, tmp_path):
        graph = tmp_path / "big.edges"
        graph.write_text("".join(f"{k} {k + 1}\n" for k in range(70)), encoding="utf-8")
        assert main(["heuristic", "--graph", str(graph), "--method", "cn", "--pairs", "0,1", "--verify"]) == 2

    def test_invalid_threads(self, triangle_file):
        assert main(["heuristic", "--graph", str(triangle_file), "--method", "cn", "--pairs", "0,1",
                     "--threads", "0"]) == 1


class TestDataCommands:

    def test_synth_writes_graph_and_split(self, synthetic_files):
        edges, split = synthetic_files
        assert edges.read_text(encoding="utf-8").startswith("# N=60 M=60\n")
        document = json.loads(split.read_text(encoding="utf-8"))
        assert (len(document["valid_pos"]), len(document["test_pos"]), len(document["train"])) == (3, 6, 51)

    def test_split(self, tmp_path, synthetic_files):
        edges, _ = synthetic_files
        out = tmp_path / "random_split.json"
        assert main(["split", "--graph", str(edges), "--out", str(out), "--seed", "2"]) == 0
        assert json.loads(out.read_text(encoding="utf-8"))["seed"] == 2

    def test_info(self, triangle_file, capsys):
        assert main(["info", "--graph", str(triangle_file)]) == 0
        out = capsys.readouterr().out
        assert "rho_sym" in out and "components" in out


class TestModelCommands:

    def test_train_eval_recover(self, tmp_path, synthetic_files, capsys):
        edges, split = synthetic_files
        config = _run_config(tmp_path, edges, split)
        checkpoint = tmp_path / "model.npz"
        history = tmp_path / "history.csv"

        assert main(["train", "--config", config, "--out-checkpoint", str(checkpoint),
                     "--history", str(history)]) == 0
        assert checkpoint.is_file()
        assert len(history.read_text(encoding="utf-8").splitlines()) == 3
        capsys.readouterr()

        assert main(["eval", "--checkpoint", str(checkpoint), "--split", str(split), "--metric", "auc"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["metric"] == "auc"
        assert report["K"] is None
        assert 0.0 <= report["value"] <= 1.0
        assert report["n_pos"] == 6

        exported = tmp_path / "h.json"
        assert main(["recover", "--checkpoint", str(checkpoint), "--split", str(split), "--dense",
                     "--out", str(exported)]) == 0
        document = json.loads(exported.read_text(encoding="utf-8"))
        assert len(document["betas"]) == 3
        assert len(document["dense_h"]) == 60

    def test_train_without_epochs(self, tmp_path, synthetic_files):
        edges, split = synthetic_files
        checkpoint = tmp_path / "untrained.npz"
        assert main(["train", "--config", _run_config(tmp_path, edges, split), "--epochs", "0",
                     "--out-checkpoint", str(checkpoint)]) == 0
        assert checkpoint.is_file()

    def test_recover_against_other_graph(self, tmp_path, synthetic_files, triangle_file):
        edges, split = synthetic_files
        checkpoint = tmp_path / "model.npz"
        main(["train", "--config", _run_config(tmp_path, edges, split), "--epochs", "0",
              "--out-checkpoint", str(checkpoint)])
        assert main(["recover", "--checkpoint", str(checkpoint), "--graph", str(triangle_file)]) == 2

    def test_invalid_config(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"dataset": {"synthetic": "triangular", "edges": "x"}}), encoding="utf-8")
        assert main(["train", "--config", str(path), "--out-checkpoint", str(tmp_path / "m.npz")]) == 1

    def test_unknown_metric_in_config(self, tmp_path, synthetic_files):
        edges, split = synthetic_files
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"dataset": {"edges": str(edges)}, "eval": {"metric": "precision"}}),
                        encoding="utf-8")
        assert main(["train", "--config", str(path), "--out-checkpoint", str(tmp_path / "m.npz")]) == 1

    def test_gradcheck_default_instance(self, capsys):
        assert main(["gradcheck", "--seed", "0"]) == 0
        assert "max_rel_error" in capsys.readouterr().out
