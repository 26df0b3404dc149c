"""
Caso de estudio sintético: red de triángulos con el predictor entrenado sobre
una propagación fija de vecinos comunes.
"""
import numpy as np
import pytest

from heurlink.application.services.heuristics import heuristic_config
from heurlink.application.services.metrics import evaluate_metric
from heurlink.application.services.model import forward, predict_links
from heurlink.application.services.splits import training_graph
from heurlink.application.services.synthetic import generate_triangular, split_synthetic
from heurlink.application.use_cases.training import fit_predictor_only
from heurlink.domain.entities.models import HeuristicId, HeuristicSpec, LossKind, ModelConfig, TrainConfig


@pytest.mark.slow
def test_common_neighbors_separate_triangles():
    dataset = generate_triangular(333)
    split = split_synthetic(dataset, 0.05, 0.1, seed=0)
    g = training_graph(split)
    n = g.num_nodes
    features = np.eye(n)

    cfg = ModelConfig(depth=2, input_dim=n, hidden_dim=n, use_preprocessing=False, mlp_layers=1,
                      dropout_rate=0.0, loss=LossKind.BCE)
    cn = heuristic_config(HeuristicSpec(method=HeuristicId.CN))
    result = fit_predictor_only(g, features, split.train, cn, cfg, TrainConfig(epochs=50, learning_rate=0.01))

    z = forward(result.params, g, features).z
    report = evaluate_metric(
        "auc",
        predict_links(result.params, z, split.test_pos),
        predict_links(result.params, z, split.test_neg),
    )
    assert report.value == 1.0
