"""
Caso de uso: benchmark de escalado de la propagación.
Mide el tiempo de `forward` variando profundidad, aristas y dimensión oculta.
"""
import logging
import time
from typing import Dict, List, Sequence

import numpy as np

from heurlink.application.services.graph_ops import get_num_threads
from heurlink.application.services.model import forward, init_params
from heurlink.application.services.synthetic import generate_random_graph
from heurlink.domain.entities.models import ModelConfig

logger = logging.getLogger(__name__)


def time_forward(num_nodes: int, num_edges: int, depth: int, features: int,
                 repeats: int = 3, seed: int = 0) -> float:
    """Mediana del tiempo de una propagación (segundos)."""
    g = generate_random_graph(num_nodes, num_edges, seed=seed)
    cfg = ModelConfig(
        depth=depth,
        hidden_dim=features,
        input_dim=features,
        use_preprocessing=False,
        mlp_layers=1,
        dropout_rate=0.0,
    )
    params = init_params(cfg, g, seed=seed)
    x = np.random.default_rng(seed).standard_normal((num_nodes, features))
    forward(params, g, x)

    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        forward(params, g, x)
        samples.append(time.perf_counter() - start)
    return float(np.median(samples))


def run_forward_benchmark(depths: Sequence[int] = (5, 10, 20),
                          edge_counts: Sequence[int] = (25000, 50000, 100000),
                          feature_dims: Sequence[int] = (16, 32, 64),
                          num_nodes: int = 10000, repeats: int = 3,
                          seed: int = 0) -> List[Dict[str, float]]:
    """
    Barre cada factor por separado, con los otros fijos en su valor central.

    Returns:
        Filas {factor, L, N, M, F, threads, seconds}
    """
    base_depth = depths[len(depths) // 2]
    base_edges = edge_counts[len(edge_counts) // 2]
    base_features = feature_dims[len(feature_dims) // 2]

    settings = (
        [("L", d, base_edges, base_features) for d in depths]
        + [("M", base_depth, m, base_features) for m in edge_counts]
        + [("F", base_depth, base_edges, f) for f in feature_dims]
    )
    rows = []
    for factor, depth, edges, dims in settings:
        seconds = time_forward(num_nodes, edges, depth, dims, repeats=repeats, seed=seed)
        logger.info(f"Benchmark {factor}: L={depth}, M={edges}, F={dims} -> {seconds:.4f}s")
        rows.append({
            "factor": factor,
            "L": depth,
            "N": num_nodes,
            "M": edges,
            "F": dims,
            "threads": get_num_threads(),
            "seconds": seconds,
        })
    return rows
