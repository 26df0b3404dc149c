"""
Generadores de grafos sintéticos.
Redes de triángulos y hexágonos disjuntos para el caso de estudio, y grafos
aleatorios para pruebas y benchmark.
"""
import logging

import numpy as np

from heurlink.application.services.graph_ops import build_graph
from heurlink.application.services.splits import sample_non_edges
from heurlink.domain.entities.models import Dataset, EdgeSplit, SparseGraph
from heurlink.domain.exceptions import ContractError

logger = logging.getLogger(__name__)


def _cycles(count: int, size: int, name: str, seed: int) -> Dataset:
    if count < 1:
        raise ContractError(f"Se necesita al menos un componente para {name}")
    offsets = np.arange(count, dtype=np.int64)[:, None] * size
    local = np.arange(size, dtype=np.int64)
    if size == 3:
        first, second = np.array([0, 1, 0]), np.array([1, 2, 2])
    else:
        first, second = local, (local + 1) % size
    edges = np.stack([(offsets + first).ravel(), (offsets + second).ravel()], axis=1)
    graph = build_graph(edges, count * size)
    components = [offsets[c, 0] + local for c in range(count)]
    logger.info(f"Generado {name}: {count} componentes, N={graph.num_nodes}, M={graph.num_edges}")
    return Dataset(
        graph=graph,
        name=name,
        provenance={"generator": name, "components": count, "seed": seed},
        components=components,
    )


def generate_triangular(num_triangles: int = 333, seed: int = 0) -> Dataset:
    """
    Triángulos disjuntos: el triángulo t ocupa los nodos 3t, 3t+1, 3t+2.

    Los identificadores no dependen de la semilla; se guarda en la procedencia
    y la usa `split_synthetic`.
    """
    return _cycles(num_triangles, 3, "triangular", seed)


def generate_hexagonal(num_hexagons: int = 167, seed: int = 0) -> Dataset:
    """Hexágonos disjuntos (ciclos C6): el hexágono h ocupa los nodos 6h..6h+5."""
    return _cycles(num_hexagons, 6, "hexagonal", seed)


def split_synthetic(dataset: Dataset, valid_ratio: float = 0.05, test_ratio: float = 0.1,
                    seed: int = 0) -> EdgeSplit:
    """
    Partición que retiene como máximo una arista por componente.

    Así cada positivo retenido sigue unido por el resto de su componente: un
    camino de longitud 2 en un triángulo y de longitud 5 en un hexágono.

    Raises:
        ContractError: Si se piden más aristas que componentes
    """
    if dataset.components is None:
        raise ContractError("El dataset no declara componentes")
    g = dataset.graph
    rng = np.random.default_rng(seed)
    edges = g.edge_list()
    n_valid = int(np.floor(edges.shape[0] * valid_ratio + 1e-9))
    n_test = int(np.floor(edges.shape[0] * test_ratio + 1e-9))
    if n_valid + n_test > len(dataset.components):
        raise ContractError(
            "Hay menos componentes que aristas a retener",
            details=f"retener={n_valid + n_test}, componentes={len(dataset.components)}",
        )

    component_of = np.empty(g.num_nodes, dtype=np.int64)
    for index, nodes in enumerate(dataset.components):
        component_of[nodes] = index
    chosen = rng.permutation(len(dataset.components))[:n_valid + n_test]

    held = []
    for component in chosen:
        candidates = np.nonzero(component_of[edges[:, 0]] == component)[0]
        held.append(int(candidates[rng.integers(candidates.shape[0])]))
    held = np.array(held, dtype=np.int64)

    train_mask = np.ones(edges.shape[0], dtype=bool)
    train_mask[held] = False
    negatives = sample_non_edges(g, n_valid + n_test, rng)
    return EdgeSplit(
        num_nodes=g.num_nodes,
        train=edges[train_mask],
        valid_pos=edges[held[:n_valid]],
        valid_neg=negatives[:n_valid],
        test_pos=edges[held[n_valid:]],
        test_neg=negatives[n_valid:],
        seed=seed,
        valid_ratio=valid_ratio,
        test_ratio=test_ratio,
    )


def generate_random_graph(num_nodes: int, num_edges: int, seed: int = 0) -> SparseGraph:
    """Grafo con exactamente `num_edges` aristas distintas elegidas uniformemente."""
    capacity = num_nodes * (num_nodes - 1) // 2
    if num_edges > capacity:
        raise ContractError("Se piden más aristas de las posibles", details=f"máximo={capacity}")
    rng = np.random.default_rng(seed)
    keys = np.zeros(0, dtype=np.int64)
    while keys.shape[0] < num_edges:
        draw = rng.integers(num_nodes, size=(2 * (num_edges - keys.shape[0]) + 16, 2))
        draw = draw[draw[:, 0] != draw[:, 1]]
        lo, hi = np.minimum(draw[:, 0], draw[:, 1]), np.maximum(draw[:, 0], draw[:, 1])
        fresh = lo * num_nodes + hi
        # Orden de aparición estable
        _, first = np.unique(np.concatenate([keys, fresh]), return_index=True)
        keys = np.concatenate([keys, fresh])[np.sort(first)][:num_edges]
    edges = np.stack([keys // num_nodes, keys % num_nodes], axis=1)
    return build_graph(edges, num_nodes)


def generate_erdos_renyi(num_nodes: int, p: float, seed: int = 0) -> SparseGraph:
    """Grafo G(N, p): cada par (i < j) es arista con probabilidad p."""
    if not 0.0 <= p <= 1.0:
        raise ContractError("p debe estar en [0, 1]")
    rng = np.random.default_rng(seed)
    rows, cols = np.triu_indices(num_nodes, k=1)
    keep = rng.random(rows.shape[0]) < p
    return build_graph(np.stack([rows[keep], cols[keep]], axis=1), num_nodes)
