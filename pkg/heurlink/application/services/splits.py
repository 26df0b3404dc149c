"""
Partición aleatoria de aristas en entrenamiento, validación y prueba.
Los negativos de validación y prueba son pares sin arista en el grafo completo,
en el mismo número que los positivos.
"""
import logging
from typing import Set, Tuple

import numpy as np

from heurlink.application.services.graph_ops import build_graph
from heurlink.domain.entities.models import EdgeSplit, SparseGraph
from heurlink.domain.exceptions import ContractError, SplitIntegrityError

logger = logging.getLogger(__name__)


def _count(total: int, ratio: float) -> int:
    return int(np.floor(total * ratio + 1e-9))


def sample_non_edges(g: SparseGraph, count: int, rng: np.random.Generator) -> np.ndarray:
    n = g.num_nodes
    available = n * (n - 1) // 2 - g.num_edges
    if count > available:
        raise ContractError(
            "El grafo no tiene suficientes pares sin arista para los negativos",
            details=f"pedidos={count}, disponibles={available}",
        )
    if count == 0:
        return np.zeros((0, 2), dtype=np.int64)

    if 2 * count > available:
        # Enumeración completa cuando el rechazo sería lento
        rows, cols = np.triu_indices(n, k=1)
        keep = np.array([not g.has_edge(int(i), int(j)) for i, j in zip(rows, cols)], dtype=bool)
        candidates = np.stack([rows[keep], cols[keep]], axis=1)
        chosen = rng.choice(candidates.shape[0], size=count, replace=False)
        return candidates[chosen]

    seen: Set[Tuple[int, int]] = set()
    pairs = []
    while len(pairs) < count:
        i, j = (int(v) for v in rng.integers(n, size=2))
        if i == j:
            continue
        key = (min(i, j), max(i, j))
        if key in seen or g.has_edge(*key):
            continue
        seen.add(key)
        pairs.append(key)
    return np.array(pairs, dtype=np.int64)


def split_edges(g: SparseGraph, valid_ratio: float = 0.05, test_ratio: float = 0.1,
                seed: int = 0) -> EdgeSplit:
    """
    Muestrea sin reemplazo las aristas de validación y prueba.

    Args:
        g: Grafo completo
        valid_ratio: Fracción de aristas para validación
        test_ratio: Fracción de aristas para prueba
        seed: Semilla de la partición

    Returns:
        Partición con negativos del mismo tamaño que los positivos

    Raises:
        ContractError: Si las fracciones no son válidas o el grafo es pequeño
    """
    if valid_ratio < 0 or test_ratio < 0 or valid_ratio + test_ratio >= 1.0:
        raise ContractError("Las fracciones deben ser no negativas y sumar menos de 1")

    rng = np.random.default_rng(seed)
    edges = g.edge_list()
    total = edges.shape[0]
    n_valid = _count(total, valid_ratio)
    n_test = _count(total, test_ratio)
    order = rng.permutation(total)

    valid_pos = edges[order[:n_valid]]
    test_pos = edges[order[n_valid:n_valid + n_test]]
    train = edges[order[n_valid + n_test:]]

    negatives = sample_non_edges(g, n_valid + n_test, rng)
    split = EdgeSplit(
        num_nodes=g.num_nodes,
        train=train,
        valid_pos=valid_pos,
        valid_neg=negatives[:n_valid],
        test_pos=test_pos,
        test_neg=negatives[n_valid:],
        seed=seed,
        valid_ratio=valid_ratio,
        test_ratio=test_ratio,
    )
    logger.info(f"Partición: {train.shape[0]} entrenamiento, {n_valid} validación, {n_test} prueba")
    return split


def training_graph(split: EdgeSplit) -> SparseGraph:
    """Grafo reconstruido solo con los positivos de entrenamiento."""
    return build_graph(split.train, split.num_nodes)


def _keys(pairs: np.ndarray, n: int) -> np.ndarray:
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    return np.minimum(pairs[:, 0], pairs[:, 1]) * n + np.maximum(pairs[:, 0], pairs[:, 1])


def check_split(split: EdgeSplit) -> None:
    """
    Comprueba los invariantes de una partición.

    Raises:
        SplitIntegrityError: Si hay positivos compartidos entre particiones o
            un negativo coincide con un positivo
    """
    n = split.num_nodes
    parts = {"train": split.train, "valid_pos": split.valid_pos, "test_pos": split.test_pos}
    for name, pairs in {**parts, "valid_neg": split.valid_neg, "test_neg": split.test_neg}.items():
        pairs = np.asarray(pairs).reshape(-1, 2)
        if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
            raise SplitIntegrityError(f"Par fuera de rango en {name}")

    keys = {name: _keys(pairs, n) for name, pairs in parts.items()}
    names = list(keys)
    for a in range(len(names)):
        if np.unique(keys[names[a]]).shape[0] != keys[names[a]].shape[0]:
            raise SplitIntegrityError(f"Positivos duplicados en {names[a]}")
        for b in range(a + 1, len(names)):
            if np.intersect1d(keys[names[a]], keys[names[b]]).size:
                raise SplitIntegrityError(f"Positivo presente en {names[a]} y {names[b]}")

    positives = np.concatenate(list(keys.values()))
    for name in ("valid_neg", "test_neg"):
        if np.intersect1d(_keys(getattr(split, name), n), positives).size:
            raise SplitIntegrityError(f"Un negativo de {name} es una arista del grafo")
