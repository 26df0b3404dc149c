"""
Muestreo uniforme de enlaces negativos.
"""
import logging

import numpy as np

from heurlink.domain.entities.models import NegativeSample, SparseGraph

logger = logging.getLogger(__name__)


def sample_negatives(g: SparseGraph, positives: np.ndarray, per_positive: int = 1,
                     seed=0) -> NegativeSample:
    """
    Para cada positivo (i, j) muestrea pares (i, k') con k' uniforme entre los
    no vecinos de i (Γ_i incluye a i), rechazando colisiones.

    Args:
        g: Grafo de entrenamiento
        positives: Pares positivos (P, 2)
        per_positive: Negativos por positivo
        seed: Semilla o np.random.Generator

    Returns:
        Pares negativos, índice del positivo dueño y filas omitidas
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    positives = np.asarray(positives, dtype=np.int64).reshape(-1, 2)
    n = g.num_nodes
    pairs, owners = [], []
    skipped = 0
    for index, source in enumerate(positives[:, 0]):
        row = g.neighbors(int(source))
        if row.shape[0] >= n:
            skipped += 1
            continue
        drawn = 0
        while drawn < per_positive:
            candidate = int(rng.integers(n))
            pos = np.searchsorted(row, candidate)
            if pos < row.shape[0] and row[pos] == candidate:
                continue
            pairs.append((int(source), candidate))
            owners.append(index)
            drawn += 1

    if skipped:
        logger.warning(f"{skipped} positivos sin no vecinos disponibles; se omitieron en el muestreo")
    return NegativeSample(
        pairs=np.array(pairs, dtype=np.int64).reshape(-1, 2),
        owners=np.array(owners, dtype=np.int64),
        skipped=skipped,
    )
