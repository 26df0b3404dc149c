"""
Oráculos exhaustivos para verificar las heurísticas.
Recorren caminos explícitamente o multiplican matrices densas construidas desde
la lista de aristas, sin pasar por los operadores dispersos.
"""
from typing import List

import numpy as np

from heurlink.domain.entities.models import OperatorKind, SparseGraph
from heurlink.domain.exceptions import OracleLimitError
from heurlink.infrastructure.config.settings import ORACLE_MAX_LENGTH, ORACLE_MAX_NODES


def _check_size(g: SparseGraph) -> None:
    if g.num_nodes > ORACLE_MAX_NODES:
        raise OracleLimitError(
            f"El oráculo admite como máximo {ORACLE_MAX_NODES} nodos",
            details=f"N={g.num_nodes}",
        )


def _adjacency_lists(g: SparseGraph, include_self_loops: bool) -> List[List[int]]:
    lists = []
    for node in range(g.num_nodes):
        row = [int(k) for k in g.neighbors(node)]
        if not include_self_loops:
            row = [k for k in row if k != node]
        lists.append(row)
    return lists


def oracle_path_count(g: SparseGraph, i: int, j: int, length: int,
                      include_self_loops: bool = True) -> int:
    """
    Cuenta por DFS exhaustiva los caminos (walks) de longitud `length` de i a j.

    Args:
        g: Grafo de prueba
        i: Nodo origen
        j: Nodo destino
        length: Longitud l del camino
        include_self_loops: Recorrer Ã (True) o A sin auto-lazos (False)

    Returns:
        Número de caminos, igual a (Ã^l)_{i,j} con auto-lazos

    Raises:
        OracleLimitError: Si N > 60 o l > 8
    """
    _check_size(g)
    if length < 0 or length > ORACLE_MAX_LENGTH:
        raise OracleLimitError(
            f"La longitud del oráculo debe estar en [0, {ORACLE_MAX_LENGTH}]",
            details=f"l={length}",
        )

    adjacency = _adjacency_lists(g, include_self_loops)
    count = 0
    stack = [(i, 0)]
    while stack:
        node, depth = stack.pop()
        if depth == length:
            if node == j:
                count += 1
            continue
        for nxt in adjacency[node]:
            stack.append((nxt, depth + 1))
    return count


def dense_adjacency(g: SparseGraph, kind: OperatorKind = OperatorKind.RAW_WITH_LOOPS) -> np.ndarray:
    """Operador de adyacencia denso construido directamente desde la lista de aristas."""
    n = g.num_nodes
    a = np.eye(n)
    edges = g.edge_list()
    a[edges[:, 0], edges[:, 1]] = 1.0
    a[edges[:, 1], edges[:, 0]] = 1.0
    deg = a.sum(axis=1)

    kind = OperatorKind(kind)
    if kind is OperatorKind.RAW_WITH_LOOPS:
        return a
    if kind is OperatorKind.ROW_STOCHASTIC:
        return a / deg[:, None]
    if kind is OperatorKind.COLUMN_STOCHASTIC:
        return a / deg[None, :]
    inv_sqrt = 1.0 / np.sqrt(deg)
    return inv_sqrt[:, None] * a * inv_sqrt[None, :]


def oracle_rwr(g: SparseGraph, i: int, j: int, alpha: float, steps: int,
               kind: OperatorKind = OperatorKind.ROW_STOCHASTIC) -> float:
    """
    Evalúa Σ_{l=0}^{L} (1-α) α^l (𝔸^l)_{i,j} con productos densos.

    Con `kind` simétrico se obtiene la propagación de flujo (FP).

    Args:
        g: Grafo de prueba (N <= 60)
        i: Nodo origen
        j: Nodo destino
        alpha: Probabilidad de continuar el paseo
        steps: Truncamiento L
        kind: Operador de transición

    Returns:
        Probabilidad truncada de visitar j partiendo de i
    """
    _check_size(g)
    transition = dense_adjacency(g, kind)
    row = np.zeros(g.num_nodes)
    row[i] = 1.0
    total = 0.0
    weight = 1.0 - alpha
    for _ in range(steps + 1):
        total += weight * row[j]
        row = row @ transition
        weight *= alpha
    return float(total)
