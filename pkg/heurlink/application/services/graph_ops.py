"""
Operaciones del núcleo de grafos.
Este módulo construye el grafo CSR con auto-lazos, normaliza los operadores de
adyacencia, los mezcla y ejecuta los productos dispersos de propagación.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from heurlink.domain.entities.models import (
    MIXABLE_KINDS,
    MixedOperatorSpec,
    OperatorChoice,
    OperatorKind,
    SparseGraph,
    SparseOperator,
)
from heurlink.domain.exceptions import ContractError, DimensionMismatchError, InvalidGraphError
from heurlink.infrastructure.config.settings import DEFAULT_THREADS, MIX_SUM_TOLERANCE

logger = logging.getLogger(__name__)

# Filas mínimas para repartir un producto entre hilos
PARALLEL_MIN_ROWS = 2048

_num_threads = max(1, DEFAULT_THREADS)


def set_num_threads(threads: int) -> None:
    """
    Fija el número de hilos de los productos dispersos.

    Args:
        threads: Número de hilos (1 = referencia reproducible)
    """
    global _num_threads
    if threads < 1:
        raise ContractError("El número de hilos debe ser >= 1")
    _num_threads = threads


def get_num_threads() -> int:
    return _num_threads


def build_graph(edges: Union[Sequence[Tuple[int, int]], np.ndarray], num_nodes: int) -> SparseGraph:
    """
    Construye el grafo no dirigido Ã = A + I_N en disposición CSR.

    Las aristas invertidas o duplicadas se deduplican, los auto-lazos de la
    entrada se ignoran y cada nodo recibe exactamente un auto-lazo.

    Args:
        edges: Pares de nodos (i, j)
        num_nodes: Número de nodos N

    Returns:
        Grafo simétrico, deduplicado y con auto-lazos

    Raises:
        InvalidGraphError: Si N == 0 o algún identificador está fuera de rango
    """
    if num_nodes <= 0:
        raise InvalidGraphError("El grafo debe tener al menos un nodo")

    pairs = np.asarray(edges, dtype=np.int64)
    if pairs.size == 0:
        pairs = pairs.reshape(0, 2)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise InvalidGraphError("Las aristas deben ser pares (i, j)")
    if pairs.size and (pairs.min() < 0 or pairs.max() >= num_nodes):
        raise InvalidGraphError(
            f"Identificador de nodo fuera de rango [0, {num_nodes})",
            details=f"min={pairs.min()}, max={pairs.max()}",
        )

    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    loops = np.arange(num_nodes, dtype=np.int64)
    rows = np.concatenate([pairs[:, 0], pairs[:, 1], loops])
    cols = np.concatenate([pairs[:, 1], pairs[:, 0], loops])

    # Clave lineal i*N + j: np.unique ordena por fila y luego por columna
    keys = np.unique(rows * num_nodes + cols)
    rows = keys // num_nodes
    cols = keys % num_nodes

    counts = np.bincount(rows, minlength=num_nodes)
    row_offsets = np.zeros(num_nodes + 1, dtype=np.int64)
    np.cumsum(counts, out=row_offsets[1:])

    num_edges = int((keys.shape[0] - num_nodes) // 2)
    logger.debug(f"Grafo construido: N={num_nodes}, M={num_edges}")
    return SparseGraph(
        num_nodes=num_nodes,
        num_edges=num_edges,
        row_offsets=row_offsets,
        col_indices=cols.astype(np.int64),
        degrees_with_loops=counts.astype(np.float64),
    )


def normalize(g: SparseGraph, kind: OperatorKind) -> SparseOperator:
    """
    Devuelve uno de los cuatro operadores de adyacencia sobre Ã.

    Los pesos de cada tipo se calculan una vez y se guardan en el grafo.

    Args:
        g: Grafo con auto-lazos
        kind: Ã, Ã_sym, Ã_rs o Ã_cs

    Returns:
        Operador con el mismo patrón que Ã
    """
    kind = OperatorKind(kind)
    cached = g._operators.get(kind)
    if cached is not None:
        return cached

    deg = g.degrees_with_loops
    rows = g.row_indices
    cols = g.col_indices
    if kind is OperatorKind.RAW_WITH_LOOPS:
        values = np.ones(g.nnz, dtype=np.float64)
    elif kind is OperatorKind.SYMMETRIC:
        inv_sqrt = 1.0 / np.sqrt(deg)
        values = inv_sqrt[rows] * inv_sqrt[cols]
    elif kind is OperatorKind.ROW_STOCHASTIC:
        values = 1.0 / deg[rows]
    else:
        values = 1.0 / deg[cols]

    operator = SparseOperator(
        shape=(g.num_nodes, g.num_nodes),
        row_offsets=g.row_offsets,
        col_indices=g.col_indices,
        values=values,
        label=kind.value,
    )
    g._operators[kind] = operator
    return operator


def mix_operators(g: SparseGraph, alpha: Sequence[float]) -> SparseOperator:
    """
    Relajación continua α₁·Ã_rs + α₂·Ã_cs + α₃·Ã_sym sobre el patrón compartido.

    Args:
        g: Grafo con auto-lazos
        alpha: Pesos (α_rs, α_cs, α_sym), no negativos y con suma 1

    Returns:
        Operador mezclado

    Raises:
        ContractError: Si algún peso es negativo o la suma difiere de 1
    """
    weights = np.asarray(alpha, dtype=np.float64)
    if weights.shape != (3,):
        raise ContractError("alpha debe tener exactamente tres pesos")
    if np.any(weights < 0):
        raise ContractError("Los pesos de mezcla deben ser no negativos", details=str(weights))
    if abs(float(weights.sum()) - 1.0) > MIX_SUM_TOLERANCE:
        raise ContractError("Los pesos de mezcla deben sumar 1", details=str(weights))

    values = np.zeros(g.nnz, dtype=np.float64)
    for weight, kind in zip(weights, MIXABLE_KINDS):
        if weight != 0.0:
            values += weight * normalize(g, kind).values
    return SparseOperator(
        shape=(g.num_nodes, g.num_nodes),
        row_offsets=g.row_offsets,
        col_indices=g.col_indices,
        values=values,
        label="mix(" + ",".join(f"{w:.4g}" for w in weights) + ")",
    )


def resolve_operator(g: SparseGraph, choice: OperatorChoice) -> SparseOperator:
    """Resuelve un operador discreto o una mezcla explícita."""
    if isinstance(choice, MixedOperatorSpec):
        return mix_operators(g, choice.weights)
    return normalize(g, OperatorKind(choice))


def _row_blocks(num_rows: int, threads: int) -> List[Tuple[int, int]]:
    bounds = np.linspace(0, num_rows, threads + 1).astype(np.int64)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def spmm(op: SparseOperator, x: np.ndarray, *, transpose: bool = False,
         threads: Optional[int] = None) -> np.ndarray:
    """
    Producto disperso-denso exacto op·x (u opᵀ·x con `transpose`).

    Con varios hilos se reparte por bloques de filas de salida; cada fila se
    calcula igual que en modo secuencial.

    Args:
        op: Operador disperso
        x: Matriz densa (o vector) con op.cols filas
        transpose: Multiplicar por la transpuesta
        threads: Hilos a usar (por defecto el valor global)

    Returns:
        Resultado denso

    Raises:
        DimensionMismatchError: Si las dimensiones no coinciden
    """
    matrix = op.transposed_matrix if transpose else op.matrix
    if x.shape[0] != matrix.shape[1]:
        raise DimensionMismatchError(
            "Dimensiones incompatibles en spmm",
            details=f"operador {matrix.shape}, entrada {x.shape}",
        )
    threads = threads or _num_threads
    if threads <= 1 or matrix.shape[0] < PARALLEL_MIN_ROWS:
        return np.asarray(matrix @ x)

    blocks = _row_blocks(matrix.shape[0], threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda bounds: np.asarray(matrix[bounds[0]:bounds[1]] @ x), blocks))
    return np.concatenate(parts, axis=0)


def spmv(op: SparseOperator, v: np.ndarray, *, transpose: bool = False) -> np.ndarray:
    """Producto matriz-vector op·v."""
    if v.ndim != 1:
        raise DimensionMismatchError("spmv espera un vector")
    return spmm(op, v, transpose=transpose)


def estimate_spectral_radius(op: SparseOperator, iters: int = 1000, seed: int = 0,
                             tol: float = 1e-13) -> float:
    """
    Estima |λ_max| por iteración de potencias.

    Args:
        op: Operador cuadrado
        iters: Iteraciones máximas
        seed: Semilla del vector inicial
        tol: Tolerancia de convergencia del cociente

    Returns:
        Estimación del radio espectral (0 para la matriz nula)
    """
    if op.shape[0] != op.shape[1]:
        raise DimensionMismatchError("El radio espectral requiere un operador cuadrado")
    if op.nnz == 0 or not np.any(op.values):
        return 0.0

    rng = np.random.default_rng(seed)
    v = rng.random(op.shape[0]) + 0.5
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(iters):
        w = spmm(op, v)
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            return 0.0
        v = w / norm
        if abs(norm - estimate) <= tol * max(1.0, norm):
            estimate = norm
            break
        estimate = norm
    if estimate > 1.0 + 1e-6:
        logger.warning(f"Radio espectral estimado {estimate:.6f} > 1 para el operador {op.label}")
    return estimate


def remove_edges(g: SparseGraph, pairs: Union[Sequence[Tuple[int, int]], np.ndarray]) -> SparseGraph:
    """
    Copia del grafo sin las aristas de `pairs` (en cualquier orientación).

    Los pares que no son aristas y los auto-lazos se ignoran; los auto-lazos
    de Ã se conservan.
    """
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    edges = g.edge_list()
    n = g.num_nodes
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    dropped = np.isin(edges[:, 0] * n + edges[:, 1], lo * n + hi)
    return build_graph(edges[~dropped], n)


def permute_graph(g: SparseGraph, perm: np.ndarray) -> SparseGraph:
    """
    Renombra los nodos: el nodo i pasa a ser perm[i].

    Args:
        g: Grafo original
        perm: Permutación de 0..N-1

    Returns:
        Grafo isomorfo con los identificadores permutados
    """
    perm = np.asarray(perm, dtype=np.int64)
    if perm.shape != (g.num_nodes,) or not np.array_equal(np.sort(perm), np.arange(g.num_nodes)):
        raise ContractError("perm debe ser una permutación de los nodos")
    return build_graph(perm[g.edge_list()], g.num_nodes)
