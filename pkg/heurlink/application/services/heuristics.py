"""
Heurísticas de predicción de enlaces bajo la formulación unificada.
Cada heurística se calcula por su definición cerrada (u oráculo), por su forma
matricial y por la formulación H = Σ β^(l) 𝔸^(1)···𝔸^(l).
"""
import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from heurlink.application.services.graph_ops import resolve_operator, spmm
from heurlink.application.services.oracles import dense_adjacency, oracle_path_count, oracle_rwr
from heurlink.domain.entities.models import (
    FormulationConfig,
    HeuristicDeviation,
    HeuristicId,
    HeuristicSpec,
    LOCAL_HEURISTICS,
    OperatorKind,
    SparseGraph,
)
from heurlink.domain.exceptions import (
    ContractError,
    DenseExportError,
    InvalidGraphError,
    OracleLimitError,
)
from heurlink.infrastructure.config.settings import (
    DEFAULT_TRUNCATION,
    DENSE_EXPORT_MAX_NODES,
    ORACLE_MAX_LENGTH,
    ORACLE_MAX_NODES,
)

logger = logging.getLogger(__name__)

PairList = Union[Sequence[Tuple[int, int]], np.ndarray]

# Fuentes propagadas a la vez en score_pairs_formulation
SOURCE_BLOCK = 256

RAW = OperatorKind.RAW_WITH_LOOPS
SYM = OperatorKind.SYMMETRIC
RS = OperatorKind.ROW_STOCHASTIC
CS = OperatorKind.COLUMN_STOCHASTIC


def _as_pairs(g: SparseGraph, pairs: PairList) -> np.ndarray:
    array = np.asarray(pairs, dtype=np.int64)
    if array.size == 0:
        return array.reshape(0, 2)
    if array.ndim != 2 or array.shape[1] != 2:
        raise ContractError("Los pares deben tener forma (P, 2)")
    if array.min() < 0 or array.max() >= g.num_nodes:
        raise InvalidGraphError(f"Par fuera del rango de nodos [0, {g.num_nodes})")
    return array


def _local(first: OperatorKind, second: OperatorKind) -> FormulationConfig:
    return FormulationConfig(max_order=2, operator_specs=[first, second], betas=[0.0, 0.0, 1.0])


def _series(kind: OperatorKind, betas: List[float]) -> FormulationConfig:
    return FormulationConfig(max_order=len(betas) - 1, operator_specs=[kind] * (len(betas) - 1), betas=betas)


def heuristic_config(spec: HeuristicSpec) -> FormulationConfig:
    """
    Configuración de la formulación unificada que realiza una heurística.

    Las series infinitas (KI, GLHN, RWR, FP) se truncan en `spec.order`. Para
    LRW se devuelve la serie sin el factor por origen d̃_i/(2M), que se aplica
    fuera de la configuración.

    Args:
        spec: Heurística y sus parámetros

    Returns:
        Operadores por capa y pesos β

    Raises:
        ContractError: Si la heurística no está soportada
    """
    method = spec.method
    order = spec.order
    if method is HeuristicId.CN:
        return _local(RAW, RAW)
    if method is HeuristicId.LLHN:
        return _local(RS, CS)
    if method is HeuristicId.RA:
        return _local(CS, RAW)
    if method is HeuristicId.RA_SQ:
        return _local(CS, RS)
    if method is HeuristicId.RA_SYM:
        return _local(SYM, SYM)
    if method is HeuristicId.KI:
        return _series(RAW, [0.0] + [spec.gamma ** l for l in range(1, order + 1)])
    if method is HeuristicId.GLHN:
        return _series(RAW, [1.0] + [spec.phi ** l for l in range(1, order + 1)])
    if method is HeuristicId.LPI:
        return _series(RAW, [0.0, 0.0] + [spec.gamma ** (l - 2) for l in range(2, order + 1)])
    if method is HeuristicId.RWR:
        return _series(RS, [(1 - spec.alpha) * spec.alpha ** l for l in range(order + 1)])
    if method is HeuristicId.FP:
        return _series(SYM, [(1 - spec.alpha) * spec.alpha ** l for l in range(order + 1)])
    if method is HeuristicId.LRW:
        return _series(RS, [(1 - spec.alpha) * spec.alpha ** l for l in range(order)])
    raise ContractError(f"Heurística no soportada: {method}")


def ra_alternative_config() -> FormulationConfig:
    """Segunda realización de RA: 𝔸^(1) = Ã, 𝔸^(2) = Ã_rs."""
    return _local(RAW, RS)


def score_pairs_formulation(g: SparseGraph, cfg: FormulationConfig, pairs: PairList) -> np.ndarray:
    """
    Evalúa H_{i,j} para cada par por propagación dispersa desde cada origen.

    La fila i de H se obtiene como e_iᵀ 𝔸^(1)···𝔸^(l), es decir aplicando las
    transpuestas de los operadores a e_i; los orígenes se procesan por bloques.

    Args:
        g: Grafo con auto-lazos
        cfg: Configuración de la formulación
        pairs: Pares (i, j)

    Returns:
        Puntuación por par
    """
    pairs = _as_pairs(g, pairs)
    scores = np.zeros(pairs.shape[0], dtype=np.float64)
    if pairs.shape[0] == 0:
        return scores

    operators = [resolve_operator(g, choice) for choice in cfg.operator_specs]
    sources, source_pos = np.unique(pairs[:, 0], return_inverse=True)
    for start in range(0, sources.shape[0], SOURCE_BLOCK):
        block = sources[start:start + SOURCE_BLOCK]
        v = np.zeros((g.num_nodes, block.shape[0]), dtype=np.float64)
        v[block, np.arange(block.shape[0])] = 1.0
        acc = cfg.betas[0] * v
        for beta, op in zip(cfg.betas[1:], operators):
            v = spmm(op, v, transpose=True)
            if beta != 0.0:
                acc += beta * v

        mask = (source_pos >= start) & (source_pos < start + block.shape[0])
        idx = np.nonzero(mask)[0]
        scores[idx] = acc[pairs[idx, 1], source_pos[idx] - start]
    return scores


def dense_formulation(g: SparseGraph, cfg: FormulationConfig) -> np.ndarray:
    """
    Ensambla H = Σ β^(l) 𝔸^(1)···𝔸^(l) de forma densa.

    Raises:
        DenseExportError: Si N > 500
    """
    if g.num_nodes > DENSE_EXPORT_MAX_NODES:
        logger.warning(f"Exportación densa rechazada para N={g.num_nodes}")
        raise DenseExportError(
            f"La forma densa solo se admite hasta {DENSE_EXPORT_MAX_NODES} nodos",
            details=f"N={g.num_nodes}",
        )
    product = np.eye(g.num_nodes)
    h = cfg.betas[0] * product
    for beta, choice in zip(cfg.betas[1:], cfg.operator_specs):
        product = product @ resolve_operator(g, choice).to_dense()
        h = h + beta * product
    return h


# Definiciones cerradas sobre la intersección de vecindarios (Γ incluye al propio nodo)

def _common(g: SparseGraph, i: int, j: int) -> np.ndarray:
    return np.intersect1d(g.neighbors(i), g.neighbors(j), assume_unique=True)


def score_cn(g: SparseGraph, i: int, j: int) -> float:
    return float(_common(g, i, j).shape[0])


def score_llhn(g: SparseGraph, i: int, j: int) -> float:
    deg = g.degrees_with_loops
    return score_cn(g, i, j) / (deg[i] * deg[j])


def score_ra(g: SparseGraph, i: int, j: int) -> float:
    return float(np.sum(1.0 / g.degrees_with_loops[_common(g, i, j)]))


def score_ra_sq(g: SparseGraph, i: int, j: int) -> float:
    """RA con penalización cuadrática del grado: Σ 1/d̃_k²."""
    return float(np.sum(1.0 / g.degrees_with_loops[_common(g, i, j)] ** 2))


def score_ra_sym(g: SparseGraph, i: int, j: int) -> float:
    """RA normalizado simétricamente: s_RA(i, j)/√(d̃_i d̃_j)."""
    deg = g.degrees_with_loops
    return score_ra(g, i, j) / np.sqrt(deg[i] * deg[j])


CLOSED_FORM: Dict[HeuristicId, Callable[[SparseGraph, int, int], float]] = {
    HeuristicId.CN: score_cn,
    HeuristicId.LLHN: score_llhn,
    HeuristicId.RA: score_ra,
    HeuristicId.RA_SQ: score_ra_sq,
    HeuristicId.RA_SYM: score_ra_sym,
}


def lrw_source_factor(g: SparseGraph) -> np.ndarray:
    """Factor por origen d̃_i/(2M) de LRW."""
    if g.num_edges == 0:
        raise InvalidGraphError("LRW no está definido en un grafo sin aristas (M = 0)")
    return g.degrees_with_loops / (2.0 * g.num_edges)


def score_heuristic(g: SparseGraph, spec: HeuristicSpec, pairs: PairList) -> np.ndarray:
    """
    Puntúa pares con cualquier heurística a través de la formulación unificada.

    Args:
        g: Grafo con auto-lazos
        spec: Heurística y parámetros
        pairs: Pares (i, j)

    Returns:
        Puntuación por par
    """
    pairs = _as_pairs(g, pairs)
    scores = score_pairs_formulation(g, heuristic_config(spec), pairs)
    if spec.method is HeuristicId.LRW:
        scores = scores * lrw_source_factor(g)[pairs[:, 0]]
    return scores


def score_katz(g: SparseGraph, pairs: PairList, gamma: float = 0.5,
               order: int = DEFAULT_TRUNCATION) -> np.ndarray:
    return score_heuristic(g, HeuristicSpec(method=HeuristicId.KI, gamma=gamma, order=order), pairs)


def score_glhn(g: SparseGraph, pairs: PairList, phi: float = 0.5,
               order: int = DEFAULT_TRUNCATION) -> np.ndarray:
    return score_heuristic(g, HeuristicSpec(method=HeuristicId.GLHN, phi=phi, order=order), pairs)


def score_rwr(g: SparseGraph, pairs: PairList, alpha: float = 0.5,
              order: int = DEFAULT_TRUNCATION) -> np.ndarray:
    return score_heuristic(g, HeuristicSpec(method=HeuristicId.RWR, alpha=alpha, order=order), pairs)


def score_lpi(g: SparseGraph, pairs: PairList, gamma: float = 0.5,
              order: int = DEFAULT_TRUNCATION) -> np.ndarray:
    return score_heuristic(g, HeuristicSpec(method=HeuristicId.LPI, gamma=gamma, order=order), pairs)


def score_lrw(g: SparseGraph, pairs: PairList, alpha: float = 0.5,
              order: int = DEFAULT_TRUNCATION) -> np.ndarray:
    return score_heuristic(g, HeuristicSpec(method=HeuristicId.LRW, alpha=alpha, order=order), pairs)


def score_fp(g: SparseGraph, pairs: PairList, alpha: float = 0.5,
             order: int = DEFAULT_TRUNCATION) -> np.ndarray:
    return score_heuristic(g, HeuristicSpec(method=HeuristicId.FP, alpha=alpha, order=order), pairs)


def _power_series(base: np.ndarray, weights: Sequence[float]) -> np.ndarray:
    power = np.eye(base.shape[0])
    total = np.zeros_like(base)
    for weight in weights:
        total += weight * power
        power = power @ base
    return total


def matrix_form_scores(g: SparseGraph, spec: HeuristicSpec) -> np.ndarray:
    """
    Forma matricial densa de la heurística, escrita con D̃ y Ã directamente.

    Args:
        g: Grafo con N <= 500
        spec: Heurística y parámetros

    Returns:
        Matriz N×N cuya entrada (i, j) es s(i, j)
    """
    if g.num_nodes > DENSE_EXPORT_MAX_NODES:
        raise DenseExportError(f"La forma matricial solo se admite hasta {DENSE_EXPORT_MAX_NODES} nodos")

    a = dense_adjacency(g)
    d = a.sum(axis=1)
    inv_d = np.diag(1.0 / d)
    method, order = spec.method, spec.order
    if method is HeuristicId.CN:
        return a @ a
    if method is HeuristicId.LLHN:
        return inv_d @ a @ a @ inv_d
    if method is HeuristicId.RA:
        return a @ inv_d @ a
    if method is HeuristicId.RA_SQ:
        return a @ inv_d @ inv_d @ a
    if method is HeuristicId.RA_SYM:
        inv_sqrt = np.diag(1.0 / np.sqrt(d))
        return inv_sqrt @ a @ inv_d @ a @ inv_sqrt
    if method is HeuristicId.KI:
        return _power_series(a, [0.0] + [spec.gamma ** l for l in range(1, order + 1)])
    if method is HeuristicId.GLHN:
        return _power_series(a, [1.0] + [spec.phi ** l for l in range(1, order + 1)])
    if method is HeuristicId.LPI:
        return _power_series(a, [0.0, 0.0] + [spec.gamma ** (l - 2) for l in range(2, order + 1)])

    restart = [(1 - spec.alpha) * spec.alpha ** l for l in range(order + 1)]
    if method is HeuristicId.RWR:
        return _power_series(inv_d @ a, restart)
    if method is HeuristicId.FP:
        inv_sqrt = np.diag(1.0 / np.sqrt(d))
        return _power_series(inv_sqrt @ a @ inv_sqrt, restart)
    if method is HeuristicId.LRW:
        if g.num_edges == 0:
            raise InvalidGraphError("LRW no está definido en un grafo sin aristas (M = 0)")
        return np.diag(d / (2.0 * g.num_edges)) @ _power_series(inv_d @ a, restart[:order])
    raise ContractError(f"Heurística no soportada: {method}")


def oracle_scores(g: SparseGraph, spec: HeuristicSpec, pairs: PairList) -> np.ndarray:
    """
    Valores de referencia independientes de la formulación.

    Las heurísticas locales usan la intersección de vecindarios; KI, GLHN y LPI
    cuentan caminos por DFS; RWR, FP y LRW usan el oráculo de paseo aleatorio.

    Raises:
        OracleLimitError: Si la instancia excede los límites del oráculo
    """
    pairs = _as_pairs(g, pairs)
    method, order = spec.method, spec.order
    if method in LOCAL_HEURISTICS:
        scorer = CLOSED_FORM[method]
        return np.array([scorer(g, int(i), int(j)) for i, j in pairs], dtype=np.float64)

    if method in (HeuristicId.KI, HeuristicId.GLHN, HeuristicId.LPI):
        if order > ORACLE_MAX_LENGTH:
            raise OracleLimitError(f"El oráculo de caminos admite L <= {ORACLE_MAX_LENGTH}")
        weights = heuristic_config(spec).betas
        return np.array([
            sum(w * oracle_path_count(g, int(i), int(j), l) for l, w in enumerate(weights) if w != 0.0)
            for i, j in pairs
        ], dtype=np.float64)

    if method is HeuristicId.RWR:
        return np.array([oracle_rwr(g, int(i), int(j), spec.alpha, order) for i, j in pairs])
    if method is HeuristicId.FP:
        return np.array([oracle_rwr(g, int(i), int(j), spec.alpha, order, kind=SYM) for i, j in pairs])
    factor = lrw_source_factor(g)
    return np.array([factor[i] * oracle_rwr(g, int(i), int(j), spec.alpha, order - 1) for i, j in pairs])


def _relative_gap(a: np.ndarray, b: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return float(np.max(np.abs(a - b) / scale))


def verify_heuristic(g: SparseGraph, spec: HeuristicSpec,
                     pairs: Optional[PairList] = None) -> HeuristicDeviation:
    """
    Compara las tres vías de cálculo de una heurística.

    Args:
        g: Grafo con N <= 60
        spec: Heurística y parámetros
        pairs: Pares a comparar (por defecto todos los pares (i, j))

    Returns:
        Desviaciones relativas máximas |a - b| / max(1, |a|, |b|)

    Raises:
        OracleLimitError: Si N > 60
    """
    if g.num_nodes > ORACLE_MAX_NODES:
        raise OracleLimitError(f"La verificación admite como máximo {ORACLE_MAX_NODES} nodos")
    if pairs is None:
        rows, cols = np.meshgrid(np.arange(g.num_nodes), np.arange(g.num_nodes), indexing="ij")
        pairs = np.stack([rows.ravel(), cols.ravel()], axis=1)
    pairs = _as_pairs(g, pairs)

    oracle = oracle_scores(g, spec, pairs)
    matrix = matrix_form_scores(g, spec)[pairs[:, 0], pairs[:, 1]]
    formulation = score_heuristic(g, spec, pairs)

    gaps = {
        "oracle_vs_matrix": _relative_gap(oracle, matrix),
        "matrix_vs_formulation": _relative_gap(matrix, formulation),
        "oracle_vs_formulation": _relative_gap(oracle, formulation),
    }
    report: HeuristicDeviation = {
        "method": spec.method.value,
        "pairs": int(pairs.shape[0]),
        **gaps,
        "max_deviation": max(gaps.values()),
    }
    logger.debug(f"Verificación de {spec.method.value}: desviación máxima {report['max_deviation']:.3e}")
    return report
