"""
Métricas de ranking para predicción de enlaces.
Hits@K con un conjunto compartido de negativos, MRR con negativos por positivo
y AUC exacta por estadísticos de rango.
"""
import logging
import re
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.stats import rankdata

from heurlink.domain.entities.models import EvalReport
from heurlink.domain.exceptions import ConfigError, ContractError

logger = logging.getLogger(__name__)

_HITS = re.compile(r"^hits@(\d+)$")


def _nonempty(name: str, scores: np.ndarray) -> np.ndarray:
    scores = np.asarray(scores, dtype=np.float64).ravel()
    if scores.shape[0] == 0:
        raise ContractError(f"La lista de {name} no puede estar vacía")
    return scores


def hits_at_k(pos_scores: np.ndarray, neg_scores: np.ndarray, k: int) -> float:
    """
    Fracción de positivos estrictamente por encima del K-ésimo mejor negativo.

    Args:
        pos_scores: Puntuaciones positivas
        neg_scores: Conjunto compartido de negativos
        k: K

    Returns:
        Valor en [0, 1]; 1.0 con aviso si K supera el número de negativos
    """
    pos_scores = _nonempty("positivos", pos_scores)
    neg_scores = _nonempty("negativos", neg_scores)
    if k < 1:
        raise ContractError("K debe ser >= 1")
    if k > neg_scores.shape[0]:
        logger.warning(f"K={k} supera el número de negativos ({neg_scores.shape[0]}); Hits@K = 1.0")
        return 1.0
    threshold = np.sort(neg_scores)[-k]
    return float(np.mean(pos_scores > threshold))


def mrr(per_positive: Sequence[Tuple[float, Sequence[float]]]) -> float:
    """
    Rango recíproco medio: rango = 1 + |{neg > pos}| + 0.5·|{neg == pos}|.

    Raises:
        ContractError: Si algún positivo no tiene negativos
    """
    if len(per_positive) == 0:
        raise ContractError("MRR necesita al menos un positivo")
    reciprocal = []
    for pos, negatives in per_positive:
        negatives = np.asarray(negatives, dtype=np.float64)
        if negatives.size == 0:
            raise ContractError("Cada positivo necesita al menos un negativo para MRR")
        optimistic = np.sum(negatives > pos)
        ties = np.sum(negatives == pos)
        reciprocal.append(1.0 / (1.0 + optimistic + 0.5 * ties))
    return float(np.mean(reciprocal))


def auc_metric(pos_scores: np.ndarray, neg_scores: np.ndarray) -> float:
    """AUC exacta (Mann-Whitney) con empates a 0.5."""
    pos_scores = _nonempty("positivos", pos_scores)
    neg_scores = _nonempty("negativos", neg_scores)
    n_pos, n_neg = pos_scores.shape[0], neg_scores.shape[0]
    ranks = rankdata(np.concatenate([pos_scores, neg_scores]))
    # Los rangos medios son múltiplos de 0.5, la suma es exacta
    u_stat = np.sum(ranks[:n_pos]) - n_pos * (n_pos + 1) / 2.0
    return float(u_stat / (n_pos * n_neg))


def parse_metric(name: str) -> Tuple[str, Optional[int]]:
    """Interpreta `hits@K`, `mrr` o `auc`."""
    name = name.strip().lower()
    match = _HITS.match(name)
    if match:
        return "hits", int(match.group(1))
    if name in ("mrr", "auc"):
        return name, None
    raise ConfigError(f"Métrica desconocida: {name}", details="use hits@K, mrr o auc")


def evaluate_metric(name: str, pos_scores: np.ndarray, neg_scores: np.ndarray,
                    seed: Optional[int] = None) -> EvalReport:
    """
    Evalúa una métrica por nombre y construye el reporte.

    Para MRR, `neg_scores` es una matriz (P, K) con los negativos de cada
    positivo; si es un vector se comparte entre todos los positivos.
    """
    metric, k = parse_metric(name)
    pos_scores = np.asarray(pos_scores, dtype=np.float64).ravel()
    neg_scores = np.asarray(neg_scores, dtype=np.float64)
    if metric == "hits":
        value = hits_at_k(pos_scores, neg_scores, k)
    elif metric == "auc":
        value = auc_metric(pos_scores, neg_scores)
    else:
        if neg_scores.ndim == 1:
            neg_scores = np.broadcast_to(neg_scores, (pos_scores.shape[0], neg_scores.shape[0]))
        value = mrr(list(zip(pos_scores, neg_scores)))
    return EvalReport(
        metric=metric,
        k=k,
        value=value,
        n_pos=int(pos_scores.shape[0]),
        n_neg=int(neg_scores.size),
        seed=seed,
    )
