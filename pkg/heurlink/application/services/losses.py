"""
Funciones de pérdida de ranking.
Pérdida AUC con bisagra cuadrática y margen por par, y entropía cruzada binaria
sobre logits; ambas devuelven el valor medio y ∂𝓛/∂s.
"""
from typing import Optional, Tuple, Union

import numpy as np
from scipy.special import expit

from heurlink.domain.entities.models import LossKind, MarginMode, SparseGraph
from heurlink.domain.exceptions import ContractError, NumericError

LossOutput = Tuple[float, np.ndarray, np.ndarray]


def _check_finite(*arrays: np.ndarray) -> None:
    for array in arrays:
        if not np.all(np.isfinite(array)):
            raise NumericError("Puntuaciones no finitas en la pérdida")


def auc_loss(pos_scores: np.ndarray, neg_scores: np.ndarray, owners: np.ndarray,
             margins: Union[float, np.ndarray] = 1.0) -> LossOutput:
    """
    Pérdida AUC: media sobre pares (i,j),(i,k) de γ_ij·max(0, γ_ij - s_ij + s_ik)².

    Args:
        pos_scores: Puntuaciones de los positivos
        neg_scores: Puntuaciones de los negativos
        owners: Índice del positivo al que pertenece cada negativo
        margins: Margen γ constante o uno por positivo

    Returns:
        (pérdida, ∂𝓛/∂s_pos, ∂𝓛/∂s_neg)

    Raises:
        NumericError: Si alguna puntuación no es finita
    """
    pos_scores = np.asarray(pos_scores, dtype=np.float64)
    neg_scores = np.asarray(neg_scores, dtype=np.float64)
    owners = np.asarray(owners, dtype=np.int64)
    _check_finite(pos_scores, neg_scores)
    if neg_scores.shape != owners.shape:
        raise ContractError("Cada negativo necesita el índice de su positivo")
    if neg_scores.shape[0] == 0:
        raise ContractError("La pérdida AUC necesita al menos un par negativo")

    gamma = np.broadcast_to(np.asarray(margins, dtype=np.float64), pos_scores.shape)[owners]
    hinge = np.maximum(0.0, gamma - pos_scores[owners] + neg_scores)
    count = neg_scores.shape[0]
    loss = float(np.sum(gamma * hinge ** 2) / count)

    neg_grad = 2.0 * gamma * hinge / count
    pos_grad = np.zeros_like(pos_scores)
    np.add.at(pos_grad, owners, -neg_grad)
    return loss, pos_grad, neg_grad


def bce_loss(pos_scores: np.ndarray, neg_scores: np.ndarray) -> LossOutput:
    """
    Entropía cruzada binaria sobre logits (positivos 1, negativos 0), media.

    softplus se evalúa con logaddexp para evitar desbordamientos.
    """
    pos_scores = np.asarray(pos_scores, dtype=np.float64)
    neg_scores = np.asarray(neg_scores, dtype=np.float64)
    _check_finite(pos_scores, neg_scores)
    count = pos_scores.shape[0] + neg_scores.shape[0]
    if count == 0:
        raise ContractError("La pérdida BCE necesita al menos una puntuación")

    loss = (np.sum(np.logaddexp(0.0, -pos_scores)) + np.sum(np.logaddexp(0.0, neg_scores))) / count
    pos_grad = (expit(pos_scores) - 1.0) / count
    neg_grad = expit(neg_scores) / count
    return float(loss), pos_grad, neg_grad


def adaptive_margins(g: SparseGraph, positives: np.ndarray, base: float = 1.0,
                     mode: MarginMode = MarginMode.CONSTANT) -> np.ndarray:
    """
    Márgenes γ_ij por positivo.

    En modo `degree`: γ_ij = base·(1 + log(1+d̃_i)/log(1+max d̃)).
    """
    positives = np.asarray(positives, dtype=np.int64).reshape(-1, 2)
    if MarginMode(mode) is MarginMode.CONSTANT:
        return np.full(positives.shape[0], float(base))
    deg = g.degrees_with_loops
    scale = np.log1p(deg[positives[:, 0]]) / np.log1p(deg.max())
    return base * (1.0 + scale)


def compute_loss(kind: LossKind, pos_scores: np.ndarray, neg_scores: np.ndarray, owners: np.ndarray,
                 margins: Optional[np.ndarray] = None) -> LossOutput:
    """Despacha a la pérdida configurada."""
    if LossKind(kind) is LossKind.AUC:
        return auc_loss(pos_scores, neg_scores, owners, 1.0 if margins is None else margins)
    return bce_loss(pos_scores, neg_scores)
