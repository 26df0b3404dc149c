"""
Caso de uso: verificación de gradientes por diferencias centrales.
"""
import logging
from typing import Dict, Optional

import numpy as np

from heurlink.application.services.backward import backward, heuristic_backward
from heurlink.application.services.losses import compute_loss
from heurlink.application.services.model import forward, heuristic_forward, run_predictor
from heurlink.domain.entities.models import (
    GradcheckResult,
    GradientBundle,
    LinkBatch,
    LossKind,
    ModelParams,
    PredictorKind,
    SparseGraph,
    parameter_group,
)
from heurlink.domain.exceptions import ContractError, NumericError
from heurlink.infrastructure.config.settings import ORACLE_MAX_NODES

logger = logging.getLogger(__name__)

# Profundidad máxima admitida por la verificación
GRADCHECK_MAX_DEPTH = 5


def _batch_loss(params: ModelParams, g: SparseGraph, features: Optional[np.ndarray], batch: LinkBatch,
                kind: LossKind):
    pairs = np.concatenate([batch.positives, batch.negatives], axis=0)
    if params.config.predictor is PredictorKind.HEURISTIC:
        state, readout = heuristic_forward(params, g, pairs)
    else:
        state = forward(params, g, features)
        readout = run_predictor(params, state.z, pairs)
    count = batch.positives.shape[0]
    loss, pos_grad, neg_grad = compute_loss(
        kind, readout.scores[:count], readout.scores[count:], batch.owners, batch.margins
    )
    return loss, state, readout, np.concatenate([pos_grad, neg_grad])


def _analytic(params: ModelParams, state, readout, score_grads: np.ndarray) -> GradientBundle:
    if params.config.predictor is PredictorKind.HEURISTIC:
        return heuristic_backward(params, state, readout, score_grads)
    return backward(params, state, readout, score_grads)


def finite_difference_check(params: ModelParams, g: SparseGraph, features: Optional[np.ndarray],
                            batch: LinkBatch, h: float = 1e-5, loss: Optional[LossKind] = None,
                            max_entries: int = 25, seed: int = 0) -> GradcheckResult:
    """
    Compara el gradiente analítico con diferencias centrales.

    Se perturban todos los logits α y todas las β, y una muestra de hasta
    `max_entries` entradas de cada bloque denso. El error relativo es
    |g_an - g_fd| / max(1, |g_an|, |g_fd|).

    Args:
        params: Parámetros en 64 bits
        g: Grafo pequeño (N <= 60)
        features: Características o None
        batch: Positivos, negativos y dueños
        h: Paso de las diferencias
        loss: Pérdida a verificar (por defecto la del modelo)
        max_entries: Entradas muestreadas por bloque denso
        seed: Semilla del muestreo de entradas

    Returns:
        Error relativo máximo y entradas comprobadas por grupo

    Raises:
        ContractError: Si la precisión no es 64 bits o la instancia es grande
    """
    cfg = params.config
    if cfg.precision != "float64":
        raise ContractError("La verificación de gradientes requiere precisión de 64 bits")
    if g.num_nodes > ORACLE_MAX_NODES or cfg.depth > GRADCHECK_MAX_DEPTH:
        raise ContractError(
            "Instancia demasiado grande para la verificación de gradientes",
            details=f"N={g.num_nodes}, L={cfg.depth}",
        )
    kind = LossKind(loss or cfg.loss)
    rng = np.random.default_rng(seed)

    value, state, readout, score_grads = _batch_loss(params, g, features, batch, kind)
    analytic = _analytic(params, state, readout, score_grads)
    if not analytic.is_finite():
        raise NumericError("Gradiente analítico no finito", details=f"max |g| = {analytic.max_abs()}")
    logger.debug(f"Gradiente analítico: max |g| = {analytic.max_abs():.6g}")

    perturbed = params.copy()
    errors: Dict[str, float] = {}
    checked: Dict[str, int] = {}
    for name, array in perturbed.trainable():
        flat = array.reshape(-1)
        if name in ("alpha_logits", "betas") or flat.shape[0] <= max_entries:
            entries = np.arange(flat.shape[0])
        else:
            entries = rng.choice(flat.shape[0], size=max_entries, replace=False)

        group = parameter_group(name)
        expected = analytic[name].reshape(-1)
        for entry in entries:
            original = flat[entry]
            flat[entry] = original + h
            upper = _batch_loss(perturbed, g, features, batch, kind)[0]
            flat[entry] = original - h
            lower = _batch_loss(perturbed, g, features, batch, kind)[0]
            flat[entry] = original

            numeric = (upper - lower) / (2.0 * h)
            gap = abs(expected[entry] - numeric) / max(1.0, abs(expected[entry]), abs(numeric))
            errors[group] = max(errors.get(group, 0.0), float(gap))
            checked[group] = checked.get(group, 0) + 1

    logger.info(f"Verificación de gradientes ({kind.value}, pérdida={value:.6g}): {errors}")
    return {"max_rel_error": errors, "checked_entries": checked, "loss": kind.value}
