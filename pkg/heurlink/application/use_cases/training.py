"""
Caso de uso: entrenamiento de HL-GNN.
Bucle por épocas de muestreo, propagación, pérdida, retropropagación y paso de
Adam, con selección del mejor checkpoint por validación.
"""
import logging
from typing import Callable, Optional, Union

import numpy as np

from heurlink.application.services.backward import backward, heuristic_backward, predictor_gradients
from heurlink.application.services.graph_ops import remove_edges
from heurlink.application.services.losses import adaptive_margins, compute_loss
from heurlink.application.services.metrics import evaluate_metric
from heurlink.application.services.model import (
    forward,
    heuristic_forward,
    init_params,
    run_predictor,
    score_pairs,
    with_formulation,
)
from heurlink.application.services.optimizer import AdamState, adam_step
from heurlink.application.services.sampling import sample_negatives
from heurlink.domain.entities.models import (
    FitResult,
    FormulationConfig,
    ModelConfig,
    ModelParams,
    PredictorKind,
    SparseGraph,
    TrainConfig,
    TrainHistory,
)
from heurlink.domain.exceptions import ContractError, NumericError

logger = logging.getLogger(__name__)

ValidationHook = Callable[[ModelParams], float]


def make_validation_hook(g: SparseGraph, features: Optional[np.ndarray], valid_pos: np.ndarray,
                         valid_neg: np.ndarray, metric: str = "hits@100") -> ValidationHook:
    """
    Construye el gancho que evalúa unos parámetros en la partición de validación.

    Args:
        g: Grafo de entrenamiento (sin aristas de validación)
        features: Características de nodo
        valid_pos: Positivos de validación
        valid_neg: Negativos de validación
        metric: hits@K, mrr o auc

    Returns:
        Función params -> valor de la métrica
    """
    valid_pos = np.asarray(valid_pos, dtype=np.int64).reshape(-1, 2)
    valid_neg = np.asarray(valid_neg, dtype=np.int64).reshape(-1, 2)

    count = valid_pos.shape[0]
    pairs = np.concatenate([valid_pos, valid_neg], axis=0)

    def hook(params: ModelParams) -> float:
        scores = score_pairs(params, g, features, pairs)
        return evaluate_metric(metric, scores[:count], scores[count:]).value

    return hook


def _batches(positives: np.ndarray, batch_size: Optional[int], rng: np.random.Generator):
    if batch_size is None or batch_size >= positives.shape[0]:
        return [np.arange(positives.shape[0])]
    order = rng.permutation(positives.shape[0])
    return [order[start:start + batch_size] for start in range(0, order.shape[0], batch_size)]


def training_streams(seed: int):
    """Generadores de negativos, lotes y dropout derivados de una sola semilla."""
    # Los hijos 0 y 1 de la semilla los consume init_params
    return tuple(np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(5)[2:])


def _run_epochs(params: ModelParams, g: SparseGraph, positives: np.ndarray, train_cfg: TrainConfig,
                step: Callable, eval_hook: Optional[ValidationHook], negative_rng: np.random.Generator,
                batch_rng: np.random.Generator) -> FitResult:
    margins = adaptive_margins(g, positives, train_cfg.margin_base, train_cfg.margin_mode)
    state = AdamState(beta1=train_cfg.adam_beta1, beta2=train_cfg.adam_beta2, eps=train_cfg.adam_eps)

    history = TrainHistory()
    best = FitResult(params=params.copy(), history=history)
    best_metric = -np.inf
    for epoch in range(1, train_cfg.epochs + 1):
        losses = []
        for index in _batches(positives, train_cfg.batch_size, batch_rng):
            batch = positives[index]
            negatives = sample_negatives(g, batch, train_cfg.negatives_per_positive, negative_rng)
            loss, grads = step(batch, negatives, margins[index])
            if not np.isfinite(loss):
                raise NumericError(f"Pérdida no finita en la época {epoch}")
            if not grads.is_finite():
                raise NumericError(f"Gradiente no finito en la época {epoch}", details=f"max |g| = {grads.max_abs()}")
            adam_step(params, grads, state, train_cfg.learning_rate)
            losses.append(loss)

        epoch_loss = float(np.mean(losses))
        val_metric = eval_hook(params) if eval_hook is not None else float("nan")
        history.append(epoch, epoch_loss, val_metric)
        logger.info(f"Época {epoch}: pérdida={epoch_loss:.6f}, validación={val_metric:.4f}")

        if eval_hook is None or val_metric > best_metric:
            best_metric = val_metric if eval_hook is not None else best_metric
            best = FitResult(params=params.copy(), history=history, best_epoch=epoch, best_metric=val_metric)

    best.history = history
    return best


def fit(g: SparseGraph, features: Optional[np.ndarray], positives: np.ndarray, model_cfg: ModelConfig,
        train_cfg: TrainConfig, eval_hook: Optional[ValidationHook] = None,
        params: Optional[ModelParams] = None) -> FitResult:
    """
    Entrena α, β, preprocesado, embeddings y predictor de extremo a extremo.

    Con `mask_targets` cada paso propaga sobre el grafo sin las aristas
    positivas del lote, de modo que el modelo no puede leer el propio enlace.

    Args:
        g: Grafo de entrenamiento (solo positivos de entrenamiento)
        features: Características N×F_in o None
        positives: Aristas positivas de entrenamiento
        model_cfg: Configuración del modelo
        train_cfg: Configuración del entrenamiento
        eval_hook: Métrica de validación por época (mayor es mejor)
        params: Parámetros de partida (por defecto init_params con la semilla)

    Returns:
        Mejor checkpoint por validación (el último si no hay gancho) e historial
    """
    positives = np.asarray(positives, dtype=np.int64).reshape(-1, 2)
    negative_rng, batch_rng, dropout_rng = training_streams(train_cfg.seed)
    params = init_params(model_cfg, g, seed=train_cfg.seed) if params is None else params.copy()

    heuristic = params.config.predictor is PredictorKind.HEURISTIC

    def step(batch, negatives, margins):
        g_step = remove_edges(g, batch) if train_cfg.mask_targets else g
        pairs = np.concatenate([batch, negatives.pairs], axis=0)
        if heuristic:
            state, readout = heuristic_forward(params, g_step, pairs)
        else:
            state = forward(params, g_step, features, training=True, rng=dropout_rng)
            readout = run_predictor(params, state.z_out, pairs, training=True, rng=dropout_rng)
        count = batch.shape[0]
        loss, pos_grad, neg_grad = compute_loss(
            model_cfg.loss, readout.scores[:count], readout.scores[count:], negatives.owners, margins
        )
        score_grads = np.concatenate([pos_grad, neg_grad])
        if heuristic:
            return loss, heuristic_backward(params, state, readout, score_grads)
        return loss, backward(params, state, readout, score_grads)

    logger.info(f"Entrenamiento: {positives.shape[0]} positivos, {train_cfg.epochs} épocas, pérdida {model_cfg.loss.value}")
    return _run_epochs(params, g, positives, train_cfg, step, eval_hook, negative_rng, batch_rng)


def fit_predictor_only(g: SparseGraph, features: Optional[np.ndarray], positives: np.ndarray,
                       propagation: Union[ModelParams, FormulationConfig], model_cfg: ModelConfig,
                       train_cfg: TrainConfig, eval_hook: Optional[ValidationHook] = None,
                       cache_propagation: bool = True) -> FitResult:
    """
    Entrena solo el predictor sobre una propagación congelada.

    Args:
        g: Grafo de entrenamiento
        features: Características N×F_in o None
        positives: Aristas positivas de entrenamiento
        propagation: Parámetros ya entrenados o una heurística generalizada
        model_cfg: Configuración del modelo (la del checkpoint si se pasan parámetros)
        train_cfg: Configuración del entrenamiento
        eval_hook: Métrica de validación por época
        cache_propagation: Calcular Z una sola vez

    Returns:
        Parámetros con α, β y entrada intactos y el predictor entrenado
    """
    if model_cfg.predictor is PredictorKind.HEURISTIC:
        raise ContractError("La lectura heurística no tiene predictor que entrenar")
    positives = np.asarray(positives, dtype=np.int64).reshape(-1, 2)
    negative_rng, batch_rng, dropout_rng = training_streams(train_cfg.seed)
    if isinstance(propagation, FormulationConfig):
        params = with_formulation(init_params(model_cfg, g, seed=train_cfg.seed), propagation)
    else:
        params = propagation.copy()
    params.frozen = frozenset(name for name in params.names() if not name.startswith("mlp."))
    cached_z = forward(params, g, features).z if cache_propagation else None

    def step(batch, negatives, margins):
        z = cached_z if cached_z is not None else forward(params, g, features).z
        pairs = np.concatenate([batch, negatives.pairs], axis=0)
        predictor = run_predictor(params, z, pairs, training=True, rng=dropout_rng)
        count = batch.shape[0]
        loss, pos_grad, neg_grad = compute_loss(
            params.config.loss, predictor.scores[:count], predictor.scores[count:], negatives.owners, margins
        )
        return loss, predictor_gradients(params, predictor, np.concatenate([pos_grad, neg_grad]))

    logger.info(f"Entrenamiento solo del predictor: {positives.shape[0]} positivos")
    return _run_epochs(params, g, positives, train_cfg, step, eval_hook, negative_rng, batch_rng)
