"""
Diferenciación en modo inverso de HL-GNN.
Propaga ∂𝓛/∂s por el predictor, el gather/scatter de Hadamard, la agregación
β-ponderada, la cadena adjunta de operadores y la entrada (preprocesado y
embeddings). La lectura heurística entra directamente en ∂𝓛/∂Z.
"""
import numpy as np

from heurlink.application.services.graph_ops import normalize, spmm
from heurlink.domain.entities.models import (
    ForwardState,
    GradientBundle,
    HeuristicPass,
    MIXABLE_KINDS,
    ModelParams,
    PredictorPass,
)
from heurlink.domain.exceptions import DimensionMismatchError


def _predictor_backward(params: ModelParams, predictor: PredictorPass, score_grads: np.ndarray,
                        grads: dict) -> np.ndarray:
    upstream = score_grads.reshape(-1, 1)
    for k in reversed(range(params.mlp_depth)):
        weight, _ = params.mlp_layer(k)
        grads[f"mlp.{k}.weight"] = predictor.inputs[k].T @ upstream
        grads[f"mlp.{k}.bias"] = upstream.sum(axis=0)
        upstream = upstream @ weight.T
        if k > 0:
            mask = predictor.masks[k - 1]
            if mask is not None:
                upstream = upstream * mask
            upstream = upstream * (predictor.pre_activations[k - 1] > 0)
    return upstream


def _propagation_backward(params: ModelParams, state: ForwardState, dz: np.ndarray, grads: dict) -> np.ndarray:
    """∂𝓛/∂β y ∂𝓛/∂alpha_logits a partir de ∂𝓛/∂Z; devuelve ∂𝓛/∂X."""
    betas = params.betas
    depth = params.config.depth
    grads["betas"] = np.array([np.sum(dz * layer) for layer in state.layers], dtype=betas.dtype)

    # Cadena adjunta: G^(l-1) = 𝔸^(l)ᵀ G^(l) + β^(l-1) ∂𝓛/∂Z
    dtype = params.config.dtype
    basis = None
    if state.mix_weights is not None and "alpha_logits" not in params.frozen:
        basis = [normalize(state.graph, kind).astype(dtype) for kind in MIXABLE_KINDS]
    alpha_grad = np.zeros((depth, 3))
    adjoint = betas[depth] * dz
    for layer in range(depth, 0, -1):
        previous = state.layers[layer - 1]
        if basis is None:
            adjoint = spmm(state.operators[layer - 1], adjoint, transpose=True)
        else:
            weights = state.mix_weights[layer - 1]
            pulled = [spmm(op, adjoint, transpose=True) for op in basis]
            mix_grad = np.array([np.sum(t * previous) for t in pulled])
            alpha_grad[layer - 1] = weights * (mix_grad - np.dot(weights, mix_grad))
            adjoint = sum(w * t for w, t in zip(weights, pulled))
        adjoint = adjoint + betas[layer - 1] * dz
    if basis is not None:
        grads["alpha_logits"] = alpha_grad.astype(dtype)
    return adjoint


def _bundle(params: ModelParams, grads: dict) -> GradientBundle:
    for name in params.frozen:
        grads[name] = np.zeros_like(params.arrays[name])
    return GradientBundle(grads={name: np.asarray(g, dtype=params.arrays[name].dtype) for name, g in grads.items()})


def backward(params: ModelParams, state: ForwardState, predictor: PredictorPass,
             score_grads: np.ndarray) -> GradientBundle:
    """
    Gradientes exactos de la pérdida respecto de todos los parámetros.

    Args:
        params: Parámetros usados en la propagación
        state: Estado retenido por `forward`
        predictor: Pasada del predictor sobre `state.z_out`
        score_grads: ∂𝓛/∂s por par de `predictor.pairs`

    Returns:
        Un gradiente por parámetro (cero para los no utilizados)

    Raises:
        DimensionMismatchError: Si el estado no corresponde a los parámetros
    """
    score_grads = np.asarray(score_grads)
    if score_grads.shape != predictor.scores.shape:
        raise DimensionMismatchError("score_grads no coincide con las puntuaciones del predictor")
    if len(state.layers) != params.config.depth + 1:
        raise DimensionMismatchError("El estado retenido no corresponde a la profundidad del modelo")

    grads = {name: np.zeros_like(value) for name, value in params.arrays.items()}
    hadamard_grad = _predictor_backward(params, predictor, score_grads, grads)

    # Scatter de z_i ⊙ z_j hacia las filas de Z
    src, dst = predictor.pairs[:, 0], predictor.pairs[:, 1]
    z_out = state.z_out
    dz = np.zeros_like(z_out)
    np.add.at(dz, src, hadamard_grad * z_out[dst])
    np.add.at(dz, dst, hadamard_grad * z_out[src])
    if state.dropout_mask is not None:
        dz = dz * state.dropout_mask

    adjoint = _propagation_backward(params, state, dz, grads)
    _input_backward(params, state, adjoint, grads)
    return _bundle(params, grads)


def _input_backward(params: ModelParams, state: ForwardState, x_grad: np.ndarray, grads: dict) -> None:
    cfg = params.config
    feature_grad = x_grad
    if state.combined_input is not None:
        grads["combine.weight"] = state.combined_input.T @ x_grad
        grads["combine.bias"] = x_grad.sum(axis=0)
        feature_grad = x_grad @ params.arrays["combine.weight"].T

    if state.preprocessed is None:
        grads["embeddings"] = feature_grad
        return
    if state.combined_input is not None:
        width = state.preprocessed.shape[1]
        grads["embeddings"] = feature_grad[:, width:]
        feature_grad = feature_grad[:, :width]

    if cfg.use_preprocessing:
        grads["preproc.weight"] = state.features.T @ feature_grad
        grads["preproc.bias"] = feature_grad.sum(axis=0)


def heuristic_backward(params: ModelParams, state: ForwardState, readout: HeuristicPass,
                       score_grads: np.ndarray) -> GradientBundle:
    """
    Gradientes de la lectura heurística: solo β y, si se aprenden, alpha_logits.

    Args:
        params: Parámetros usados en la propagación
        state: Estado retenido por `heuristic_forward`
        readout: Lectura de los pares
        score_grads: ∂𝓛/∂s por par de `readout.pairs`
    """
    score_grads = np.asarray(score_grads)
    if score_grads.shape != readout.scores.shape:
        raise DimensionMismatchError("score_grads no coincide con las puntuaciones de la lectura")
    if len(state.layers) != params.config.depth + 1:
        raise DimensionMismatchError("El estado retenido no corresponde a la profundidad del modelo")

    grads = {name: np.zeros_like(value) for name, value in params.arrays.items()}
    dz = np.zeros_like(state.z)
    np.add.at(dz, (readout.pairs[:, 1], readout.columns), score_grads)
    _propagation_backward(params, state, dz, grads)
    return _bundle(params, grads)


def predictor_gradients(params: ModelParams, predictor: PredictorPass,
                        score_grads: np.ndarray) -> GradientBundle:
    """Gradientes solo del predictor MLP; el resto del modelo recibe ceros."""
    grads = {name: np.zeros_like(value) for name, value in params.arrays.items()}
    _predictor_backward(params, predictor, np.asarray(score_grads), grads)
    return GradientBundle(grads=grads)
