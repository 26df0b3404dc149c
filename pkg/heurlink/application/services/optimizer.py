"""
Optimizador Adam con corrección de sesgo.
"""
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from heurlink.domain.entities.models import GradientBundle, ModelParams
from heurlink.domain.exceptions import DimensionMismatchError, NumericError


@dataclass
class AdamState:
    """Momentos por parámetro y contador de pasos"""
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(params: ModelParams, grads: GradientBundle, state: AdamState, lr: float) -> None:
    """
    Un paso de Adam sobre los parámetros entrenables, en el sitio.

    Args:
        params: Parámetros (se modifican)
        grads: Gradientes con la misma forma
        state: Estado de momentos (se modifica)
        lr: Tasa de aprendizaje

    Raises:
        NumericError: Si algún gradiente no es finito; el paso no se aplica
    """
    for name, value in params.trainable():
        grad = grads[name]
        if grad.shape != value.shape:
            raise DimensionMismatchError(f"Gradiente con forma incorrecta para {name}")
        if not np.all(np.isfinite(grad)):
            raise NumericError(f"Gradiente no finito en {name}; paso abortado")

    state.step += 1
    bc1 = 1.0 - state.beta1 ** state.step
    bc2 = 1.0 - state.beta2 ** state.step
    step_size = lr / bc1

    for name, value in params.trainable():
        grad = grads[name]
        if name not in state.m:
            state.m[name] = np.zeros_like(value)
            state.v[name] = np.zeros_like(value)

        m = state.m[name]
        v = state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * grad
        v *= state.beta2
        v += (1.0 - state.beta2) * (grad * grad)

        denom = np.sqrt(v / bc2) + state.eps
        value -= (step_size * m / denom).astype(value.dtype)
