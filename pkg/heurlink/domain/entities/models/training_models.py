"""
Modelos específicos del entrenamiento.
Define la configuración de entrenamiento, los gradientes, los lotes de enlaces
y el historial por época.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, TypedDict

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from heurlink.domain.entities.models.model_models import ModelParams


class MarginMode(str, Enum):
    """Márgenes γ_ij de la pérdida AUC"""
    CONSTANT = "constant"
    DEGREE = "degree"


class TrainConfig(BaseModel):
    """Hiperparámetros del bucle de entrenamiento"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    epochs: int = Field(100, ge=0, description="Número de épocas")
    learning_rate: float = Field(0.001, ge=0.0, description="Tasa de aprendizaje de Adam")
    negatives_per_positive: int = Field(1, ge=1, description="Negativos muestreados por positivo")
    margin_base: float = Field(1.0, gt=0.0, description="Margen base de la pérdida AUC")
    margin_mode: MarginMode = Field(MarginMode.CONSTANT, description="Margen constante o escalado por grado")
    batch_size: Optional[int] = Field(None, ge=1, description="Positivos por paso (None = lote completo)")
    mask_targets: bool = Field(False, description="Propagar sin las aristas positivas del lote en cada paso")
    seed: int = Field(0, description="Semilla de todas las fuentes aleatorias")
    adam_beta1: float = Field(0.9, ge=0.0, lt=1.0)
    adam_beta2: float = Field(0.999, ge=0.0, lt=1.0)
    adam_eps: float = Field(1e-8, gt=0.0)
    eval_metric: str = Field("hits@100", description="Métrica de validación para seleccionar el mejor checkpoint")


@dataclass
class GradientBundle:
    """Un gradiente por parámetro, con la misma forma que ModelParams.arrays"""
    grads: Dict[str, np.ndarray]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.grads[name]

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(g)) for g in self.grads.values())

    def max_abs(self) -> float:
        return max((float(np.max(np.abs(g))) for g in self.grads.values() if g.size), default=0.0)


@dataclass
class NegativeSample:
    """Pares negativos (i, k) con el índice del positivo al que pertenecen"""
    pairs: np.ndarray
    owners: np.ndarray
    skipped: int = 0


@dataclass
class LinkBatch:
    """Lote de positivos y negativos agrupados por positivo"""
    positives: np.ndarray
    negatives: np.ndarray
    owners: np.ndarray
    margins: Optional[np.ndarray] = None


@dataclass
class EpochRecord:
    epoch: int
    loss: float
    val_metric: float


@dataclass
class TrainHistory:
    """Historial de entrenamiento por época"""
    records: List[EpochRecord] = field(default_factory=list)

    def append(self, epoch: int, loss: float, val_metric: float) -> None:
        self.records.append(EpochRecord(epoch=epoch, loss=loss, val_metric=val_metric))

    @property
    def losses(self) -> List[float]:
        return [r.loss for r in self.records]

    @property
    def val_metrics(self) -> List[float]:
        return [r.val_metric for r in self.records]


@dataclass
class FitResult:
    """Mejores parámetros según validación, historial y época elegida"""
    params: ModelParams
    history: TrainHistory
    best_epoch: int = 0
    best_metric: float = float("nan")


class GradcheckResult(TypedDict):
    """Error relativo máximo por grupo de parámetros"""
    max_rel_error: Dict[str, float]
    checked_entries: Dict[str, int]
    loss: str
