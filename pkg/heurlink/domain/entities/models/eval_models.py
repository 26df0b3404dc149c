"""
Modelos específicos de la evaluación.
Define la partición de aristas y el reporte de métricas.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


@dataclass(frozen=True, eq=False)
class EdgeSplit:
    """Partición aleatoria de aristas en entrenamiento, validación y prueba"""
    num_nodes: int
    train: np.ndarray
    valid_pos: np.ndarray
    valid_neg: np.ndarray
    test_pos: np.ndarray
    test_neg: np.ndarray
    seed: int
    valid_ratio: float
    test_ratio: float

    def partition(self, name: str) -> "tuple[np.ndarray, np.ndarray]":
        """Positivos y negativos de `valid` o `test`."""
        if name == "valid":
            return self.valid_pos, self.valid_neg
        if name == "test":
            return self.test_pos, self.test_neg
        raise KeyError(name)


class EvalReport(BaseModel):
    """Reporte de una métrica de ranking"""
    model_config = ConfigDict(populate_by_name=True)

    metric: str = Field(..., description="Nombre de la métrica")
    k: Optional[int] = Field(None, alias="K", description="K de Hits@K")
    value: float = Field(..., ge=0.0, le=1.0, description="Valor de la métrica")
    n_pos: int = Field(..., description="Número de positivos")
    n_neg: int = Field(..., description="Número de negativos")
    seed: Optional[int] = Field(None, description="Semilla de la partición")
