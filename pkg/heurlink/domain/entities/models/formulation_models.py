"""
Modelos específicos de la formulación unificada de heurísticas.
Define los identificadores de heurística, sus parámetros y la configuración
(operadores por capa y pesos β) que realiza H = Σ β^(l) Π 𝔸^(m).
"""
from enum import Enum
from typing import List, Tuple, TypedDict, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from heurlink.domain.entities.models.graph_models import OperatorKind


class HeuristicId(str, Enum):
    """Heurísticas soportadas por la formulación unificada"""
    CN = "cn"
    LLHN = "llhn"
    RA = "ra"
    KI = "katz"
    GLHN = "glhn"
    RWR = "rwr"
    LPI = "lpi"
    LRW = "lrw"
    RA_SQ = "ra_sq"
    RA_SYM = "ra_sym"
    FP = "fp"


LOCAL_HEURISTICS = frozenset({
    HeuristicId.CN, HeuristicId.LLHN, HeuristicId.RA, HeuristicId.RA_SQ, HeuristicId.RA_SYM,
})


class HeuristicSpec(BaseModel):
    """Heurística con sus parámetros (amortiguamiento, reinicio y truncamiento)"""
    model_config = ConfigDict(frozen=True)

    method: HeuristicId = Field(..., description="Identificador de la heurística")
    gamma: float = Field(0.5, gt=0.0, lt=1.0, description="Amortiguamiento γ para KI y LPI")
    phi: float = Field(0.5, gt=0.0, lt=1.0, description="Amortiguamiento φ para GLHN")
    alpha: float = Field(0.5, gt=0.0, lt=1.0, description="Probabilidad de continuar α para RWR, LRW y FP")
    order: int = Field(20, ge=0, description="Orden de truncamiento L")

    @model_validator(mode="after")
    def _check_order(self) -> "HeuristicSpec":
        if self.method is HeuristicId.LPI and self.order < 2:
            raise ValueError("LPI requiere un orden de truncamiento L >= 2")
        if self.method is HeuristicId.LRW and self.order < 1:
            raise ValueError("LRW requiere un orden de truncamiento L >= 1")
        return self


class MixedOperatorSpec(BaseModel):
    """Mezcla convexa α_rs·Ã_rs + α_cs·Ã_cs + α_sym·Ã_sym con pesos explícitos"""
    model_config = ConfigDict(frozen=True)

    weights: Tuple[float, float, float] = Field(..., description="Pesos (rs, cs, sym)")

    @field_validator("weights")
    @classmethod
    def _check_weights(cls, value: Tuple[float, float, float]) -> Tuple[float, float, float]:
        if any(w < 0 for w in value):
            raise ValueError("Los pesos de mezcla deben ser no negativos")
        if abs(sum(value) - 1.0) > 1e-9:
            raise ValueError("Los pesos de mezcla deben sumar 1")
        return value

    def transpose(self) -> "MixedOperatorSpec":
        rs, cs, sym = self.weights
        return MixedOperatorSpec(weights=(cs, rs, sym))


OperatorChoice = Union[OperatorKind, MixedOperatorSpec]


def transpose_choice(choice: OperatorChoice) -> OperatorChoice:
    """Transpone un operador discreto o mezclado."""
    return choice.transpose()


class FormulationConfig(BaseModel):
    """
    Configuración de la formulación unificada: operadores 𝔸^(1..L) y pesos β^(0..L).

    La puntuación del enlace (i, j) es la entrada (i, j) de
    H = Σ_l β^(l) 𝔸^(1) 𝔸^(2) ··· 𝔸^(l), con 𝔸^(0) = I_N implícito.
    """
    model_config = ConfigDict(frozen=True)

    max_order: int = Field(..., ge=0, description="Orden máximo L")
    operator_specs: List[OperatorChoice] = Field(default_factory=list, description="Operadores 𝔸^(1..L)")
    betas: List[float] = Field(..., description="Pesos β^(0..L)")

    @model_validator(mode="after")
    def _check_lengths(self) -> "FormulationConfig":
        if len(self.operator_specs) != self.max_order:
            raise ValueError("La lista de operadores debe tener longitud L")
        if len(self.betas) != self.max_order + 1:
            raise ValueError("La lista de betas debe tener longitud L + 1")
        return self

    def transpose(self) -> "FormulationConfig":
        """Transpone cada operador: la H resultante es (Σ β^(l) 𝔸^(l)···𝔸^(1))ᵀ."""
        return FormulationConfig(
            max_order=self.max_order,
            operator_specs=[transpose_choice(op) for op in self.operator_specs],
            betas=list(self.betas),
        )


class HeuristicDeviation(TypedDict):
    """Desviaciones relativas máximas entre las tres vías de cálculo de una heurística"""
    method: str
    pairs: int
    oracle_vs_matrix: float
    matrix_vs_formulation: float
    oracle_vs_formulation: float
    max_deviation: float
