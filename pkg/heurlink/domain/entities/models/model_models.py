"""
Modelos específicos de HL-GNN.
Define la configuración del modelo, las estrategias de inicialización de β y
el contenedor de parámetros entrenables.
"""
import copy
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterator, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from heurlink.domain.entities.models.formulation_models import FormulationConfig, OperatorChoice
from heurlink.domain.entities.models.graph_models import SparseGraph, SparseOperator


class BetaInit(str, Enum):
    """Estrategias de inicialización de los pesos β^(l)"""
    KI = "ki"
    KATZ = "katz"
    RWR = "rwr"
    RANDOM = "random"
    UNIFORM = "uniform"
    REVERSE_KI = "reverse_ki"
    FINAL_LAYER = "final_layer"


class LossKind(str, Enum):
    """Funciones de pérdida soportadas"""
    AUC = "auc"
    BCE = "bce"


class PredictorKind(str, Enum):
    """
    Lectura de la puntuación de un par.

    `mlp` aplica el MLP sobre z_i ⊙ z_j; `heuristic` propaga el indicador del
    nodo origen y lee la heurística generalizada H[i, j] sin parámetros propios.
    """
    MLP = "mlp"
    HEURISTIC = "heuristic"


class ModelConfig(BaseModel):
    """Hiperparámetros de HL-GNN y de su predictor MLP"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    predictor: PredictorKind = Field(PredictorKind.MLP, description="Lectura de las puntuaciones")
    learn_operators: bool = Field(True, description="Aprender la mezcla α; si es False queda fija en la inicial")
    depth: int = Field(20, ge=1, description="Profundidad L")
    hidden_dim: int = Field(64, gt=0, description="Dimensión oculta F_h")
    input_dim: int = Field(0, ge=0, description="Dimensión de las características F_in (0 = sin características)")
    use_preprocessing: bool = Field(True, description="Capa lineal de preprocesado sobre las características")
    use_node_embeddings: bool = Field(False, description="Embeddings entrenables por nodo")
    embedding_dim: int = Field(64, gt=0, description="Dimensión de los embeddings")
    mlp_layers: int = Field(3, ge=1, description="Número de capas del predictor")
    mlp_hidden_dim: int = Field(256, gt=0, description="Dimensión oculta del predictor")
    beta_init: BetaInit = Field(BetaInit.RWR, description="Inicialización de β")
    init_parameter: float = Field(0.2, gt=0.0, lt=1.0, description="γ (KI) o α (RWR) de la inicialización")
    dropout_rate: float = Field(0.5, ge=0.0, lt=1.0, description="Tasa de dropout")
    loss: LossKind = Field(LossKind.BCE, description="Función de pérdida")
    precision: Literal["float64", "float32"] = Field("float64", description="Precisión numérica")

    @model_validator(mode="after")
    def _check_inputs(self) -> "ModelConfig":
        if self.predictor is PredictorKind.HEURISTIC:
            if self.input_dim != 0 or self.use_node_embeddings:
                raise ValueError("La lectura heurística no admite características ni embeddings")
            if self.dropout_rate != 0.0:
                raise ValueError("La lectura heurística no admite dropout")
        elif self.input_dim == 0:
            if not self.use_node_embeddings:
                raise ValueError("Sin características es obligatorio activar use_node_embeddings")
        elif (not self.use_preprocessing and not self.use_node_embeddings
              and self.hidden_dim != self.input_dim):
            raise ValueError("Sin preprocesado hidden_dim debe coincidir con input_dim")
        return self

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(self.precision)

    @property
    def combine_fan_in(self) -> int:
        """
        Entrada de la capa lineal `combine` que lleva la entrada a F_h.

        Existe cuando se concatenan características y embeddings, o cuando los
        embeddings solos tienen una dimensión distinta de F_h. 0 si no existe.
        """
        if not self.use_node_embeddings:
            return 0
        if self.input_dim == 0:
            return 0 if self.embedding_dim == self.hidden_dim else self.embedding_dim
        feature_dim = self.hidden_dim if self.use_preprocessing else self.input_dim
        return feature_dim + self.embedding_dim

    @property
    def mlp_widths(self) -> List[int]:
        if self.predictor is PredictorKind.HEURISTIC:
            return []
        return [self.hidden_dim] + [self.mlp_hidden_dim] * (self.mlp_layers - 1) + [1]

    def parameter_shapes(self, num_nodes: int) -> Dict[str, Tuple[int, ...]]:
        """Forma de cada bloque de parámetros para un grafo de `num_nodes` nodos."""
        shapes: Dict[str, Tuple[int, ...]] = {
            "alpha_logits": (self.depth, 3),
            "betas": (self.depth + 1,),
        }
        if self.input_dim > 0 and self.use_preprocessing:
            shapes["preproc.weight"] = (self.input_dim, self.hidden_dim)
            shapes["preproc.bias"] = (self.hidden_dim,)
        if self.use_node_embeddings:
            shapes["embeddings"] = (num_nodes, self.embedding_dim)
        if self.combine_fan_in:
            shapes["combine.weight"] = (self.combine_fan_in, self.hidden_dim)
            shapes["combine.bias"] = (self.hidden_dim,)
        widths = self.mlp_widths
        for k in range(len(widths) - 1):
            shapes[f"mlp.{k}.weight"] = (widths[k], widths[k + 1])
            shapes[f"mlp.{k}.bias"] = (widths[k + 1],)
        return shapes


def parameter_group(name: str) -> str:
    """Grupo al que pertenece un parámetro por su nombre."""
    if name == "alpha_logits":
        return "alpha"
    if name == "betas":
        return "beta"
    if name == "embeddings":
        return "embedding"
    if name.startswith("mlp."):
        return "mlp"
    return "preproc"


@dataclass
class ModelParams:
    """
    Parámetros de HL-GNN.

    `arrays` contiene los bloques por nombre: `alpha_logits` (L×3),
    `betas` (L+1), `preproc.weight`/`preproc.bias`, `combine.weight`/
    `combine.bias`, `embeddings` (N×E) y `mlp.{k}.weight`/`mlp.{k}.bias`.
    Con `fixed_operators` la propagación usa operadores discretos o mezclas
    fijas en lugar de softmax(alpha_logits).
    """
    config: ModelConfig
    num_nodes: int
    arrays: Dict[str, np.ndarray]
    fixed_operators: Optional[Tuple[OperatorChoice, ...]] = None
    frozen: FrozenSet[str] = field(default_factory=frozenset)

    @property
    def alpha_logits(self) -> np.ndarray:
        return self.arrays["alpha_logits"]

    @property
    def betas(self) -> np.ndarray:
        return self.arrays["betas"]

    @property
    def mlp_depth(self) -> int:
        return max(0, len(self.config.mlp_widths) - 1)

    def mlp_layer(self, k: int) -> Tuple[np.ndarray, np.ndarray]:
        return self.arrays[f"mlp.{k}.weight"], self.arrays[f"mlp.{k}.bias"]

    def trainable(self) -> Iterator[Tuple[str, np.ndarray]]:
        for name, value in self.arrays.items():
            if name not in self.frozen:
                yield name, value

    def names(self) -> List[str]:
        return list(self.arrays.keys())

    def copy(self) -> "ModelParams":
        return ModelParams(
            config=self.config,
            num_nodes=self.num_nodes,
            arrays={name: value.copy() for name, value in self.arrays.items()},
            fixed_operators=copy.deepcopy(self.fixed_operators),
            frozen=frozenset(self.frozen),
        )


@dataclass
class MaterializedFormulation:
    """
    Heurística generalizada exportada desde unos parámetros.

    `config` es la formulación heurística: la puntuación del par (i, j) es la
    entrada (i, j) de H = Σ β^(l) 𝔸^(1)···𝔸^(l), y `dense`, si existe, es esa
    misma H. La propagación del modelo usa la transpuesta, Z = Hᵀ·X.
    `alphas` son los pesos de mezcla (rs, cs, sym) por capa de propagación.
    """
    config: FormulationConfig
    alphas: np.ndarray
    betas: np.ndarray
    dense: Optional[np.ndarray] = None

    def propagation_config(self) -> FormulationConfig:
        """Operadores en el orden en que actúan sobre X."""
        return self.config.transpose()


@dataclass
class ForwardState:
    """
    Estados retenidos por la propagación para la retropropagación.

    `layers[l]` es Z^(l) (con `layers[0]` = X), `operators[l-1]` es 𝔸^(l) y
    `mix_weights` las filas softmax(alpha_logits) cuando los operadores se
    aprenden. `z` es la suma ponderada y `z_out` la salida tras el dropout.
    """
    graph: SparseGraph
    features: Optional[np.ndarray]
    preprocessed: Optional[np.ndarray]
    combined_input: Optional[np.ndarray]
    layers: List[np.ndarray]
    operators: List[SparseOperator]
    mix_weights: Optional[np.ndarray]
    z: np.ndarray
    z_out: np.ndarray
    dropout_mask: Optional[np.ndarray] = None

    @property
    def x(self) -> np.ndarray:
        return self.layers[0]


@dataclass
class PredictorPass:
    """Activaciones del predictor MLP sobre z_i ⊙ z_j"""
    pairs: np.ndarray
    inputs: List[np.ndarray]
    pre_activations: List[np.ndarray]
    masks: List[Optional[np.ndarray]]
    scores: np.ndarray


@dataclass
class HeuristicPass:
    """
    Lectura heurística de un lote de pares.

    `columns[p]` es la columna de Z (un indicador por nodo origen distinto)
    de la que se lee la puntuación del par p en la fila de su destino.
    """
    pairs: np.ndarray
    sources: np.ndarray
    columns: np.ndarray
    scores: np.ndarray
