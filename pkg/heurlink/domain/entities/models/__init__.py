"""
Exportación de todos los modelos de dominio.
Este módulo centraliza la exportación de todos los modelos para facilitar su importación.
"""
# Modelos de grafos
from heurlink.domain.entities.models.graph_models import (
    DenseMatrix,
    MIXABLE_KINDS,
    OperatorKind,
    SparseGraph,
    SparseOperator,
)

# Modelos de la formulación
from heurlink.domain.entities.models.formulation_models import (
    FormulationConfig,
    HeuristicDeviation,
    HeuristicId,
    HeuristicSpec,
    LOCAL_HEURISTICS,
    MixedOperatorSpec,
    OperatorChoice,
)

# Modelos de HL-GNN
from heurlink.domain.entities.models.model_models import (
    BetaInit,
    ForwardState,
    LossKind,
    MaterializedFormulation,
    ModelConfig,
    ModelParams,
    HeuristicPass,
    PredictorKind,
    PredictorPass,
    parameter_group,
)

# Modelos de entrenamiento
from heurlink.domain.entities.models.training_models import (
    EpochRecord,
    FitResult,
    GradcheckResult,
    GradientBundle,
    LinkBatch,
    MarginMode,
    NegativeSample,
    TrainConfig,
    TrainHistory,
)

# Modelos de evaluación
from heurlink.domain.entities.models.eval_models import (
    EdgeSplit,
    EvalReport,
)

# Modelos de datos
from heurlink.domain.entities.models.data_models import (
    Dataset,
)

# Modelos de errores
from heurlink.domain.entities.models.error_models import (
    ErrorResult,
)

__all__ = [
    # Grafos
    'DenseMatrix',
    'MIXABLE_KINDS',
    'OperatorKind',
    'SparseGraph',
    'SparseOperator',

    # Formulación
    'FormulationConfig',
    'HeuristicDeviation',
    'HeuristicId',
    'HeuristicSpec',
    'LOCAL_HEURISTICS',
    'MixedOperatorSpec',
    'OperatorChoice',

    # HL-GNN
    'BetaInit',
    'ForwardState',
    'LossKind',
    'MaterializedFormulation',
    'ModelConfig',
    'ModelParams',
    'HeuristicPass',
    'PredictorKind',
    'PredictorPass',
    'parameter_group',

    # Entrenamiento
    'EpochRecord',
    'FitResult',
    'GradcheckResult',
    'GradientBundle',
    'LinkBatch',
    'MarginMode',
    'NegativeSample',
    'TrainConfig',
    'TrainHistory',

    # Evaluación
    'EdgeSplit',
    'EvalReport',

    # Datos
    'Dataset',

    # Errores
    'ErrorResult',
]
