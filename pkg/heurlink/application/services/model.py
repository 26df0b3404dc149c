"""
Propagación de HL-GNN y predictor de enlaces.
Este módulo inicializa los parámetros, ejecuta Z = Σ β^(l) 𝔸^(l)···𝔸^(1) X con
operadores mezclados por softmax y puntúa pares con un MLP sobre z_i ⊙ z_j o,
con la lectura heurística, directamente con la entrada H[i, j].
"""
import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import softmax

from heurlink.application.services.graph_ops import mix_operators, resolve_operator, spmm
from heurlink.application.services.heuristics import heuristic_config, lrw_source_factor
from heurlink.domain.entities.models import (
    BetaInit,
    ForwardState,
    FormulationConfig,
    HeuristicId,
    HeuristicPass,
    HeuristicSpec,
    MIXABLE_KINDS,
    MaterializedFormulation,
    MixedOperatorSpec,
    ModelConfig,
    ModelParams,
    OperatorKind,
    PredictorKind,
    PredictorPass,
    SparseGraph,
    SparseOperator,
)
from heurlink.domain.exceptions import (
    ContractError,
    DenseExportError,
    DimensionMismatchError,
    InvalidGraphError,
)
from heurlink.infrastructure.config.settings import DENSE_EXPORT_MAX_NODES

logger = logging.getLogger(__name__)


def initial_betas(cfg: ModelConfig, rng: np.random.Generator) -> np.ndarray:
    """
    Pesos β^(0..L) según la estrategia de inicialización.

    Args:
        cfg: Configuración del modelo (depth L, beta_init, init_parameter)
        rng: Generador para la inicialización aleatoria

    Returns:
        Vector de L+1 pesos
    """
    depth = cfg.depth
    p = cfg.init_parameter
    orders = np.arange(depth + 1, dtype=np.float64)
    strategy = cfg.beta_init
    if strategy is BetaInit.KI:
        return p ** orders
    if strategy is BetaInit.KATZ:
        betas = p ** orders
        betas[0] = 0.0
        return betas
    if strategy is BetaInit.RWR:
        return (1.0 - p) * p ** orders
    if strategy is BetaInit.RANDOM:
        return rng.standard_normal(depth + 1)
    if strategy is BetaInit.UNIFORM:
        return np.full(depth + 1, 1.0 / (depth + 1))
    if strategy is BetaInit.REVERSE_KI:
        return p ** (depth - orders)
    betas = np.zeros(depth + 1)
    betas[-1] = 1.0
    return betas


def _uniform(rng: np.random.Generator, fan_in: int, shape: Tuple[int, ...]) -> np.ndarray:
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


def init_params(cfg: ModelConfig, g: SparseGraph, seed: int = 0) -> ModelParams:
    """
    Inicializa los parámetros de HL-GNN.

    alpha_logits empieza en cero (softmax uniforme 1/3) y las capas densas con
    una uniforme acotada U(-1/√fan_in, 1/√fan_in).

    Args:
        cfg: Configuración del modelo
        g: Grafo sobre el que se propagará
        seed: Semilla de la inicialización

    Returns:
        Parámetros deterministas dada la semilla
    """
    beta_rng, dense_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(2))
    dtype = cfg.dtype
    arrays = {
        "alpha_logits": np.zeros((cfg.depth, 3)),
        "betas": initial_betas(cfg, beta_rng),
    }

    if cfg.input_dim > 0 and cfg.use_preprocessing:
        arrays["preproc.weight"] = _uniform(dense_rng, cfg.input_dim, (cfg.input_dim, cfg.hidden_dim))
        arrays["preproc.bias"] = _uniform(dense_rng, cfg.input_dim, (cfg.hidden_dim,))
    if cfg.use_node_embeddings:
        arrays["embeddings"] = _uniform(dense_rng, cfg.embedding_dim, (g.num_nodes, cfg.embedding_dim))
    fan_in = cfg.combine_fan_in
    if fan_in:
        arrays["combine.weight"] = _uniform(dense_rng, fan_in, (fan_in, cfg.hidden_dim))
        arrays["combine.bias"] = _uniform(dense_rng, fan_in, (cfg.hidden_dim,))

    widths = cfg.mlp_widths
    for k in range(len(widths) - 1):
        arrays[f"mlp.{k}.weight"] = _uniform(dense_rng, widths[k], (widths[k], widths[k + 1]))
        arrays[f"mlp.{k}.bias"] = _uniform(dense_rng, widths[k], (widths[k + 1],))

    arrays = {name: value.astype(dtype) for name, value in arrays.items()}
    frozen = frozenset() if cfg.learn_operators else frozenset({"alpha_logits"})
    logger.debug(f"Parámetros inicializados: L={cfg.depth}, beta_init={cfg.beta_init.value}, semilla={seed}")
    return ModelParams(config=cfg, num_nodes=g.num_nodes, arrays=arrays, frozen=frozen)


def mixture_weights(params: ModelParams) -> np.ndarray:
    """softmax(alpha_logits) por capa, en 64 bits."""
    return softmax(params.alpha_logits.astype(np.float64), axis=1)


def _assemble_input(params: ModelParams, features: Optional[np.ndarray]):
    cfg = params.config
    dtype = cfg.dtype
    if cfg.predictor is PredictorKind.HEURISTIC:
        raise ContractError("La lectura heurística no usa características; use heuristic_forward")
    if cfg.input_dim > 0:
        if features is None:
            raise DimensionMismatchError("El modelo espera características y no se proporcionaron")
        features = np.asarray(features, dtype=dtype)
        if features.shape != (params.num_nodes, cfg.input_dim):
            raise DimensionMismatchError(
                "Dimensiones de las características incompatibles",
                details=f"esperado {(params.num_nodes, cfg.input_dim)}, recibido {features.shape}",
            )
    elif features is not None:
        raise DimensionMismatchError("El modelo no admite características (input_dim = 0)")
    elif not cfg.use_node_embeddings:
        raise ContractError("Sin características es obligatorio usar embeddings de nodo")

    preprocessed = None
    if features is not None:
        if cfg.use_preprocessing:
            preprocessed = features @ params.arrays["preproc.weight"] + params.arrays["preproc.bias"]
        else:
            preprocessed = features

    combined = None
    if preprocessed is None:
        x = params.arrays["embeddings"]
        if cfg.combine_fan_in:
            combined = x
            x = combined @ params.arrays["combine.weight"] + params.arrays["combine.bias"]
    elif cfg.use_node_embeddings:
        combined = np.concatenate([preprocessed, params.arrays["embeddings"]], axis=1)
        x = combined @ params.arrays["combine.weight"] + params.arrays["combine.bias"]
    else:
        x = preprocessed
    return features, preprocessed, combined, x


def layer_operators(params: ModelParams, g: SparseGraph):
    """Operadores 𝔸^(1..L) de la propagación y, si se aprenden, sus pesos de mezcla."""
    dtype = params.config.dtype
    if params.fixed_operators is not None:
        operators = [resolve_operator(g, choice).astype(dtype) for choice in params.fixed_operators]
        return operators, None
    weights = mixture_weights(params)
    return [mix_operators(g, row).astype(dtype) for row in weights], weights


def _propagate(betas: np.ndarray, operators: List[SparseOperator], x: np.ndarray):
    layers = [x]
    z = betas[0] * x
    for beta, op in zip(betas[1:], operators):
        layers.append(spmm(op, layers[-1]))
        z = z + beta * layers[-1]
    return layers, z


def _check_graph(params: ModelParams, g: SparseGraph) -> None:
    if g.num_nodes != params.num_nodes:
        raise DimensionMismatchError(
            "El grafo no coincide con los parámetros",
            details=f"N grafo={g.num_nodes}, N parámetros={params.num_nodes}",
        )


def forward(params: ModelParams, g: SparseGraph, features: Optional[np.ndarray] = None, *,
            training: bool = False, rng: Optional[np.random.Generator] = None) -> ForwardState:
    """
    Propagación lineal Z^(l) = 𝔸^(l) Z^(l-1) con agregación Z = Σ β^(l) Z^(l).

    Args:
        params: Parámetros del modelo
        g: Grafo de propagación
        features: Características N×F_in (None si input_dim = 0)
        training: Aplica dropout a Z
        rng: Generador del dropout (obligatorio en entrenamiento con dropout)

    Returns:
        Estado con Z y los estados por capa retenidos

    Raises:
        DimensionMismatchError: Si las características o el grafo no encajan
    """
    _check_graph(params, g)
    features, preprocessed, combined, x = _assemble_input(params, features)
    operators, weights = layer_operators(params, g)
    layers, z = _propagate(params.betas, operators, x)

    mask = None
    z_out = z
    rate = params.config.dropout_rate
    if training and rate > 0.0:
        if rng is None:
            raise ContractError("El dropout en entrenamiento requiere un generador aleatorio")
        mask = (rng.random(z.shape) >= rate).astype(z.dtype) / (1.0 - rate)
        z_out = z * mask

    return ForwardState(
        graph=g,
        features=features,
        preprocessed=preprocessed,
        combined_input=combined,
        layers=layers,
        operators=operators,
        mix_weights=weights,
        z=z,
        z_out=z_out,
        dropout_mask=mask,
    )


def run_predictor(params: ModelParams, z: np.ndarray, pairs: Union[Sequence[Tuple[int, int]], np.ndarray], *,
                  training: bool = False, rng: Optional[np.random.Generator] = None) -> PredictorPass:
    """
    MLP sobre z_i ⊙ z_j: ReLU entre capas y capa final lineal.

    Args:
        params: Parámetros del modelo
        z: Representaciones de nodo N×F_h
        pairs: Pares (i, j)
        training: Aplica dropout tras cada ReLU
        rng: Generador del dropout

    Returns:
        Activaciones retenidas y puntuaciones
    """
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if z.shape[1] != params.config.hidden_dim:
        raise DimensionMismatchError(
            "Dimensión de Z incompatible con el predictor",
            details=f"Z {z.shape}, F_h={params.config.hidden_dim}",
        )
    if pairs.size and (pairs.min() < 0 or pairs.max() >= z.shape[0]):
        raise InvalidGraphError("Par fuera del rango de nodos")

    rate = params.config.dropout_rate
    depth = params.mlp_depth
    activation = z[pairs[:, 0]] * z[pairs[:, 1]]
    inputs, pre_activations, masks = [], [], []
    out = activation
    for k in range(depth):
        weight, bias = params.mlp_layer(k)
        inputs.append(activation)
        out = activation @ weight + bias
        if k == depth - 1:
            break
        pre_activations.append(out)
        activation = np.maximum(out, 0.0)
        mask = None
        if training and rate > 0.0:
            if rng is None:
                raise ContractError("El dropout en entrenamiento requiere un generador aleatorio")
            mask = (rng.random(activation.shape) >= rate).astype(activation.dtype) / (1.0 - rate)
            activation = activation * mask
        masks.append(mask)

    return PredictorPass(
        pairs=pairs,
        inputs=inputs,
        pre_activations=pre_activations,
        masks=masks,
        scores=out[:, 0],
    )


def predict_links(params: ModelParams, z: np.ndarray,
                  pairs: Union[Sequence[Tuple[int, int]], np.ndarray]) -> np.ndarray:
    """Puntuaciones s_ij en modo evaluación."""
    return run_predictor(params, z, pairs).scores


def heuristic_forward(params: ModelParams, g: SparseGraph,
                      pairs: Union[Sequence[Tuple[int, int]], np.ndarray]) -> Tuple[ForwardState, HeuristicPass]:
    """
    Lectura heurística: propaga un indicador por nodo origen y lee H[i, j].

    X tiene una columna one-hot por origen distinto del lote, de modo que
    Z = Hᵀ X y la puntuación de (i, j) es Z[j, columna(i)].

    Args:
        params: Parámetros con predictor `heuristic`
        g: Grafo de propagación
        pairs: Pares (i, j)

    Returns:
        Estado de la propagación y lectura por par
    """
    if params.config.predictor is not PredictorKind.HEURISTIC:
        raise ContractError("heuristic_forward requiere el predictor heurístico")
    _check_graph(params, g)
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if pairs.size and (pairs.min() < 0 or pairs.max() >= g.num_nodes):
        raise InvalidGraphError("Par fuera del rango de nodos")

    sources, columns = np.unique(pairs[:, 0], return_inverse=True)
    columns = columns.reshape(-1)
    x = np.zeros((g.num_nodes, sources.size), dtype=params.config.dtype)
    x[sources, np.arange(sources.size)] = 1.0

    operators, weights = layer_operators(params, g)
    layers, z = _propagate(params.betas, operators, x)
    state = ForwardState(
        graph=g,
        features=None,
        preprocessed=None,
        combined_input=None,
        layers=layers,
        operators=operators,
        mix_weights=weights,
        z=z,
        z_out=z,
    )
    readout = HeuristicPass(pairs=pairs, sources=sources, columns=columns, scores=z[pairs[:, 1], columns])
    return state, readout


# Orígenes propagados a la vez al puntuar con la lectura heurística
HEURISTIC_SOURCE_BLOCK = 1024


def score_pairs(params: ModelParams, g: SparseGraph, features: Optional[np.ndarray],
                pairs: Union[Sequence[Tuple[int, int]], np.ndarray]) -> np.ndarray:
    """Puntuaciones en modo evaluación con el predictor configurado."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if params.config.predictor is PredictorKind.MLP:
        return predict_links(params, forward(params, g, features).z, pairs)
    if features is not None:
        raise DimensionMismatchError("La lectura heurística no admite características")

    scores = np.empty(len(pairs), dtype=params.config.dtype)
    if not len(pairs):
        return scores
    order = np.argsort(pairs[:, 0], kind="stable")
    sources = pairs[order, 0]
    starts = np.flatnonzero(np.r_[True, sources[1:] != sources[:-1]])
    for block in range(0, starts.size, HEURISTIC_SOURCE_BLOCK):
        lo = starts[block]
        hi = starts[block + HEURISTIC_SOURCE_BLOCK] if block + HEURISTIC_SOURCE_BLOCK < starts.size else sources.size
        rows = order[lo:hi]
        scores[rows] = heuristic_forward(params, g, pairs[rows])[1].scores
    return scores


def materialize_formulation(params: ModelParams, g: Optional[SparseGraph] = None,
                            include_dense: bool = True) -> MaterializedFormulation:
    """
    Exporta la heurística generalizada aprendida.

    Args:
        params: Parámetros entrenados o no
        g: Grafo de propagación (solo necesario para H densa)
        include_dense: Ensamblar también H densa

    Returns:
        Formulación heurística (la puntuación de (i, j) es H[i, j]), alphas
        de la propagación por capa, betas y H opcional

    Raises:
        DenseExportError: Si se pide H densa con N > 500
    """
    if include_dense and g is None:
        raise ContractError("La H densa requiere el grafo de propagación")
    if params.fixed_operators is not None:
        choices = list(params.fixed_operators)
        alphas = np.zeros((len(choices), 3))
        for layer, choice in enumerate(choices):
            if isinstance(choice, MixedOperatorSpec):
                alphas[layer] = choice.weights
            elif OperatorKind(choice) in MIXABLE_KINDS:
                alphas[layer, MIXABLE_KINDS.index(OperatorKind(choice))] = 1.0
    else:
        alphas = mixture_weights(params)
        choices = [MixedOperatorSpec(weights=tuple(float(a) for a in row)) for row in alphas]

    betas = params.betas.astype(np.float64)
    propagation = FormulationConfig(max_order=len(choices), operator_specs=choices, betas=betas.tolist())

    dense = None
    if include_dense:
        if g.num_nodes > DENSE_EXPORT_MAX_NODES:
            logger.warning(f"Exportación densa rechazada para N={g.num_nodes}")
            raise DenseExportError(
                f"La H densa solo se exporta hasta {DENSE_EXPORT_MAX_NODES} nodos",
                details=f"N={g.num_nodes}",
            )
        product = np.eye(g.num_nodes)
        dense = betas[0] * product
        for beta, choice in zip(betas[1:], choices):
            product = resolve_operator(g, choice).to_dense() @ product
            dense = dense + beta * product
        dense = dense.T.copy()
    return MaterializedFormulation(config=propagation.transpose(), alphas=alphas, betas=betas, dense=dense)


def with_formulation(params: ModelParams, cfg: FormulationConfig) -> ModelParams:
    """
    Instala una heurística congelada: operadores fijos y betas de `cfg`.

    `cfg` se interpreta como formulación heurística (la entrada (i, j) de
    Σ β^(l) 𝔸^(1)···𝔸^(l)); la propagación usa los operadores transpuestos
    para que Z = Hᵀ X.

    Args:
        params: Parámetros de partida (se copian)
        cfg: Formulación con L igual a la profundidad del modelo

    Returns:
        Copia con alpha_logits y betas congelados
    """
    if cfg.max_order != params.config.depth:
        raise DimensionMismatchError(
            "La formulación debe tener el mismo orden que el modelo",
            details=f"L formulación={cfg.max_order}, L modelo={params.config.depth}",
        )
    installed = params.copy()
    installed.fixed_operators = tuple(cfg.transpose().operator_specs)
    installed.arrays["betas"] = np.asarray(cfg.betas, dtype=params.config.dtype)
    installed.frozen = frozenset(installed.frozen | {"alpha_logits", "betas"})
    return installed


def _padded(cfg: FormulationConfig) -> FormulationConfig:
    if cfg.max_order > 0:
        return cfg
    return FormulationConfig(
        max_order=1,
        operator_specs=[OperatorKind.RAW_WITH_LOOPS],
        betas=[cfg.betas[0], 0.0],
    )


def recover_heuristic_scores(g: SparseGraph, spec: HeuristicSpec,
                             pairs: Union[Sequence[Tuple[int, int]], np.ndarray]) -> np.ndarray:
    """
    Reproduce una heurística con el modelo sin entrenar.

    Se inyectan los operadores y betas de la heurística en un modelo con
    lectura heurística: cada origen i propaga su indicador y la puntuación
    de (i, j) se lee en Z[j, i].

    Args:
        g: Grafo
        spec: Heurística a recuperar
        pairs: Pares (i, j)

    Returns:
        Puntuaciones idénticas a las del módulo de heurísticas
    """
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    cfg = _padded(heuristic_config(spec))
    model_cfg = ModelConfig(depth=cfg.max_order, predictor=PredictorKind.HEURISTIC, dropout_rate=0.0)
    params = with_formulation(init_params(model_cfg, g, seed=0), cfg)
    scores = score_pairs(params, g, None, pairs)
    if spec.method is HeuristicId.LRW:
        scores = scores * lrw_source_factor(g)[pairs[:, 0]]
    return scores
