"""
Persistencia de parámetros de HL-GNN.
Checkpoints versionados en `.npz` (bloques de parámetros más una entrada JSON
con la configuración) y exportación de interpretabilidad en JSON.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
from pydantic import ValidationError

from heurlink.domain.entities.models import (
    MaterializedFormulation,
    MixedOperatorSpec,
    ModelConfig,
    ModelParams,
    OperatorChoice,
    OperatorKind,
    SparseGraph,
)
from heurlink.domain.exceptions import CheckpointMismatchError, DataFormatError
from heurlink.infrastructure.config.settings import CHECKPOINT_FORMAT_VERSION

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# Clave de los metadatos dentro del contenedor
META_KEY = "__meta__"


def _encode_choice(choice: OperatorChoice) -> Any:
    if isinstance(choice, MixedOperatorSpec):
        return {"weights": list(choice.weights)}
    return OperatorKind(choice).value


def _decode_choice(raw: Any) -> OperatorChoice:
    if isinstance(raw, dict):
        return MixedOperatorSpec(weights=tuple(raw["weights"]))
    return OperatorKind(raw)


def save_checkpoint(params: ModelParams, path: PathLike) -> Path:
    """
    Guarda los parámetros en un contenedor `.npz`.

    Args:
        params: Parámetros a guardar
        path: Ruta de destino (se añade `.npz` si falta)

    Returns:
        Ruta efectivamente escrita
    """
    path = Path(path)
    if path.suffix != ".npz":
        path = path.with_suffix(path.suffix + ".npz")
    meta = {
        "version": CHECKPOINT_FORMAT_VERSION,
        "config": params.config.model_dump(mode="json"),
        "num_nodes": params.num_nodes,
        "fixed_operators": (
            None if params.fixed_operators is None
            else [_encode_choice(choice) for choice in params.fixed_operators]
        ),
        "frozen": sorted(params.frozen),
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as handle:
        np.savez(handle, **{META_KEY: np.array(json.dumps(meta))}, **params.arrays)
    logger.info(f"Checkpoint guardado en {path}")
    return path


def load_checkpoint(path: PathLike, graph: Optional[SparseGraph] = None) -> ModelParams:
    """
    Carga un checkpoint escrito por save_checkpoint.

    Args:
        path: Archivo `.npz`
        graph: Grafo con el que se usará (opcional, se comprueba N)

    Returns:
        Parámetros idénticos bit a bit a los guardados

    Raises:
        DataFormatError: Si el archivo falta o está corrupto
        CheckpointMismatchError: Si la versión o el grafo no coinciden
    """
    path = Path(path)
    if not path.is_file():
        raise DataFormatError(f"No existe el checkpoint {path}")
    try:
        with np.load(path, allow_pickle=False) as archive:
            meta = json.loads(str(archive[META_KEY]))
            arrays = {name: archive[name] for name in archive.files if name != META_KEY}
    except (OSError, ValueError, KeyError) as exc:
        raise DataFormatError(f"Checkpoint ilegible: {path}", details=str(exc)) from exc

    if meta.get("version") != CHECKPOINT_FORMAT_VERSION:
        raise CheckpointMismatchError(
            "Versión de checkpoint no soportada",
            details=f"esperada {CHECKPOINT_FORMAT_VERSION}, recibida {meta.get('version')}",
        )
    try:
        config = ModelConfig.model_validate(meta["config"])
    except ValidationError as exc:
        raise CheckpointMismatchError("Configuración del checkpoint inválida", details=str(exc)) from exc

    num_nodes = int(meta["num_nodes"])
    if graph is not None and graph.num_nodes != num_nodes:
        raise CheckpointMismatchError(
            "El checkpoint no corresponde al grafo",
            details=f"N checkpoint={num_nodes}, N grafo={graph.num_nodes}",
        )
    _check_shapes(config, arrays, num_nodes)

    fixed = meta.get("fixed_operators")
    params = ModelParams(
        config=config,
        num_nodes=num_nodes,
        arrays=arrays,
        fixed_operators=None if fixed is None else tuple(_decode_choice(raw) for raw in fixed),
        frozen=frozenset(meta.get("frozen", [])),
    )
    logger.info(f"Checkpoint cargado de {path}: L={config.depth}, N={num_nodes}")
    return params


def _check_shapes(config: ModelConfig, arrays: Dict[str, np.ndarray], num_nodes: int) -> None:
    expected = config.parameter_shapes(num_nodes)
    missing = sorted(set(expected) - set(arrays))
    if missing:
        raise CheckpointMismatchError("Faltan bloques de parámetros", details=", ".join(missing))
    extra = sorted(set(arrays) - set(expected))
    if extra:
        raise CheckpointMismatchError("Bloques de parámetros no previstos por la configuración",
                                      details=", ".join(extra))
    for name, shape in expected.items():
        if arrays[name].shape != shape:
            raise CheckpointMismatchError(
                f"Bloque {name} con forma inesperada",
                details=f"esperada {shape}, recibida {arrays[name].shape}",
            )


def interpretability_document(formulation: MaterializedFormulation) -> Dict[str, Any]:
    """
    Documento JSON con betas, alphas por capa de propagación (rs, cs, sym),
    operadores en el orden heurístico de H y H densa opcional.
    """
    layers: List[Dict[str, float]] = [
        {"rs": float(row[0]), "cs": float(row[1]), "sym": float(row[2])}
        for row in formulation.alphas
    ]
    document: Dict[str, Any] = {
        "betas": [float(b) for b in formulation.betas],
        "alphas": layers,
        "operators": [_encode_choice(choice) for choice in formulation.config.operator_specs],
    }
    if formulation.dense is not None:
        document["dense_h"] = formulation.dense.tolist()
    return document


def export_interpretability(formulation: MaterializedFormulation, path: PathLike) -> None:
    """Escribe el documento de interpretabilidad en `path`."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(interpretability_document(formulation), indent=2), encoding="utf-8")
    logger.info(f"Heurística generalizada exportada a {path}")
