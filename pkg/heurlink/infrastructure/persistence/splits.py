"""
Persistencia de particiones de aristas en JSON.
"""
import json
import logging
from pathlib import Path
from typing import Union

import numpy as np

from heurlink.application.services.splits import check_split
from heurlink.domain.entities.models import EdgeSplit
from heurlink.domain.exceptions import DataFormatError
from heurlink.infrastructure.config.settings import SPLIT_FORMAT_VERSION

logger = logging.getLogger(__name__)

_EDGE_FIELDS = ("train", "valid_pos", "valid_neg", "test_pos", "test_neg")


def save_split(split: EdgeSplit, path: Union[str, Path]) -> None:
    """
    Guarda la partición como `{version, seed, ratios, num_nodes, train, valid_pos, ...}`.
    """
    document = {
        "version": SPLIT_FORMAT_VERSION,
        "seed": split.seed,
        "ratios": {"valid": split.valid_ratio, "test": split.test_ratio},
        "num_nodes": split.num_nodes,
    }
    for name in _EDGE_FIELDS:
        document[name] = np.asarray(getattr(split, name), dtype=np.int64).reshape(-1, 2).tolist()

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document), encoding="utf-8")
    logger.info(f"Partición guardada en {path}")


def load_split(path: Union[str, Path]) -> EdgeSplit:
    """
    Carga una partición y comprueba sus invariantes.

    Args:
        path: Archivo JSON escrito por save_split

    Returns:
        Partición reconstruida

    Raises:
        DataFormatError: Si falta el archivo, la versión no coincide o el JSON es inválido
        SplitIntegrityError: Si la partición viola sus invariantes
    """
    path = Path(path)
    if not path.is_file():
        raise DataFormatError(f"No existe el archivo de partición {path}")
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"JSON inválido en {path}", details=str(exc)) from exc

    version = document.get("version")
    if version != SPLIT_FORMAT_VERSION:
        raise DataFormatError(
            "Versión de partición no soportada",
            details=f"esperada {SPLIT_FORMAT_VERSION}, recibida {version}",
        )

    try:
        edges = {
            name: np.asarray(document[name], dtype=np.int64).reshape(-1, 2)
            for name in _EDGE_FIELDS
        }
        ratios = document["ratios"]
        seed = int(document["seed"])
        valid_ratio, test_ratio = float(ratios["valid"]), float(ratios["test"])
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"Partición incompleta en {path}", details=str(exc)) from exc

    num_nodes = document.get("num_nodes")
    if num_nodes is None:
        stacked = np.concatenate(list(edges.values()))
        num_nodes = int(stacked.max()) + 1 if stacked.size else 0

    split = EdgeSplit(
        num_nodes=int(num_nodes),
        seed=seed,
        valid_ratio=valid_ratio,
        test_ratio=test_ratio,
        **edges,
    )
    check_split(split)
    return split
