"""
Lectura y escritura de datasets.
Listas de aristas en texto y matrices de características en CSV o binario.
"""
import logging
import struct
from pathlib import Path
from typing import Optional, Union

import numpy as np

from heurlink.application.services.graph_ops import build_graph
from heurlink.domain.entities.models import Dataset, SparseGraph
from heurlink.domain.exceptions import DataFormatError, InvalidGraphError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# Cabecera del formato binario: dos enteros de 64 bits sin signo (filas, columnas)
_BINARY_HEADER = struct.Struct("<QQ")


def _require(path: Path) -> Path:
    if not path.is_file():
        raise DataFormatError(f"No existe el archivo {path}")
    return path


def load_edge_list(path: PathLike, num_nodes: Optional[int] = None) -> SparseGraph:
    """
    Lee una lista de aristas: dos identificadores por línea, `#` comenta.

    Args:
        path: Archivo UTF-8
        num_nodes: N explícito (por defecto 1 + máximo identificador)

    Returns:
        Grafo construido con las reglas de build_graph

    Raises:
        DataFormatError: Si alguna línea no tiene dos enteros
    """
    path = _require(Path(path))
    edges = []
    with path.open("r", encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            if len(fields) != 2:
                raise DataFormatError(f"Línea {number} mal formada en {path}", details=line)
            try:
                edges.append((int(fields[0]), int(fields[1])))
            except ValueError as exc:
                raise DataFormatError(f"Identificador no entero en la línea {number}", details=line) from exc

    if num_nodes is None:
        if not edges:
            raise InvalidGraphError("Lista de aristas vacía: indique el número de nodos")
        num_nodes = 1 + max(max(e) for e in edges)
    graph = build_graph(edges, num_nodes)
    logger.info(f"Grafo cargado de {path}: N={graph.num_nodes}, M={graph.num_edges}")
    return graph


def save_edge_list(graph_or_edges: Union[SparseGraph, np.ndarray], path: PathLike) -> None:
    """Escribe las aristas (i < j) una por línea."""
    edges = graph_or_edges.edge_list() if isinstance(graph_or_edges, SparseGraph) else np.asarray(graph_or_edges)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        if isinstance(graph_or_edges, SparseGraph):
            handle.write(f"# N={graph_or_edges.num_nodes} M={graph_or_edges.num_edges}\n")
        for i, j in edges.reshape(-1, 2):
            handle.write(f"{int(i)} {int(j)}\n")


def _load_csv_features(path: Path) -> np.ndarray:
    with path.open("r", encoding="utf-8") as handle:
        header = handle.readline().strip().split(",")
        if not header or header[0] != "f0":
            raise DataFormatError(f"Cabecera de características inválida en {path}", details=",".join(header))
        rows = []
        for number, line in enumerate(handle, start=2):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) != len(header):
                raise DataFormatError(f"La fila {number} tiene {len(fields)} columnas, se esperaban {len(header)}")
            try:
                rows.append([float(v) for v in fields])
            except ValueError as exc:
                raise DataFormatError(f"Valor no numérico en la fila {number}", details=line) from exc
    return np.array(rows, dtype=np.float64).reshape(-1, len(header))


def _load_binary_features(path: Path) -> np.ndarray:
    raw = path.read_bytes()
    if len(raw) < _BINARY_HEADER.size:
        raise DataFormatError(f"Archivo binario truncado: {path}")
    rows, cols = _BINARY_HEADER.unpack_from(raw)
    expected = _BINARY_HEADER.size + rows * cols * 8
    if len(raw) != expected:
        raise DataFormatError(
            f"Tamaño inesperado del binario {path}",
            details=f"esperado {expected} bytes, recibido {len(raw)}",
        )
    return np.frombuffer(raw, dtype="<f8", offset=_BINARY_HEADER.size).reshape(rows, cols).astype(np.float64)


def load_features(path: PathLike, num_nodes: Optional[int] = None) -> np.ndarray:
    """
    Lee una matriz N×F de características (CSV con cabecera f0,f1,… o `.bin`).

    Raises:
        DataFormatError: Si el número de filas no es N o hay valores no finitos
    """
    path = _require(Path(path))
    features = _load_binary_features(path) if path.suffix == ".bin" else _load_csv_features(path)
    if num_nodes is not None and features.shape[0] != num_nodes:
        raise DataFormatError(
            "El número de filas de características no coincide con N",
            details=f"filas={features.shape[0]}, N={num_nodes}",
        )
    if not np.all(np.isfinite(features)):
        raise DataFormatError("Características con valores no finitos")
    return features


def save_features(features: np.ndarray, path: PathLike) -> None:
    """Escribe características en CSV o, con sufijo `.bin`, en binario little-endian."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    features = np.asarray(features, dtype=np.float64)
    if path.suffix == ".bin":
        rows, cols = features.shape
        path.write_bytes(_BINARY_HEADER.pack(rows, cols) + features.astype("<f8").tobytes(order="C"))
        return
    header = ",".join(f"f{k}" for k in range(features.shape[1]))
    with path.open("w", encoding="utf-8") as handle:
        handle.write(header + "\n")
        for row in features:
            handle.write(",".join(format(v, ".17g") for v in row) + "\n")


def load_dataset(edge_path: PathLike, feature_path: Optional[PathLike] = None,
                 num_nodes: Optional[int] = None, name: Optional[str] = None) -> Dataset:
    """
    Carga grafo y características opcionales.

    Args:
        edge_path: Lista de aristas
        feature_path: Características (CSV o binario)
        num_nodes: N explícito
        name: Nombre del dataset (por defecto el del archivo)

    Returns:
        Dataset con procedencia
    """
    graph = load_edge_list(edge_path, num_nodes)
    features = None
    if feature_path is not None:
        features = load_features(feature_path, graph.num_nodes)
    return Dataset(
        graph=graph,
        features=features,
        name=name or Path(edge_path).stem,
        provenance={
            "edges": str(edge_path),
            "features": None if feature_path is None else str(feature_path),
        },
    )
