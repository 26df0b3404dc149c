"""
Modelos específicos del núcleo de grafos.
Define el grafo disperso con auto-lazos, los tipos de operador de propagación
y el operador disperso que comparte el patrón CSR del grafo.
"""
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, Tuple

import numpy as np
import scipy.sparse as sp

# Las matrices densas se representan directamente como np.ndarray (filas x columnas)
DenseMatrix = np.ndarray


class OperatorKind(str, Enum):
    """Operadores de adyacencia normalizados sobre Ã = A + I_N"""
    RAW_WITH_LOOPS = "raw"
    SYMMETRIC = "sym"
    ROW_STOCHASTIC = "rs"
    COLUMN_STOCHASTIC = "cs"

    def transpose(self) -> "OperatorKind":
        """Operador transpuesto: Ã_rs y Ã_cs se intercambian, los simétricos se mantienen."""
        if self is OperatorKind.ROW_STOCHASTIC:
            return OperatorKind.COLUMN_STOCHASTIC
        if self is OperatorKind.COLUMN_STOCHASTIC:
            return OperatorKind.ROW_STOCHASTIC
        return self


# Orden de los pesos de mezcla α = (α_rs, α_cs, α_sym)
MIXABLE_KINDS: Tuple[OperatorKind, OperatorKind, OperatorKind] = (
    OperatorKind.ROW_STOCHASTIC,
    OperatorKind.COLUMN_STOCHASTIC,
    OperatorKind.SYMMETRIC,
)


def _freeze(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class SparseGraph:
    """
    Grafo no dirigido inmutable en disposición CSR de Ã = A + I_N.

    Cada fila i contiene los vecinos de i (incluido i mismo) ordenados y sin
    duplicados; `degrees_with_loops[i]` es d̃_i.
    """
    num_nodes: int
    num_edges: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    degrees_with_loops: np.ndarray
    _operators: Dict[OperatorKind, "SparseOperator"] = field(
        default_factory=dict, repr=False, compare=False
    )

    def __post_init__(self):
        _freeze(self.row_offsets)
        _freeze(self.col_indices)
        _freeze(self.degrees_with_loops)

    @property
    def nnz(self) -> int:
        return int(self.col_indices.shape[0])

    def neighbors(self, node: int) -> np.ndarray:
        """Γ_x: vecinos de `node` incluyendo el propio nodo, ordenados."""
        return self.col_indices[self.row_offsets[node]:self.row_offsets[node + 1]]

    def has_edge(self, i: int, j: int) -> bool:
        row = self.neighbors(i)
        pos = np.searchsorted(row, j)
        return bool(pos < row.shape[0] and row[pos] == j)

    def edge_list(self) -> np.ndarray:
        """Aristas no dirigidas sin auto-lazos como arreglo (M, 2) con i < j."""
        rows = np.repeat(np.arange(self.num_nodes), np.diff(self.row_offsets))
        mask = rows < self.col_indices
        return np.stack([rows[mask], self.col_indices[mask]], axis=1)

    @cached_property
    def row_indices(self) -> np.ndarray:
        return _freeze(np.repeat(np.arange(self.num_nodes), np.diff(self.row_offsets)))

    def adjacency(self) -> sp.csr_matrix:
        """Ã como matriz CSR de scipy (copia)."""
        data = np.ones(self.nnz, dtype=np.float64)
        return sp.csr_matrix(
            (data, self.col_indices.copy(), self.row_offsets.copy()),
            shape=(self.num_nodes, self.num_nodes),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseGraph):
            return NotImplemented
        return (
            self.num_nodes == other.num_nodes
            and self.num_edges == other.num_edges
            and np.array_equal(self.row_offsets, other.row_offsets)
            and np.array_equal(self.col_indices, other.col_indices)
        )

    __hash__ = object.__hash__


@dataclass(frozen=True, eq=False)
class SparseOperator:
    """
    Operador disperso con el mismo patrón que Ã y pesos reales.

    Los arreglos de índices se comparten con el grafo de origen; solo `values`
    es propio de cada operador.
    """
    shape: Tuple[int, int]
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        _freeze(self.values)

    @property
    def nnz(self) -> int:
        return int(self.values.shape[0])

    @cached_property
    def matrix(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self.values, self.col_indices, self.row_offsets), shape=self.shape
        )

    @cached_property
    def transposed_matrix(self) -> sp.csr_matrix:
        return self.matrix.transpose().tocsr()

    def transpose(self) -> "SparseOperator":
        transposed = self.transposed_matrix
        return SparseOperator(
            shape=(self.shape[1], self.shape[0]),
            row_offsets=transposed.indptr,
            col_indices=transposed.indices,
            values=transposed.data.copy(),
            label=f"{self.label}^T",
        )

    def astype(self, dtype: np.dtype) -> "SparseOperator":
        if self.values.dtype == dtype:
            return self
        return SparseOperator(
            shape=self.shape,
            row_offsets=self.row_offsets,
            col_indices=self.col_indices,
            values=self.values.astype(dtype),
            label=self.label,
        )

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()
