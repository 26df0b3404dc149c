"""
Modelos específicos de los datasets.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from heurlink.domain.entities.models.graph_models import SparseGraph


@dataclass
class Dataset:
    """Grafo con características opcionales (N×F) y metadatos de procedencia"""
    graph: SparseGraph
    features: Optional[np.ndarray] = None
    name: str = "dataset"
    provenance: Dict[str, Any] = field(default_factory=dict)
    components: Optional[List[np.ndarray]] = None

    @property
    def num_features(self) -> int:
        return 0 if self.features is None else int(self.features.shape[1])
