"""
Configuración centralizada del proyecto.
Este módulo gestiona las variables de entorno, los límites numéricos y los
presets de hiperparámetros por dataset.
"""
import os
from dotenv import load_dotenv
from typing import Dict, Any
from enum import Enum

# Carga explícita del archivo .env
load_dotenv(verbose=True)


class DatasetPreset(str, Enum):
    """Presets de hiperparámetros soportados (uno por dataset de referencia)"""
    CORA = "cora"
    CITESEER = "citeseer"
    PUBMED = "pubmed"
    PHOTO = "photo"
    COMPUTERS = "computers"
    COLLAB = "collab"
    DDI = "ddi"
    PPA = "ppa"
    CITATION2 = "citation2"
    TRIANGULAR = "triangular"
    HEXAGONAL = "hexagonal"


def _planetoid(hidden: int, mlp_layers: int, mlp_hidden: int, init: str, param: float,
               epochs: int, dropout: float) -> Dict[str, Dict[str, Any]]:
    return {
        "model": {
            "depth": 20,
            "hidden_dim": hidden,
            "use_node_embeddings": False,
            "beta_init": init,
            "init_parameter": param,
            "mlp_layers": mlp_layers,
            "mlp_hidden_dim": mlp_hidden,
            "dropout_rate": dropout,
            "loss": "bce",
        },
        "train": {"epochs": epochs, "learning_rate": 0.001},
    }


def _ogb(emb: int, hidden: int, mlp_hidden: int, param: float, epochs: int,
         dropout: float) -> Dict[str, Dict[str, Any]]:
    return {
        "model": {
            "depth": 15,
            "hidden_dim": hidden,
            "use_node_embeddings": True,
            "embedding_dim": emb,
            "beta_init": "ki",
            "init_parameter": param,
            "mlp_layers": 2,
            "mlp_hidden_dim": mlp_hidden,
            "dropout_rate": dropout,
            "loss": "auc",
        },
        "train": {"epochs": epochs, "learning_rate": 0.001},
    }


def _synthetic() -> Dict[str, Dict[str, Any]]:
    # Lectura heurística sobre la mezcla uniforme fija; solo se aprenden las β
    return {
        "model": {
            "predictor": "heuristic",
            "learn_operators": False,
            "depth": 20,
            "input_dim": 0,
            "use_node_embeddings": False,
            "beta_init": "katz",
            "init_parameter": 0.05,
            "dropout_rate": 0.0,
            "loss": "auc",
        },
        "train": {"epochs": 100, "learning_rate": 0.01, "batch_size": 64, "mask_targets": True},
    }


# Hiperparámetros por dataset
PRESET_MAP: Dict[DatasetPreset, Dict[str, Dict[str, Any]]] = {
    DatasetPreset.CORA: _planetoid(1433, 3, 8192, "rwr", 0.2, 100, 0.5),
    DatasetPreset.CITESEER: _planetoid(3703, 2, 8192, "rwr", 0.2, 100, 0.5),
    DatasetPreset.PUBMED: _planetoid(500, 3, 512, "ki", 0.2, 300, 0.6),
    DatasetPreset.PHOTO: _planetoid(745, 3, 512, "rwr", 0.2, 200, 0.6),
    DatasetPreset.COMPUTERS: _planetoid(767, 3, 512, "rwr", 0.2, 200, 0.6),
    DatasetPreset.COLLAB: _ogb(256, 256, 256, 0.5, 800, 0.3),
    DatasetPreset.DDI: _ogb(512, 512, 512, 0.5, 500, 0.3),
    DatasetPreset.PPA: _ogb(256, 512, 512, 0.5, 500, 0.5),
    DatasetPreset.CITATION2: _ogb(64, 256, 256, 0.6, 100, 0.3),
    DatasetPreset.TRIANGULAR: _synthetic(),
    DatasetPreset.HEXAGONAL: _synthetic(),
}

# Configuración de logging
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
LOG_FILE = os.getenv("HEURLINK_LOG_FILE")

# Configuración de ejecución
DEFAULT_THREADS = int(os.getenv("HEURLINK_THREADS", "1"))
DEFAULT_SEED = int(os.getenv("HEURLINK_SEED", "0"))

# Límites numéricos
DENSE_EXPORT_MAX_NODES = 500
ORACLE_MAX_NODES = 60
ORACLE_MAX_LENGTH = 8
GRADCHECK_TOLERANCE = 1e-4
DEFAULT_TRUNCATION = 20
MIX_SUM_TOLERANCE = 1e-9
VERIFY_TOLERANCE = 1e-9

# Versiones de formatos persistidos
SPLIT_FORMAT_VERSION = 1
CHECKPOINT_FORMAT_VERSION = 1


def get_settings() -> Dict[str, Any]:
    """Retorna la configuración actual como un diccionario."""
    return {
        "logging": {
            "level": LOG_LEVEL,
            "file": LOG_FILE,
        },
        "runtime": {
            "threads": DEFAULT_THREADS,
            "seed": DEFAULT_SEED,
        },
        "limits": {
            "dense_export_max_nodes": DENSE_EXPORT_MAX_NODES,
            "oracle_max_nodes": ORACLE_MAX_NODES,
            "oracle_max_length": ORACLE_MAX_LENGTH,
            "gradcheck_tolerance": GRADCHECK_TOLERANCE,
            "default_truncation": DEFAULT_TRUNCATION,
            "verify_tolerance": VERIFY_TOLERANCE,
        },
        "formats": {
            "split_version": SPLIT_FORMAT_VERSION,
            "checkpoint_version": CHECKPOINT_FORMAT_VERSION,
        },
        "presets": [preset.value for preset in DatasetPreset],
    }
