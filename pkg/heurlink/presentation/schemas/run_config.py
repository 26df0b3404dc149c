"""
Esquema del documento de ejecución.
Este módulo valida las secciones {dataset, model, train, eval} de un archivo
JSON antes de ejecutar cualquier trabajo y aplica los presets por dataset.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from heurlink.application.services.metrics import parse_metric
from heurlink.domain.entities.models import ModelConfig, TrainConfig
from heurlink.domain.exceptions import ConfigError
from heurlink.infrastructure.config.settings import PRESET_MAP, DatasetPreset

logger = logging.getLogger(__name__)


class DatasetSection(BaseModel):
    """Origen del grafo: lista de aristas o generador sintético"""
    model_config = ConfigDict(extra="forbid")

    edges: Optional[str] = Field(None, description="Ruta de la lista de aristas")
    features: Optional[str] = Field(None, description="Ruta de las características (CSV o .bin)")
    num_nodes: Optional[int] = Field(None, gt=0, description="Número de nodos explícito")
    synthetic: Optional[Literal["triangular", "hexagonal"]] = Field(None, description="Generador sintético")
    size: Optional[int] = Field(None, ge=1, description="Número de componentes del generador")
    split: Optional[str] = Field(None, description="Partición JSON ya guardada")
    valid_ratio: float = Field(0.05, ge=0.0, lt=1.0, description="Fracción de validación")
    test_ratio: float = Field(0.1, ge=0.0, lt=1.0, description="Fracción de prueba")

    @model_validator(mode="after")
    def _check_source(self) -> "DatasetSection":
        if (self.edges is None) == (self.synthetic is None):
            raise ValueError("Indique exactamente uno de 'edges' o 'synthetic'")
        if self.synthetic is not None and self.features is not None:
            raise ValueError("Los datasets sintéticos no tienen características")
        if self.valid_ratio + self.test_ratio >= 1.0:
            raise ValueError("valid_ratio + test_ratio debe ser menor que 1")
        return self


class EvalSection(BaseModel):
    """Métrica del reporte final sobre la partición de prueba"""
    model_config = ConfigDict(extra="forbid")

    metric: str = Field("hits@100", description="hits@K, mrr o auc")

    @field_validator("metric")
    @classmethod
    def _check_metric(cls, value: str) -> str:
        parse_metric(value)
        return value.lower()


class RunConfig(BaseModel):
    """Documento completo de una ejecución de entrenamiento"""
    model_config = ConfigDict(extra="forbid")

    preset: Optional[DatasetPreset] = Field(None, description="Preset de hiperparámetros")
    dataset: DatasetSection
    model: ModelConfig = Field(default_factory=ModelConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    eval: EvalSection = Field(default_factory=EvalSection)

    @model_validator(mode="before")
    @classmethod
    def _apply_preset(cls, data: Any) -> Any:
        if not isinstance(data, dict) or data.get("preset") is None:
            return data
        preset = PRESET_MAP[DatasetPreset(data["preset"])]
        merged = dict(data)
        for section in ("model", "train"):
            # Los valores explícitos del documento ganan al preset
            merged[section] = {**preset[section], **(data.get(section) or {})}
        return merged

    @field_validator("train")
    @classmethod
    def _check_eval_metric(cls, value: TrainConfig) -> TrainConfig:
        parse_metric(value.eval_metric)
        return value


def parse_run_config(document: Dict[str, Any]) -> RunConfig:
    """
    Valida un documento ya decodificado.

    Raises:
        ConfigError: Si el documento no cumple el esquema
    """
    try:
        return RunConfig.model_validate(document)
    except ValidationError as exc:
        raise ConfigError("Configuración de ejecución inválida", details=str(exc)) from exc
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("Configuración de ejecución inválida", details=str(exc)) from exc


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """Lee y valida un archivo de configuración JSON."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"No existe el archivo de configuración {path}")
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"JSON inválido en {path}", details=str(exc)) from exc
    config = parse_run_config(document)
    logger.info(f"Configuración cargada de {path} (preset={config.preset.value if config.preset else None})")
    return config
