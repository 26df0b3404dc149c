"""
Exportación de las excepciones del dominio.
"""
from heurlink.domain.exceptions.errors import (
    HeurLinkError,
    ConfigError,
    ContractError,
    InvalidGraphError,
    DimensionMismatchError,
    DataFormatError,
    SplitIntegrityError,
    OracleLimitError,
    DenseExportError,
    CheckpointMismatchError,
    VerificationError,
    NumericError,
)

__all__ = [
    'HeurLinkError',
    'ConfigError',
    'ContractError',
    'InvalidGraphError',
    'DimensionMismatchError',
    'DataFormatError',
    'SplitIntegrityError',
    'OracleLimitError',
    'DenseExportError',
    'CheckpointMismatchError',
    'VerificationError',
    'NumericError',
]
