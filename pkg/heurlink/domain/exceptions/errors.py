"""
Jerarquía de excepciones del dominio.
Cada excepción lleva el código de salida que la CLI devuelve al operador.
"""


class HeurLinkError(Exception):
    """Excepción base de heurlink."""

    exit_code: int = 3

    def __init__(self, message: str, details: str = ""):
        super().__init__(message)
        self.message = message
        self.details = details


class ConfigError(HeurLinkError):
    """Configuración o uso inválido (código 1)."""

    exit_code = 1


class ContractError(HeurLinkError, ValueError):
    """Violación de un contrato de entrada (código 2)."""

    exit_code = 2


class InvalidGraphError(ContractError):
    """Grafo o identificadores de nodo inválidos."""


class DimensionMismatchError(ContractError):
    """Dimensiones incompatibles entre operador y matriz."""


class DataFormatError(ContractError):
    """Archivo de datos mal formado."""


class SplitIntegrityError(ContractError):
    """Partición de aristas que no cumple sus invariantes."""


class OracleLimitError(ContractError):
    """Instancia demasiado grande para un oráculo exhaustivo."""


class DenseExportError(ContractError):
    """Exportación densa rechazada por tamaño."""


class CheckpointMismatchError(ContractError):
    """Checkpoint incompatible con el grafo o la versión."""


class VerificationError(HeurLinkError):
    """Fallo de verificación contra un oráculo (código 2)."""

    exit_code = 2


class NumericError(HeurLinkError, ArithmeticError):
    """Valores no finitos u otra falla numérica (código 3)."""

    exit_code = 3
