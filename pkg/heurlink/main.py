"""
Punto de entrada principal de la aplicación.
Configura el logging y ejecuta la línea de comandos traduciendo las
excepciones a códigos de salida.
"""
import json
import logging
import sys
from typing import List, Optional

from heurlink.domain.entities.models import ErrorResult
from heurlink.domain.exceptions import HeurLinkError
from heurlink.infrastructure.config.settings import LOG_FILE, LOG_LEVEL, get_settings
from heurlink.presentation.cli.commands import run

logger = logging.getLogger(__name__)


def configure_logging() -> None:
    """Logging con nivel configurable; los mensajes van a stderr y, si se indica, a un archivo."""
    numeric_level = getattr(logging, LOG_LEVEL.upper(), logging.INFO)
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if LOG_FILE:
        handlers.append(logging.FileHandler(LOG_FILE))
    logging.basicConfig(
        level=numeric_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=handlers,
    )


def _report(error: ErrorResult) -> None:
    sys.stderr.write(json.dumps(error) + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    """
    Ejecuta un subcomando.

    Args:
        argv: Argumentos (por defecto los de la línea de comandos)

    Returns:
        0 éxito, 1 uso o configuración, 2 contrato o verificación, 3 fallo numérico
    """
    configure_logging()
    logger.debug(f"Configuración: {get_settings()}")
    try:
        return run(argv)
    except HeurLinkError as exc:
        logger.error(f"{type(exc).__name__}: {exc.message}")
        _report({"error": exc.message, "details": exc.details or None, "exit_code": exc.exit_code})
        return exc.exit_code
    except Exception as exc:
        # Manejador global de excepciones
        logger.exception(f"Error no manejado: {str(exc)}")
        _report({"error": "Error interno", "details": str(exc), "exit_code": 3})
        return 3


if __name__ == "__main__":
    sys.exit(main())
