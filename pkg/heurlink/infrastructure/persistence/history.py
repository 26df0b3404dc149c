"""
Escritura y lectura del historial de entrenamiento en CSV (`epoch,loss,val_metric`).
"""
import logging
from pathlib import Path
from typing import Union

from heurlink.domain.entities.models import TrainHistory
from heurlink.domain.exceptions import DataFormatError

logger = logging.getLogger(__name__)

HISTORY_HEADER = "epoch,loss,val_metric"


def save_history(history: TrainHistory, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write(HISTORY_HEADER + "\n")
        for record in history.records:
            handle.write(f"{record.epoch},{record.loss:.17g},{record.val_metric:.17g}\n")
    logger.info(f"Historial de {len(history.records)} épocas guardado en {path}")


def load_history(path: Union[str, Path]) -> TrainHistory:
    path = Path(path)
    if not path.is_file():
        raise DataFormatError(f"No existe el historial {path}")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != HISTORY_HEADER:
        raise DataFormatError(f"Cabecera de historial inválida en {path}")
    history = TrainHistory()
    for line in lines[1:]:
        if not line.strip():
            continue
        epoch, loss, metric = line.split(",")
        history.append(int(epoch), float(loss), float(metric))
    return history
