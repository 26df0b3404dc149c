"""
Formatos de salida de la CLI.
Tablas legibles para la salida estándar y CSV/JSON para archivos.
"""
import csv
import json
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO, Union

import numpy as np


def format_real(value: float) -> str:
    """Real con 17 cifras significativas."""
    return format(float(value), ".17g")


def render_table(rows: Sequence[Dict[str, Any]], columns: Optional[List[str]] = None) -> str:
    if not rows:
        return "(sin filas)"
    columns = columns or list(rows[0].keys())
    cells = [[_cell(row.get(col)) for col in columns] for row in rows]
    widths = [max(len(col), *(len(line[k]) for line in cells)) for k, col in enumerate(columns)]
    header = "  ".join(col.ljust(w) for col, w in zip(columns, widths))
    rule = "  ".join("-" * w for w in widths)
    body = ["  ".join(value.rjust(w) for value, w in zip(line, widths)) for line in cells]
    return "\n".join([header, rule, *body])


def _cell(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6g}"
    return "" if value is None else str(value)


def print_table(rows: Sequence[Dict[str, Any]], columns: Optional[List[str]] = None,
                stream: Optional[TextIO] = None) -> None:
    (stream or sys.stdout).write(render_table(rows, columns) + "\n")


def write_csv(rows: Iterable[Dict[str, Any]], columns: List[str], path: Union[str, Path]) -> None:
    """CSV con reales a 17 cifras significativas."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({
                key: format_real(value) if isinstance(value, (float, np.floating)) else value
                for key, value in row.items()
            })


def score_rows(pairs: np.ndarray, scores: np.ndarray) -> List[Dict[str, Any]]:
    """Filas `src,dst,score` para la salida de heurísticas."""
    return [
        {"src": int(i), "dst": int(j), "score": float(s)}
        for (i, j), s in zip(np.asarray(pairs).reshape(-1, 2), np.asarray(scores).ravel())
    ]


def write_json(document: Any, path: Optional[Union[str, Path]] = None,
               stream: Optional[TextIO] = None) -> None:
    """JSON a un archivo o, sin ruta, a la salida indicada (stdout por defecto)."""
    text = json.dumps(document, indent=2, default=_json_default)
    if path is None:
        (stream or sys.stdout).write(text + "\n")
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text + "\n", encoding="utf-8")


def _json_default(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    raise TypeError(f"No serializable: {type(value).__name__}")
