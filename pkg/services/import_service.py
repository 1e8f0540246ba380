"""Service for reading simulated erasure-rate curves back from CSV"""
from pathlib import Path

from config.constants import SIMULATION_CSV_HEADERS
from services.simulation_service import ExperimentResult
from utils.csv_utils import csv_to_array
from utils.errors import ConfigInvalid

_ROW_TYPES = {
    "overhead": float,
    "scope": str,
    "erasure_rate": float,
    "trials": int,
    "K": int,
    "scheme": str,
    "seed": int,
}


def is_valid_row(row):
    """Validate a row has every simulation column filled"""
    return all(row.get(header) not in (None, "") for header in SIMULATION_CSV_HEADERS)


def read_csv(path):
    """
    Read a CSV written by emit_csv

    Args:
        path: CSV file path

    Returns:
        ExperimentResult holding the parsed rows

    Raises:
        FileNotFoundError: If the file does not exist
        ConfigInvalid: If the header or a row is malformed
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"CSV file not found: {path}")
    headers, raw_rows = csv_to_array(path.read_text(encoding="utf-8"))
    if list(headers) != SIMULATION_CSV_HEADERS:
        raise ConfigInvalid(f"Unexpected CSV header in {path}: {','.join(headers)}")

    rows = []
    for number, raw in enumerate(raw_rows, start=2):
        if not is_valid_row(raw):
            raise ConfigInvalid(f"{path}:{number}: incomplete row")
        try:
            rows.append({key: cast(raw[key]) for key, cast in _ROW_TYPES.items()})
        except ValueError as error:
            raise ConfigInvalid(f"{path}:{number}: {error}") from error

    if not rows:
        return ExperimentResult(rows=[])
    first = rows[0]
    return ExperimentResult(
        rows=rows,
        K=first["K"],
        scheme=first["scheme"],
        seed=first["seed"],
        trials=first["trials"],
    )
