"""Service for writing result curves to CSV"""
import time
from pathlib import Path

from config.constants import BOUND_CSV_HEADERS, DE_CSV_HEADERS, SIMULATION_CSV_HEADERS, SWEEP_CSV_HEADERS
from utils.csv_utils import array_to_csv


def write_csv(rows, headers, path, label="rows", verbose=False):
    """
    Write rows to a CSV file with LF line endings

    Args:
        rows: List of row dictionaries
        headers: Column names
        path: Output file path; parent directories are created
        label: What the rows are, for the status line
        verbose: Print a status line

    Returns:
        Path of the written file

    Raises:
        OSError: If the file cannot be written
    """
    if verbose:
        print(f"📝 Writing {label} to file... ", end="", flush=True)
    write_start_time = time.time()

    csv_content = array_to_csv(rows, headers)
    output_path = Path(path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with output_path.open("w", encoding="utf-8", newline="") as handle:
        handle.write(csv_content)

    if verbose:
        write_time = f"{(time.time() - write_start_time):.2f}"
        file_size = f"{(len(csv_content) / 1024):.2f}"
        print(f"✓ ({write_time}s, {file_size} KB)")
    return str(output_path)


def emit_csv(result, path, verbose=False):
    """Write an ExperimentResult as `overhead,scope,erasure_rate,trials,K,scheme,seed`"""
    return write_csv(result.rows, SIMULATION_CSV_HEADERS, path, "erasure-rate curves", verbose)


def emit_de_csv(rows, path, verbose=False):
    return write_csv(rows, DE_CSV_HEADERS, path, "density-evolution curves", verbose)


def emit_bound_csv(rows, path, verbose=False):
    return write_csv(rows, BOUND_CSV_HEADERS, path, "ML lower bounds", verbose)


def emit_sweep_csv(rows, path, verbose=False):
    return write_csv(rows, SWEEP_CSV_HEADERS, path, "mu_bar frontier", verbose)
