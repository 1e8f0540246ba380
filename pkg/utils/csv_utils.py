"""CSV utilities"""
import csv
import io

from config.constants import CSV_FLOAT_DIGITS


def format_field(field):
    """
    Render one CSV value

    Floats use CSV_FLOAT_DIGITS significant digits, booleans are lowercase.

    Args:
        field: Field value to format

    Returns:
        Field string
    """
    if field is None:
        return ""
    if isinstance(field, bool):
        return "true" if field else "false"
    if isinstance(field, float):
        return f"{field:.{CSV_FLOAT_DIGITS}g}"
    return str(field)


def array_to_csv(data, headers):
    """
    Convert a list of row dictionaries to CSV text with LF line endings

    Args:
        data: List of dictionaries
        headers: List of header names

    Returns:
        CSV string; header only when data is empty
    """
    output = io.StringIO()
    writer = csv.writer(output, lineterminator="\n")
    writer.writerow(headers)
    for row in data:
        writer.writerow([format_field(row.get(header)) for header in headers])
    return output.getvalue()


def csv_to_array(text):
    """
    Parse CSV text into row dictionaries of strings

    Args:
        text: CSV content with a header line

    Returns:
        (headers, rows)
    """
    reader = csv.DictReader(io.StringIO(text))
    rows = [dict(row) for row in reader]
    return reader.fieldnames or [], rows
