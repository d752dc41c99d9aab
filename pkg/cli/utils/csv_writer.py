"""
CSV output with a metadata preamble
Floats carry a fixed number of significant digits so identical runs give identical bytes
"""

import csv
import io
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

from cli.utils.constants import CLI_VERSION, CSV_SIGNIFICANT_DIGITS


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.{CSV_SIGNIFICANT_DIGITS}g}"
    if hasattr(value, "value"):  # enums
        return str(value.value)
    return str(value)


def metadata_line(config_hash: str, seed: Optional[int]) -> str:
    return f"# metadata config_hash={config_hash} seed={'' if seed is None else seed} version={CLI_VERSION}\n"


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], config_hash: str, seed: Optional[int]) -> str:
    buffer = io.StringIO()
    buffer.write(metadata_line(config_hash, seed))
    writer = csv.writer(buffer, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(cell) for cell in row])
    return buffer.getvalue()


def write_csv(
    path: Optional[str],
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    config_hash: str,
    seed: Optional[int] = None,
) -> str:
    """Write to `path`, or return the text for stdout when path is None or '-'."""
    text = render_csv(header, rows, config_hash, seed)
    if path and path != "-":
        with open(Path(path), "w", encoding="utf-8", newline="") as f:
            f.write(text)
    return text
