"""Error type for malformed or missing run artifacts."""

from __future__ import annotations

from pathlib import Path


class PlotDataError(Exception):
    """An artifact file is missing, malformed, or inconsistent.

    The message always names the offending file, and the column or key
    when one is known, so a failed render points straight at the input.
    """

    def __init__(self, path: str | Path, detail: str, column: str | None = None):
        self.path = str(path)
        self.column = column
        self.detail = detail
        where = f"{self.path}" if column is None else f"{self.path}, column '{column}'"
        super().__init__(f"{where}: {detail}")
