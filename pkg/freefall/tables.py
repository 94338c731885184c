"""
tables.py: CSV output for freefall runs.

Floats are written in shortest round-trip form (repr), lines end in LF and
free-form header lines are written as `# ` comments, so identical runs give
byte-identical files.
"""

import csv
import io
import itertools
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .lingrav import GaugeReport
from .thermal import ProfileRow, SpectrumSample

SPECTRUM_COLUMNS = ["x", "power_numeric", "power_analytic", "planck", "rel_err_quad", "identity_err"]
PROFILE_COLUMNS = ["R_m", "T_K", "ratio_to_hawking", "interior"]
GAUGE_COLUMNS = ["trial", "seed", "residual_gauge", "residual_bianchi", "pass"]
TENSOR_COLUMNS = ["index1", "index2", "index3", "value"]


def format_float(value: float) -> str:
    return repr(float(value))


def _cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


class Table:
    """Accumulates comment lines and CSV rows into one text buffer."""

    def __init__(self):
        self._buffer = io.StringIO()
        self._writer = csv.writer(self._buffer, lineterminator="\n")

    def comment(self, *lines: str) -> "Table":
        for line in lines:
            self._buffer.write(f"# {line}\n")
        return self

    def header(self, columns: Sequence[str]) -> "Table":
        self._writer.writerow(columns)
        return self

    def row(self, values: Iterable) -> "Table":
        self._writer.writerow([_cell(v) for v in values])
        return self

    def rows(self, rows: Iterable[Iterable]) -> "Table":
        for values in rows:
            self.row(values)
        return self

    def text(self) -> str:
        return self._buffer.getvalue()


def tensor_block(table: Table, name: str, array: np.ndarray, conventions: str = "") -> Table:
    """One `# tensor` block; rank-2 arrays leave index3 empty."""
    array = np.asarray(array, dtype=float)
    if array.ndim not in (2, 3):
        raise ValueError(f"tensor blocks hold rank 2 or 3 arrays, got rank {array.ndim}")
    table.comment(f"tensor {name}" + (f": {conventions}" if conventions else ""))
    table.header(TENSOR_COLUMNS)
    for idx in itertools.product(*(range(n) for n in array.shape)):
        padded: List[Optional[int]] = list(idx) + [None] * (3 - len(idx))
        table.row(["" if i is None else i for i in padded] + [float(array[idx])])
    return table


def spectrum_table(samples: Sequence[SpectrumSample], comments: Sequence[str] = ()) -> str:
    table = Table().comment(*comments).header(SPECTRUM_COLUMNS)
    for s in samples:
        table.row([s.x, s.power_numeric, s.power_analytic, s.planck, s.rel_err_quad, s.identity_err])
    return table.text()


def profile_table(rows: Sequence[ProfileRow], comments: Sequence[str] = ()) -> str:
    table = Table().comment(*comments).header(PROFILE_COLUMNS)
    table.rows([r.R, r.T, r.ratio_to_hawking, r.interior] for r in rows)
    return table.text()


def gauge_table(report: GaugeReport, comments: Sequence[str] = ()) -> str:
    table = Table().comment(*comments).header(GAUGE_COLUMNS)
    table.rows([r.trial, r.seed, r.residual_gauge, r.residual_bianchi, r.passed] for r in report.rows)
    return table.text()
