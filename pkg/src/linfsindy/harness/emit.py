"""
Module providing the emission of result tables and per-replicate record files.

A table has one row per grid cell. Per sub-system k the columns are, in this order,
RMSE L2, RMSE Linf, STD L2, STD Linf (means over the successful replicates). In markdown the
smaller value of each (L2, Linf) pair is bolded; values equal at 4 decimals are both bolded and
listed in the ties column. The flags column reports diverged or failed replicates.

Copyright (c) 2024 The linfsindy developers
This is free software, released under the MIT License. Refer to linfsindy/LICENSE.
"""

# system modules
import csv
import io
import math
from typing import Dict, List, Tuple

# linfsindy modules
from ..metrics import AggregateResult, ResultRecord, csv_header, mean_over_replicates
from ..sparse_regression import ObjectiveKind
from ..text_gen import MarkdownTable, TextBlock

# own modules
from .tables import TableCell, TableResult
from .types import EmitError, HarnessError, OutputFormat

# constants
INDICATORS = ('RMSE', 'STD')
MARKDOWN_DECIMALS = 4


def _objective_label(kind: ObjectiveKind) -> str:
    return 'L2' if kind is ObjectiveKind.L2 else 'Linf'


def _dimension(result: TableResult) -> int:
    return len(result.cells[0].scenarios[0].ident_x0)


def table_header(dimension: int) -> List[str]:
    """Get the stable column order of a result table."""
    header = ['cell']
    for k in range(dimension):
        for indicator in INDICATORS:
            header.extend(f'{indicator} {_objective_label(kind)} ({k + 1})'
                          for kind in (ObjectiveKind.L2, ObjectiveKind.LINF))
    return header + ['flags', 'ties']


def _aggregates(result: TableResult, cell: TableCell) -> Dict[str, AggregateResult]:
    return {agg.objective: agg for agg in mean_over_replicates(result.records_of(cell))}


def _pair(aggregates: Dict[str, AggregateResult], indicator: str, k: int) -> Tuple[float, float]:
    def value(kind: ObjectiveKind) -> float:
        agg = aggregates.get(kind.value)
        if agg is None:
            return math.nan
        values = agg.rmse if indicator == 'RMSE' else agg.std
        return values[k] if k < len(values) else math.nan

    return value(ObjectiveKind.L2), value(ObjectiveKind.LINF)


def _flags(aggregates: Dict[str, AggregateResult]) -> str:
    flags = []
    for kind in (ObjectiveKind.L2, ObjectiveKind.LINF):
        agg = aggregates.get(kind.value)
        if agg is None:
            flags.append(f'{_objective_label(kind)} missing')
            continue
        if agg.diverged_count:
            flags.append(f'{_objective_label(kind)} diverged {agg.diverged_count}/{agg.replicates}')
        if agg.error_count:
            flags.append(f'{_objective_label(kind)} failed {agg.error_count}/{agg.replicates}')
    return '; '.join(flags)


def _rows(result: TableResult, markdown: bool) -> List[List[str]]:
    if not result.cells or not result.records:
        raise HarnessError('There are no results to emit')

    dimension = _dimension(result)
    rows = []
    for cell in result.cells:
        aggregates = _aggregates(result, cell)
        row, ties = [cell.label], []
        for k in range(dimension):
            for indicator in INDICATORS:
                pair = _pair(aggregates, indicator, k)
                if not markdown:
                    row.extend(repr(v) for v in pair)
                    continue
                texts = [f'{v:.{MARKDOWN_DECIMALS}f}' for v in pair]
                if math.isnan(pair[0]) or math.isnan(pair[1]):
                    row.extend(texts)
                    continue
                l2_rounded, linf_rounded = (float(t) for t in texts)
                if l2_rounded == linf_rounded:
                    ties.append(f'{indicator} ({k + 1})')
                row.extend(f'**{t}**' if rounded == min(l2_rounded, linf_rounded) else t
                           for t, rounded in zip(texts, (l2_rounded, linf_rounded)))
        row.extend([_flags(aggregates), ', '.join(ties)])
        rows.append(row)
    return rows


def render_table(result: TableResult, fmt: OutputFormat) -> str:
    """Render the result table as CSV or markdown text."""
    rows = _rows(result, markdown=fmt is OutputFormat.MARKDOWN)
    header = table_header(_dimension(result))
    if fmt is OutputFormat.CSV:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)
        return buffer.getvalue()

    table = MarkdownTable(header=header)
    for row in rows:
        table.add_row(row)
    tb = TextBlock(f'Table {result.table_id.value}: {result.caption}')
    tb += ''
    tb += table.to_textblock()
    return str(tb)


def _write_text(path: str, text: str):
    try:
        with open(path, 'w', encoding='utf-8', newline='') as file:
            file.write(text)
    except OSError as exc:
        raise EmitError(f'{path}: {exc}') from exc


def emit_table(result: TableResult, fmt: OutputFormat, path: str) -> str:
    """Write the result table in the specified format to path and reply the path."""
    _write_text(path, render_table(result, fmt))
    return path


def render_records(records: List[ResultRecord]) -> str:
    """Render the per-replicate records as CSV text."""
    if not records:
        raise HarnessError('There are no records to emit')
    dimension = max(len(r.rmse) for r in records) or 1
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(csv_header(dimension))
    writer.writerows(r.to_row(dimension) for r in records)
    return buffer.getvalue()


def emit_records(records: List[ResultRecord], path: str) -> str:
    """Write the per-replicate records as CSV to path and reply the path."""
    _write_text(path, render_records(records))
    return path
