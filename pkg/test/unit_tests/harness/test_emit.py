"""
Testsuite validating the emission of result tables of the harness package.

Copyright (c) 2024 The linfsindy developers
This is free software, released under the MIT License. Refer to linfsindy/LICENSE.
"""

# system modules
import pytest

# system-under-test
from linfsindy.harness.emit import *
from linfsindy.harness.tables import TableResult, table_cells
from linfsindy.harness.types import EmitError, HarnessError, OutputFormat, TableId
from linfsindy.metrics import ResultRecord


def sample_result() -> TableResult:
    records = [
        ResultRecord(scenario_id='T3:CentralDifference', replicate=0, objective='L2',
                     rmse=(1.0, 2.0, 3.0), std=(0.5, 0.5, 0.5)),
        ResultRecord(scenario_id='T3:CentralDifference', replicate=0, objective='Linf',
                     rmse=(2.0, 1.0, 3.0), std=(0.5, 0.25, 0.1)),
        ResultRecord(scenario_id='T3:PolynomialInterp', replicate=0, objective='L2',
                     rmse=(1.0, 1.0, 1.0), std=(0.0, 0.0, 0.0), diverged=True),
        ResultRecord(scenario_id='T3:PolynomialInterp', replicate=0, objective='Linf',
                     error='RegressionError: failed'),
    ]
    return TableResult(table_id=TableId.T3, cells=table_cells(TableId.T3), records=records)


def markdown_cells(line: str) -> list:
    return [cell.strip() for cell in line.strip().strip('|').split('|')]


def test_table_header():
    header = table_header(3)
    assert len(header) == 15
    assert header[:5] == ['cell', 'RMSE L2 (1)', 'RMSE Linf (1)', 'STD L2 (1)', 'STD Linf (1)']
    assert header[-2:] == ['flags', 'ties']


def test_render_csv():
    lines = render_table(sample_result(), OutputFormat.CSV).splitlines()
    assert lines[0] == ','.join(table_header(3))
    assert lines[1] == 'CentralDifference,1.0,2.0,0.5,0.5,2.0,1.0,0.5,0.25,3.0,3.0,0.5,0.1,,'
    assert lines[2] == 'PolynomialInterp,1.0,nan,0.0,nan,1.0,nan,0.0,nan,1.0,nan,0.0,nan,' \
                       'L2 diverged 1/1; Linf failed 1/1,'


def test_render_markdown():
    lines = render_table(sample_result(), OutputFormat.MARKDOWN).splitlines()
    assert lines[0] == 'Table 3: Lorenz: reconstruction results for different derivative ' \
                       'approximations'
    assert lines[1] == ''
    assert markdown_cells(lines[2]) == table_header(3)
    assert markdown_cells(lines[4]) == [
        'CentralDifference', '**1.0000**', '2.0000', '**0.5000**', '**0.5000**',
        '2.0000', '**1.0000**', '0.5000', '**0.2500**',
        '**3.0000**', '**3.0000**', '0.5000', '**0.1000**', '', 'STD (1), RMSE (3)']
    assert markdown_cells(lines[5])[:3] == ['PolynomialInterp', '1.0000', 'nan']
    assert markdown_cells(lines[5])[-2] == 'L2 diverged 1/1; Linf failed 1/1'


def test_render_without_results():
    empty = TableResult(table_id=TableId.T3, cells=table_cells(TableId.T3), records=[])
    for fmt in OutputFormat:
        with pytest.raises(HarnessError) as exc:
            render_table(empty, fmt)
        assert str(exc.value) == 'There are no results to emit'

    with pytest.raises(HarnessError):
        render_table(TableResult(table_id=TableId.T3, cells=[], records=[]), OutputFormat.MARKDOWN)


def test_emit_table(tmp_path):
    path = emit_table(sample_result(), OutputFormat.CSV, str(tmp_path / 'table3.csv'))
    with open(path, 'r', encoding='utf-8') as file:
        assert file.read() == render_table(sample_result(), OutputFormat.CSV)

    target = str(tmp_path / 'absent' / 'table3.md')
    with pytest.raises(EmitError) as exc:
        emit_table(sample_result(), OutputFormat.MARKDOWN, target)
    assert str(exc.value).startswith(target)


def test_records(tmp_path):
    records = sample_result().records
    lines = render_records(records).splitlines()
    assert len(lines) == 5
    assert lines[0].startswith('scenario_id,replicate,objective,rmse_1,rmse_2,rmse_3,std_1')
    assert lines[4].startswith('T3:PolynomialInterp,0,Linf,,,,,,,false')

    path = emit_records(records, str(tmp_path / 'records.csv'))
    with open(path, 'r', encoding='utf-8') as file:
        assert file.read().splitlines() == lines

    with pytest.raises(HarnessError):
        render_records([])
