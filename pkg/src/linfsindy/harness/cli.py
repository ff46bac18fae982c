"""
Module providing the command line interface:

    linfsindy run --table {1..5} --out DIR [--replicates N] [--seed S] [--format F]
    linfsindy run --config FILE.json --out DIR
    linfsindy inspect --coeffs FILE.json

Copyright (c) 2024 The linfsindy developers
This is free software, released under the MIT License. Refer to linfsindy/LICENSE.
"""

# system modules
import argparse
import logging
import os
import re
from typing import List, Optional

# linfsindy modules
from ..linfsindy_version import COPYRIGHT, VERSION
from ..dictionary import DictionaryError
from ..serialization import SerializationError, read_model_json, write_model_json
from ..sparse_regression import RegressionError
from ..text_gen import Indentizer, TextBlock

# own modules
from . import run_scenarios, run_table
from .config import read_scenarios
from .emit import emit_records, emit_table
from .types import HarnessError, OutputFormat, TableId

logger = logging.getLogger(__name__)

FORMAT_CHOICES = ('csv', 'markdown', 'both')
FORMAT_SUFFIX = {OutputFormat.CSV: 'csv', OutputFormat.MARKDOWN: 'md'}


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser with the run and inspect commands."""
    parser = argparse.ArgumentParser(prog='linfsindy',
                                     description='Sparse identification of nonlinear dynamics '
                                                 'with L2 and L-infinity objectives.',
                                     epilog=COPYRIGHT)
    parser.add_argument('--version', action='version', version=f'%(prog)s {VERSION}')
    parser.add_argument('-v', '--verbose', action='store_true', help='log debug messages')
    commands = parser.add_subparsers(dest='command', required=True)

    run = commands.add_parser('run', help='run a predefined table or a scenario configuration')
    source = run.add_mutually_exclusive_group(required=True)
    source.add_argument('--table', type=int, choices=[t.value for t in TableId],
                        help='predefined experiment grid')
    source.add_argument('--config', help='JSON scenario configuration file')
    run.add_argument('--out', required=True, help='output directory')
    run.add_argument('--replicates', type=int, default=1, help='replicates per table cell')
    run.add_argument('--seed', type=int, default=0, help='table seed')
    run.add_argument('--format', choices=FORMAT_CHOICES, default='both',
                     help='table file format')
    run.add_argument('--t-end', type=float, default=None,
                     help='override the identification horizon of a table')
    run.add_argument('--recon-t-end', type=float, default=None,
                     help='override the reconstruction horizon of a table')

    inspect = commands.add_parser('inspect', help='pretty-print an identified model')
    inspect.add_argument('--coeffs', required=True, help='identified model JSON file')
    return parser


def _formats(choice: str) -> List[OutputFormat]:
    if choice == 'both':
        return [OutputFormat.CSV, OutputFormat.MARKDOWN]
    return [OutputFormat(choice)]


def _safe_name(text: str) -> str:
    return re.sub(r'[^A-Za-z0-9_.-]+', '_', text).strip('_')


def run_table_command(args: argparse.Namespace) -> List[str]:
    """Run a predefined table and write the tables and the per-replicate records."""
    table_id = TableId(args.table)
    result = run_table(table_id, replicates=args.replicates, seed=args.seed,
                       t_end=args.t_end, recon_t_end=args.recon_t_end)
    written = [emit_table(result, fmt, os.path.join(args.out,
                                                    f'table{table_id.value}.{FORMAT_SUFFIX[fmt]}'))
               for fmt in _formats(args.format)]
    written.append(emit_records(result.records,
                                os.path.join(args.out, f'table{table_id.value}_records.csv')))
    return written


def run_config_command(args: argparse.Namespace) -> List[str]:
    """Run the scenarios of a configuration file and write the records and the identified
    models."""
    records = run_scenarios(read_scenarios(args.config))
    written = [emit_records(records, os.path.join(args.out, 'records.csv'))]
    for record in records:
        if record.model is None:
            continue
        name = _safe_name(f'{record.scenario_id}_{record.objective}_{record.replicate}')
        path = os.path.join(args.out, f'{name}.json')
        write_model_json(record.model, path)
        written.append(path)
    return written


def inspect_command(args: argparse.Namespace) -> List[str]:
    """Get the equations of an identified model file."""
    model = read_model_json(args.coeffs)
    tb = TextBlock(f'objective: {model.objective_kind.value}')
    tb += TextBlock(model.equations()).indent(Indentizer(bullet='-'))
    return tb.lines


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; replies the process exit code."""
    args = create_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    try:
        if args.command == 'inspect':
            for line in inspect_command(args):
                print(line)
            return 0

        os.makedirs(args.out, exist_ok=True)
        written = run_table_command(args) if args.table is not None else \
            run_config_command(args)
        for path in written:
            logger.info('written %s', path)
        return 0
    except (HarnessError, SerializationError, RegressionError, DictionaryError, OSError) as exc:
        logger.error('%s', exc)
        return 1
