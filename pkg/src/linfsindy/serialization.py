"""
Module providing the file formats of linfsindy:
 - trajectory CSV with header t,x1,...,xd and derivative CSV with header t,dx1,...,dxd, values
   written with 17 significant digits so reading them back is exact;
 - identified model JSON (orjson), keyed by term index and label per sub-system;
 - the ConfigReader helper to acquire typed values from parsed JSON with context reporting.

Copyright (c) 2024 The linfsindy developers
This is free software, released under the MIT License. Refer to linfsindy/LICENSE.
"""

# system modules
from typing import Any, List, Optional, Type

# third-party modules
import numpy as np
import orjson

# linfsindy modules
from .dictionary import DictionarySpec
from .differentiation import DerivativeSeries
from .dynamics import Trajectory
from .sparse_regression import IdentifiedModel, ObjectiveKind, SparseCoefficients

# constants
CSV_FORMAT = '%.17g'
JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY


class SerializationError(Exception):
    """An error occurred while reading or writing a linfsindy file."""


class ConfigReader:
    """Helper class to acquire typed contents of a parsed JSON object and report failures with
    the provided caller context."""

    def __init__(self, element: Any, caller_context: str,
                 error_type: Type[Exception] = SerializationError):
        self._element = element
        self._ctx = caller_context
        self._error_type = error_type
        if not isinstance(element, dict):
            raise error_type(f'{self._ctx}: element is not of type "dict"')

    def _fail(self, message: str) -> Exception:
        return self._error_type(f'{self._ctx}: {message}')

    def has(self, key_name: str) -> bool:
        """Check whether the key is present with a non-null value."""
        return self._element.get(key_name) is not None

    def _get(self, key_name: str) -> Any:
        if key_name not in self._element:
            raise self._fail(f'missing key "{key_name}"')
        return self._element[key_name]

    def get_str_value(self, key_name: str) -> str:
        """Get the str value of the specified key_name or raise an exception on failure."""
        value = self._get(key_name)
        if not isinstance(value, str):
            raise self._fail(f'key "{key_name}" is not of type "str"')
        return value

    def get_int_value(self, key_name: str, default: Optional[int] = None) -> int:
        """Get the int value of the specified key_name, or the default when it is absent."""
        if default is not None and key_name not in self._element:
            return default
        value = self._get(key_name)
        if not isinstance(value, int) or isinstance(value, bool):
            raise self._fail(f'key "{key_name}" is not of type "int"')
        return value

    def get_float_value(self, key_name: str, default: Optional[float] = None) -> float:
        """Get the numeric value of the specified key_name as float, or the default when it is
        absent."""
        if default is not None and key_name not in self._element:
            return default
        value = self._get(key_name)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise self._fail(f'key "{key_name}" is not a number')
        return float(value)

    def tryget_float_value(self, key_name: str) -> Optional[float]:
        """Try to get the numeric value of the specified key_name or reply None when it is
        absent or null."""
        return self.get_float_value(key_name) if self.has(key_name) else None

    def get_bool_value(self, key_name: str, default: Optional[bool] = None) -> bool:
        """Get the bool value of the specified key_name, or the default when it is absent."""
        if default is not None and key_name not in self._element:
            return default
        value = self._get(key_name)
        if not isinstance(value, bool):
            raise self._fail(f'key "{key_name}" is not of type "bool"')
        return value

    def get_dict_value(self, key_name: str) -> dict:
        """Get the dict value of the specified key_name or raise an exception on failure."""
        value = self._get(key_name)
        if not isinstance(value, dict):
            raise self._fail(f'key "{key_name}" is not of type "dict"')
        return value

    def get_list_value(self, key_name: str) -> list:
        """Get the list value of the specified key_name. Allowed to be empty."""
        value = self._get(key_name)
        if not isinstance(value, list):
            raise self._fail(f'key "{key_name}" is not of type "list"')
        return value

    def get_float_list(self, key_name: str) -> List[float]:
        """Get a list of numbers as floats."""
        values = self.get_list_value(key_name)
        if any(not isinstance(v, (int, float)) or isinstance(v, bool) for v in values):
            raise self._fail(f'key "{key_name}" must be a list of numbers')
        return [float(v) for v in values]


###############################################################################
# CSV files
#

def _write_series(path: str, times: np.ndarray, values: np.ndarray, prefix: str):
    header = ','.join(['t'] + [f'{prefix}{k + 1}' for k in range(values.shape[1])])
    try:
        np.savetxt(path, np.column_stack([times, values]), fmt=CSV_FORMAT, delimiter=',',
                   header=header, comments='')
    except OSError as exc:
        raise SerializationError(f'{path}: {exc}') from exc


def _read_series(path: str, prefix: str) -> np.ndarray:
    try:
        with open(path, 'r', encoding='utf-8') as file:
            header = file.readline().strip().split(',')
            if not header or header[0] != 't' or \
                    header[1:] != [f'{prefix}{k + 1}' for k in range(len(header) - 1)]:
                raise SerializationError(f'{path}: unexpected header {",".join(header)}')
            data = np.loadtxt(file, delimiter=',', ndmin=2)
    except OSError as exc:
        raise SerializationError(f'{path}: {exc}') from exc
    except ValueError as exc:
        raise SerializationError(f'{path}: malformed contents ({exc})') from exc

    if data.shape[1] != len(header):
        raise SerializationError(f'{path}: {data.shape[1]} columns versus a header of '
                                 f'{len(header)}')
    return data


def write_trajectory_csv(traj: Trajectory, path: str):
    """Write the trajectory as CSV with columns t,x1,...,xd."""
    _write_series(path, traj.times, traj.values, 'x')


def read_trajectory_csv(path: str) -> Trajectory:
    """Read a trajectory CSV; dt is taken from the first two time stamps."""
    data = _read_series(path, 'x')
    if data.shape[0] < 2:
        raise SerializationError(f'{path}: a trajectory needs at least 2 samples to derive dt')
    return Trajectory(times=data[:, 0], values=data[:, 1:], dt=float(data[1, 0] - data[0, 0]))


def write_derivative_csv(series: DerivativeSeries, path: str):
    """Write the derivative series as CSV with columns t,dx1,...,dxd."""
    _write_series(path, series.times, series.values, 'dx')


def read_derivative_csv(path: str, first_index: int = 0) -> DerivativeSeries:
    """Read a derivative CSV. The valid range starts at first_index of the source trajectory."""
    data = _read_series(path, 'dx')
    return DerivativeSeries(times=data[:, 0], values=data[:, 1:],
                            valid_range=(first_index, first_index + data.shape[0] - 1))


###############################################################################
# Identified model JSON
#

def model_to_dict(model: IdentifiedModel) -> dict:
    """Convert an identified model into a JSON friendly dictionary."""
    labels = model.dictionary.labels(model.var_names)
    equations = []
    for name, coeffs in zip(model.var_names, model.coefficients):
        equations.append({
            'variable': name,
            'terms': [{'index': j, 'label': labels[j], 'coefficient': float(coeffs.xi[j])}
                      for j in coeffs.support],
            'lambda': coeffs.lam,
            'objective_value': coeffs.objective_value,
            'diagnostics': coeffs.diagnostics})
    return {'objective': model.objective_kind.value,
            'dictionary': {'dimension': model.dictionary.dimension,
                           'max_degree': model.dictionary.max_degree},
            'var_names': list(model.var_names),
            'equations': equations}


def model_from_dict(element: dict) -> IdentifiedModel:
    """Parse an identified model from the dictionary produced by model_to_dict()."""
    elt = ConfigReader(element, 'model_from_dict')
    try:
        kind = ObjectiveKind(elt.get_str_value('objective'))
    except ValueError as exc:
        raise SerializationError(f'model_from_dict: {exc}') from exc

    dct = ConfigReader(elt.get_dict_value('dictionary'), 'model_from_dict.dictionary')
    spec = DictionarySpec(dimension=dct.get_int_value('dimension'),
                          max_degree=dct.get_int_value('max_degree'))
    var_names = [str(name) for name in elt.get_list_value('var_names')]

    coefficients = []
    for nr, equation in enumerate(elt.get_list_value('equations')):
        eq = ConfigReader(equation, f'model_from_dict.equations[{nr}]')
        xi = np.zeros(spec.size)
        for term in eq.get_list_value('terms'):
            tr = ConfigReader(term, f'model_from_dict.equations[{nr}].terms')
            index = tr.get_int_value('index')
            if not 0 <= index < spec.size:
                raise SerializationError(f'model_from_dict: term index {index} out of range')
            xi[index] = tr.get_float_value('coefficient')
        coefficients.append(SparseCoefficients(
            xi=xi, support=tuple(int(j) for j in np.flatnonzero(xi)),
            objective_value=eq.get_float_value('objective_value'), objective_kind=kind,
            lam=eq.get_float_value('lambda'), diagnostics=eq.get_dict_value('diagnostics')))

    return IdentifiedModel(coefficients=coefficients, dictionary=spec, var_names=var_names)


def dumps_json(content: Any) -> bytes:
    """Serialize with the package JSON options (2-space indent, sorted keys, numpy support)."""
    return orjson.dumps(content, option=JSON_OPTIONS)


def write_model_json(model: IdentifiedModel, path: str):
    """Write the identified model as JSON."""
    try:
        with open(path, 'wb') as file:
            file.write(dumps_json(model_to_dict(model)))
    except OSError as exc:
        raise SerializationError(f'{path}: {exc}') from exc


def read_model_json(path: str) -> IdentifiedModel:
    """Read an identified model from a JSON file."""
    try:
        with open(path, 'rb') as file:
            content = orjson.loads(file.read())
    except OSError as exc:
        raise SerializationError(f'{path}: {exc}') from exc
    except orjson.JSONDecodeError as exc:
        raise SerializationError(f'{path}: invalid JSON ({exc})') from exc
    return model_from_dict(content)
