"""
File and stream formats: Kraus/state/ensemble JSON inputs, built-in state
names, report streams (JSON lines or CSV) and the two-Pauli sweep table.

All numbers are written with 12 significant digits and a '.' separator.
"""

import csv
import json
from typing import IO, Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog
from pydantic import ValidationError

from app.errors import FileFormatError, QDPIError
from app.schemas.quantum import DensityMatrix, Ensemble, ExtendedReal, KrausChannel, is_infinite
from app.schemas.reports import InequalityReport, SweepRow
from app.services import state_service

logger = structlog.get_logger()

REPORT_COLUMNS = ["name", "trial", "lhs", "rhs", "slack", "satisfied", "c", "cpVerdict", "seed"]
SWEEP_COLUMNS = ["x", "c_numeric", "c_eq27", "abs_diff", "agrees"]

_KET_0 = [1.0, 0.0]
_KET_1 = [0.0, 1.0]

BUILTIN_STATES: Dict[str, List[List[float]]] = {
    "mixed2": [[0.5, 0.0], [0.0, 0.5]],
    "pure0": [[1.0, 0.0], [0.0, 0.0]],
}
BUILTIN_ENSEMBLES: Dict[str, Tuple[Tuple[float, ...], List[List[float]]]] = {
    "mm2": ((0.5, 0.5), [_KET_0, _KET_1]),
}


def format_number(value: Union[ExtendedReal, bool, int, None]) -> str:
    """'%.12g' with '.0' appended to integral values; inf as 'inf'."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if is_infinite(value):
        return str(value)
    value = float(value)
    if value == 0.0:
        value = 0.0
    text = "%.12g" % value
    if text.lstrip("-").isdigit():
        text += ".0"
    return text


def _read_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise FileFormatError(path, f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}")


def _entry(value: Any, path: str, operator_index: Optional[int]) -> complex:
    """A matrix entry: [re, im] pair or a real number."""
    if isinstance(value, bool):
        raise FileFormatError(path, f"entry {value!r} is not a number", operator_index)
    if isinstance(value, (int, float)):
        return complex(value, 0.0)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(part, (int, float)) and not isinstance(part, bool) for part in value
    ):
        return complex(value[0], value[1])
    raise FileFormatError(path, f"entry {value!r} is not a number or a [re, im] pair", operator_index)


def _matrix(rows: Any, shape: Tuple[int, int], path: str, operator_index: Optional[int] = None) -> np.ndarray:
    if not isinstance(rows, list) or len(rows) != shape[0]:
        raise FileFormatError(path, f"expected {shape[0]} rows", operator_index)
    matrix = np.empty(shape, dtype=np.complex128)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != shape[1]:
            raise FileFormatError(path, f"row {i} must have {shape[1]} entries", operator_index)
        for j, value in enumerate(row):
            matrix[i, j] = _entry(value, path, operator_index)
    if not np.all(np.isfinite(matrix)):
        raise FileFormatError(path, "entries must be finite", operator_index)
    return matrix


def _positive_int(document: Dict[str, Any], key: str, path: str) -> int:
    value = document.get(key)
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise FileFormatError(path, f"'{key}' must be a positive integer, got {value!r}")
    return value


def read_kraus_dims(path: str) -> Tuple[int, int]:
    """(dimIn, dimOut) from a Kraus file header."""
    document = _read_json(path)
    if not isinstance(document, dict):
        raise FileFormatError(path, "a Kraus file holds a JSON object")
    return _positive_int(document, "dimIn", path), _positive_int(document, "dimOut", path)


def load_kraus(path: str) -> KrausChannel:
    """
    Load a Kraus set {"dimIn": n, "dimOut": m, "ops": [...]}; each operator is
    an m x n matrix of [re, im] entries.

    Raises:
        FileFormatError: malformed document, naming the operator index when one is at fault
        OSError: file cannot be read
    """
    document = _read_json(path)
    if not isinstance(document, dict):
        raise FileFormatError(path, "a Kraus file holds a JSON object")
    dim_in = _positive_int(document, "dimIn", path)
    dim_out = _positive_int(document, "dimOut", path)
    ops = document.get("ops")
    if not isinstance(ops, list) or not ops:
        raise FileFormatError(path, "'ops' must be a non-empty list of matrices")

    matrices = [_matrix(op, (dim_out, dim_in), path, index) for index, op in enumerate(ops)]
    try:
        channel = KrausChannel(ops=matrices, dim_in=dim_in, dim_out=dim_out)
    except (QDPIError, ValidationError) as e:
        raise FileFormatError(path, str(e))
    logger.debug("Kraus set loaded", path=path, dim_in=dim_in, dim_out=dim_out, kraus_count=len(matrices))
    return channel


def _ensemble_from_document(document: Dict[str, Any], path: str) -> Ensemble:
    probs = document.get("probs")
    states = document.get("states")
    if not isinstance(probs, list) or not isinstance(states, list) or len(probs) != len(states) or not probs:
        raise FileFormatError(path, "'probs' and 'states' must be non-empty lists of equal length")
    if not all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in probs):
        raise FileFormatError(path, "'probs' must hold numbers")
    if not isinstance(states[0], list) or not states[0]:
        raise FileFormatError(path, "state 0 must be a non-empty list of amplitudes")
    dim = len(states[0])
    vectors = np.empty((len(states), dim), dtype=np.complex128)
    for index, state in enumerate(states):
        if not isinstance(state, list) or len(state) != dim:
            raise FileFormatError(path, f"state {index} must have {dim} amplitudes")
        vectors[index] = [_entry(value, path, None) for value in state]
    try:
        return Ensemble(probs=tuple(float(p) for p in probs), states=vectors)
    except (QDPIError, ValidationError) as e:
        raise FileFormatError(path, str(e))


def _state_from_document(document: Dict[str, Any], path: str) -> DensityMatrix:
    dim = _positive_int(document, "dim", path)
    matrix = _matrix(document.get("matrix"), (dim, dim), path)
    try:
        return DensityMatrix(mat=matrix)
    except (QDPIError, ValidationError) as e:
        raise FileFormatError(path, str(e))


def load_state(path: str) -> DensityMatrix:
    """State file {"dim": d, "matrix": [[...]]}; an ensemble file yields its density matrix."""
    document = _read_json(path)
    if not isinstance(document, dict):
        raise FileFormatError(path, "a state file holds a JSON object")
    if "probs" in document:
        return state_service.ensemble_to_density(_ensemble_from_document(document, path))
    return _state_from_document(document, path)


def load_ensemble(path: str) -> Ensemble:
    """Ensemble file {"probs": [...], "states": [[...], ...]}; a state file yields its spectral ensemble."""
    document = _read_json(path)
    if not isinstance(document, dict):
        raise FileFormatError(path, "an ensemble file holds a JSON object")
    if "probs" in document:
        return _ensemble_from_document(document, path)
    return state_service.spectral_ensemble(_state_from_document(document, path))


def resolve_state(name: str) -> DensityMatrix:
    """Built-in state name (mixed2, pure0, mm2) or a JSON file path."""
    if name in BUILTIN_STATES:
        return DensityMatrix(mat=BUILTIN_STATES[name])
    if name in BUILTIN_ENSEMBLES:
        return state_service.ensemble_to_density(resolve_ensemble(name))
    return load_state(name)


def resolve_ensemble(name: str) -> Ensemble:
    """Built-in ensemble name (mm2), a built-in state's spectral ensemble, or a JSON file path."""
    if name in BUILTIN_ENSEMBLES:
        probs, states = BUILTIN_ENSEMBLES[name]
        return Ensemble(probs=probs, states=states)
    if name in BUILTIN_STATES:
        return state_service.spectral_ensemble(resolve_state(name))
    return load_ensemble(name)


def report_row(report: InequalityReport) -> List[str]:
    """CSV cells for one report, in REPORT_COLUMNS order."""
    c = report.auxiliary.get("c", report.instance.get("c"))
    verdict = report.auxiliary.get("cp_verdict")
    trial = report.instance.get("trial")
    seed = report.instance.get("seed")
    return [
        report.name,
        "" if trial is None else str(trial),
        format_number(report.lhs),
        format_number(report.rhs),
        "indeterminate" if report.indeterminate else format_number(report.slack),
        format_number(report.satisfied),
        format_number(c),
        "" if verdict is None else format_number(verdict),
        "" if seed is None else str(seed),
    ]


class ReportWriter:
    """Streams inequality reports as JSON lines or CSV rows."""

    def __init__(self, stream: IO[str], fmt: str = "csv"):
        if fmt not in ("csv", "json"):
            raise ValueError(f"unknown report format '{fmt}'")
        self.stream = stream
        self.fmt = fmt
        self._csv = csv.writer(stream, lineterminator="\n") if fmt == "csv" else None
        self._header_written = False

    def write(self, report: InequalityReport) -> None:
        if self._csv is not None:
            if not self._header_written:
                self._csv.writerow(REPORT_COLUMNS)
                self._header_written = True
            self._csv.writerow(report_row(report))
        else:
            self.stream.write(report.model_dump_json() + "\n")


def write_sweep(rows: Sequence[SweepRow], stream: IO[str], fmt: str = "csv") -> None:
    """CSV with header x,c_numeric,c_eq27,abs_diff,agrees, or a JSON array that also carries c_bloch."""
    if fmt == "json":
        stream.write(json.dumps([row.model_dump() for row in rows], indent=2) + "\n")
        return
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                format_number(row.x),
                format_number(row.c_numeric),
                format_number(row.c_eq27),
                format_number(row.abs_diff),
                format_number(row.agrees),
            ]
        )
