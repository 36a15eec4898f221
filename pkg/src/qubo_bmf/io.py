"""Matrix and QUBO file formats.

Dense text format::

    rows cols
    a11 a12 ... a1n
    ...

MatrixMarket files (array or coordinate) are detected by their
``%%MatrixMarket`` banner and read through scipy.
"""
from __future__ import annotations

import io
import json
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp

from .matrix import as_binary, as_real


class FormatError(ValueError):
    """Malformed input file; the message carries file and line context."""

    def __init__(self, path, line: int | None, msg: str):
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {msg}")
        self.path = path
        self.line = line


def _parse_dense(text: str, path) -> np.ndarray:
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise FormatError(path, None, "empty file")
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 2:
        raise FormatError(path, lineno, f"expected 'rows cols' header, got {header!r}")
    try:
        rows, cols = int(parts[0]), int(parts[1])
    except ValueError:
        raise FormatError(path, lineno, f"non-integer header {header!r}") from None
    if rows < 0 or cols < 0:
        raise FormatError(path, lineno, "negative dimension")
    body = lines[1:]
    if len(body) != rows:
        raise FormatError(path, None, f"header declares {rows} rows, found {len(body)}")
    out = np.zeros((rows, cols), dtype=np.float64)
    for r, (lineno, ln) in enumerate(body):
        toks = ln.split()
        if len(toks) != cols:
            raise FormatError(path, lineno, f"expected {cols} values, found {len(toks)}")
        try:
            out[r] = [float(t) for t in toks]
        except ValueError as e:
            raise FormatError(path, lineno, str(e)) from None
    return out


def _data_line(text: str, row: int) -> int:
    """1-based file line holding data row ``row`` of a dense-text file."""
    seen = -1  # header is data-less
    for i, ln in enumerate(text.splitlines()):
        ln = ln.strip()
        if ln and not ln.startswith("#"):
            if seen == row:
                return i + 1
            seen += 1
    return -1


def read_matrix(path, binary: bool = False) -> np.ndarray:
    """Read a dense-text or MatrixMarket matrix.

    With ``binary=True`` only the tokens 0 and 1 are accepted and an int8
    matrix is returned; otherwise a float64 matrix.
    """
    path = Path(path)
    text = path.read_text()
    market = text.lstrip().startswith("%%MatrixMarket")
    if market:
        try:
            M = scipy.io.mmread(io.StringIO(text))
        except Exception as e:  # scipy raises a mix of ValueError/IndexError
            raise FormatError(path, None, f"bad MatrixMarket file: {e}") from None
        arr = M.toarray() if sp.issparse(M) else np.asarray(M)
        arr = np.asarray(arr, dtype=np.float64)
    else:
        arr = _parse_dense(text, path)
    if binary:
        if arr.size and not np.all((arr == 0) | (arr == 1)):
            bad = np.argwhere((arr != 0) & (arr != 1))[0]
            line = None if market else _data_line(text, int(bad[0]))
            raise FormatError(path, line, f"non-binary entry {float(arr[tuple(bad)])!r}")
        return as_binary(arr)
    return as_real(arr)


def format_matrix(M) -> str:
    M = np.asarray(M)
    rows, cols = M.shape
    integral = np.issubdtype(M.dtype, np.integer) or M.dtype == bool or np.all(M == np.round(M))
    lines = [f"{rows} {cols}"]
    for row in M:
        if integral:
            lines.append(" ".join(str(int(v)) for v in row))
        else:
            lines.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def write_matrix(path, M) -> None:
    Path(path).write_text(format_matrix(M))


def write_matrix_market(path, M) -> None:
    scipy.io.mmwrite(str(path), np.asarray(M))


def write_qubo(path, q) -> None:
    """Coordinate format: ``n_vars``, ``offset``, then ``i j coeff`` lines (0-based)."""
    coo = q.coeffs.tocoo()
    order = np.lexsort((coo.col, coo.row))
    lines = [str(q.n_vars), repr(float(q.offset))]
    for k in order:
        if coo.data[k] != 0:
            lines.append(f"{coo.row[k]} {coo.col[k]} {float(coo.data[k])!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_qubo(path):
    """Read a coordinate QUBO file into a layout-free :class:`QuboProblem`."""
    from .qubo import QuboProblem

    path = Path(path)
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(path.read_text().splitlines())]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if len(lines) < 2:
        raise FormatError(path, None, "expected n_vars and offset lines")
    try:
        n = int(lines[0][1])
    except ValueError:
        raise FormatError(path, lines[0][0], f"bad n_vars {lines[0][1]!r}") from None
    try:
        offset = float(lines[1][1])
    except ValueError:
        raise FormatError(path, lines[1][0], f"bad offset {lines[1][1]!r}") from None
    rows, cols, vals = [], [], []
    for lineno, ln in lines[2:]:
        toks = ln.split()
        if len(toks) != 3:
            raise FormatError(path, lineno, f"expected 'i j coeff', got {ln!r}")
        try:
            i, j, c = int(toks[0]), int(toks[1]), float(toks[2])
        except ValueError:
            raise FormatError(path, lineno, f"unparseable entry {ln!r}") from None
        if not (0 <= i < n and 0 <= j < n):
            raise FormatError(path, lineno, f"index out of range for n_vars={n}")
        rows.append(i)
        cols.append(j)
        vals.append(c)
    coeffs = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    return QuboProblem(coeffs=coeffs, offset=offset, layout=None)


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text
