"""File schemas shared by the command-line front end.

Complex scalars serialize as ``[re, im]`` pairs, matrices as row-major
nested lists of pairs, grids as ``values[m][n][i][j] = [re, im]``.  The JSON
writer is deterministic: fields keep their construction order and every
float is rendered with ``%.17g``, so identical inputs produce byte-identical
outputs.  CSV export follows RFC 4180 with complex entries as ``re+imi``
strings.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .core import AmbiguousSource, ParseError, as_matrix
from .lattice import DafGrid
from .moments import AtomicMeasure
from .realization import StateSpace
from .spectral import SpectralFactor

__all__ = [
    "dumps", "format_float", "complex_to_pair", "pair_to_complex",
    "matrix_to_json", "json_to_matrix", "grid_to_json", "grid_from_json",
    "measure_from_json", "moments_from_json", "realization_from_json",
    "realization_to_json", "factor_from_json", "boundary_from_json",
    "detect_source", "load_json", "matrix_csv", "complex_str",
]


# ---------------------------------------------------------------------------
# deterministic JSON writer

def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError("cannot serialize a non-finite number")
    return "%.17g" % x


def dumps(obj, indent: int = 0) -> str:
    """Render ``obj`` as JSON with fixed float formatting and field order."""
    pad = " " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(str(k))}: {dumps(v, indent + 2)}'
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        parts = [dumps(v, indent) for v in obj]
        flat = "[" + ", ".join(parts) + "]"
        return flat
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# ---------------------------------------------------------------------------
# values

def complex_to_pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def pair_to_complex(v) -> complex:
    if not (isinstance(v, (list, tuple)) and len(v) == 2
            and all(isinstance(x, (int, float)) for x in v)):
        raise ParseError(f"expected a [re, im] pair, got {v!r}")
    return complex(float(v[0]), float(v[1]))


def matrix_to_json(M) -> list:
    M = as_matrix(M)
    return [[complex_to_pair(z) for z in row] for row in M]


def json_to_matrix(v) -> np.ndarray:
    if not isinstance(v, list) or not v or not all(isinstance(r, list) for r in v):
        raise ParseError(f"expected a nested matrix, got {type(v).__name__}")
    try:
        return np.array([[pair_to_complex(z) for z in row] for row in v],
                        dtype=complex)
    except ValueError as exc:
        raise ParseError(f"ragged or malformed matrix: {exc}") from exc


def complex_str(z) -> str:
    z = complex(z)
    return f"{format_float(z.real)}{'+' if z.imag >= 0 else '-'}{format_float(abs(z.imag))}i"


def matrix_csv(M) -> str:
    """RFC 4180 rows of ``re+imi`` strings (CRLF line ends)."""
    M = as_matrix(M)
    lines = [",".join(complex_str(z) for z in row) for row in M]
    return "\r\n".join(lines) + "\r\n"


# ---------------------------------------------------------------------------
# schema helpers

def _require_keys(d: dict, required: tuple, optional: tuple = ()) -> None:
    if not isinstance(d, dict):
        raise ParseError("expected a JSON object")
    missing = [k for k in required if k not in d]
    unknown = [k for k in d if k not in required + optional]
    if missing:
        raise ParseError(f"missing fields: {missing}")
    if unknown:
        raise ParseError(f"unknown fields: {unknown}")


def load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# schemas

def grid_to_json(grid: DafGrid) -> dict:
    values = [[matrix_to_json(grid.values[m, n]) for n in range(grid.N + 1)]
              for m in range(grid.M + 1)]
    return {"p": grid.p, "q": grid.q, "M": grid.M, "N": grid.N,
            "values": values}


def grid_from_json(d: dict) -> DafGrid:
    _require_keys(d, ("p", "q", "M", "N", "values"))
    p, q, M, N = (int(d[k]) for k in ("p", "q", "M", "N"))
    vals = d["values"]
    if not isinstance(vals, list) or len(vals) != M + 1:
        raise ParseError(f"values must hold {M + 1} rows")
    v = np.zeros((M + 1, N + 1, p, q), dtype=complex)
    for m, rowlist in enumerate(vals):
        if not isinstance(rowlist, list) or len(rowlist) != N + 1:
            raise ParseError(f"row {m} must hold {N + 1} blocks")
        for n, blk in enumerate(rowlist):
            b = json_to_matrix(blk)
            if b.shape != (p, q):
                raise ParseError(f"block ({m},{n}) has shape {b.shape}")
            v[m, n] = b
    return DafGrid(v)


def measure_from_json(d: dict) -> AtomicMeasure:
    _require_keys(d, ("p", "atoms"))
    if not isinstance(d["atoms"], list):
        raise ParseError("atoms must be a list")
    atoms = []
    for a in d["atoms"]:
        _require_keys(a, ("theta", "weight"))
        atoms.append((float(a["theta"]), json_to_matrix(a["weight"])))
    return AtomicMeasure(int(d["p"]), atoms)


def measure_to_json(mu: AtomicMeasure) -> dict:
    return {"p": mu.p, "atoms": [{"theta": float(t), "weight": matrix_to_json(W)}
                                 for t, W in mu.atoms]}


def moments_from_json(d: dict) -> np.ndarray:
    _require_keys(d, ("p", "moments"))
    if not isinstance(d["moments"], list) or not d["moments"]:
        raise ParseError("moments must be a non-empty list")
    blocks = [json_to_matrix(m) for m in d["moments"]]
    p = int(d["p"])
    if any(b.shape != (p, p) for b in blocks):
        raise ParseError(f"moment blocks must be {p} x {p}")
    return np.stack(blocks)


def realization_from_json(d: dict) -> StateSpace:
    _require_keys(d, ("A", "B", "C", "D"), ("center", "H"))
    center = d.get("center", "inf")
    if center not in ("inf", "zero"):
        raise ParseError(f"center must be 'inf' or 'zero', got {center!r}")
    return StateSpace(json_to_matrix(d["A"]), json_to_matrix(d["B"]),
                      json_to_matrix(d["C"]), json_to_matrix(d["D"]), center)


def realization_to_json(S: StateSpace) -> dict:
    return {"A": matrix_to_json(S.A), "B": matrix_to_json(S.B),
            "C": matrix_to_json(S.C), "D": matrix_to_json(S.D),
            "center": S.center}


def metric_from_json(d: dict) -> np.ndarray | None:
    return json_to_matrix(d["H"]) if "H" in d else None


def factor_from_json(d: dict) -> SpectralFactor:
    _require_keys(d, ("a", "b", "c", "d"))
    return SpectralFactor(json_to_matrix(d["a"]), json_to_matrix(d["b"]),
                          json_to_matrix(d["c"]), json_to_matrix(d["d"]))


def boundary_from_json(d: dict) -> tuple[list, list]:
    _require_keys(d, ("row", "col"))
    if not isinstance(d["row"], list) or not isinstance(d["col"], list):
        raise ParseError("row and col must be lists of matrices")
    row = [json_to_matrix(b) for b in d["row"]]
    col = [json_to_matrix(b) for b in d["col"]]
    return row, col


_SOURCES = {
    "boundary": ("row", "col"),
    "measure": ("p", "atoms"),
    "factor": ("a", "b", "c", "d"),
    "grid": ("p", "q", "M", "N", "values"),
    "moments": ("p", "moments"),
    "realization": ("A", "B", "C", "D"),
}


def detect_source(d: dict, allowed: tuple) -> str:
    """Decide which of the ``allowed`` schemas the object carries.

    Exactly one schema must match the key set; otherwise
    :class:`AmbiguousSource`.
    """
    if not isinstance(d, dict):
        raise ParseError("expected a JSON object")
    keys = set(d.keys())
    hits = [name for name in allowed
            if set(_SOURCES[name]) <= keys and keys <= set(_SOURCES[name]) | {"center", "H"}]
    if len(hits) != 1:
        raise AmbiguousSource(
            f"input matches {hits or 'none'} of the schemas {list(allowed)}")
    return hits[0]
