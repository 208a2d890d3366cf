"""JSON forms of the package's value types.

Rationals travel as strings ``"p/q"``, complex doubles as ``{"re": .., "im": ..}``.
Plain JSON integers parse as rationals and plain floats as complex doubles.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .exterior import Frame, PluckerVector
from .kp_flow import Generator
from .scalars import exact_array, complex_array, format_rational, is_exact_scalar
from .special import CMData, SolitonData


class InputError(ValueError):
    """Malformed or inconsistent JSON input."""


def load_json(source: str):
    """Parse ``source`` as inline JSON, or read it as a file path."""
    text = source.strip()
    if not text.startswith(("{", "[")):
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {source!r}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {source!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------


def scalar_to_json(x):
    if isinstance(x, Fraction) or is_exact_scalar(x):
        return format_rational(Fraction(x))
    c = complex(x)
    return {"re": c.real, "im": c.imag}


def scalar_from_json(obj):
    if isinstance(obj, bool):
        raise InputError("booleans are not scalars")
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, float):
        return complex(obj)
    if isinstance(obj, str):
        try:
            return Fraction(obj.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad rational {obj!r}") from exc
    if isinstance(obj, dict) and "re" in obj:
        return complex(float(obj["re"]), float(obj.get("im", 0.0)))
    if isinstance(obj, dict) and "rat" in obj:
        return scalar_from_json(obj["rat"])
    raise InputError(f"cannot parse scalar {obj!r}")


def matrix_from_json(rows, exact: bool | None = None) -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise InputError("a matrix must be a non-empty list of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise InputError("matrix rows have different lengths")
    vals = [[scalar_from_json(v) for v in r] for r in rows]
    if exact is None:
        exact = all(isinstance(v, Fraction) for r in vals for v in r)
    if exact:
        if not all(isinstance(v, Fraction) for r in vals for v in r):
            raise InputError("exact mode requested but the matrix has float entries")
        return exact_array(vals)
    return complex_array(vals)


def matrix_to_json(m: np.ndarray) -> list:
    return [[scalar_to_json(v) for v in row] for row in m]


def _vector_from_json(values, exact: bool | None) -> list:
    if not isinstance(values, list):
        raise InputError("expected a list of scalars")
    vals = [scalar_from_json(v) for v in values]
    if exact is None:
        exact = all(isinstance(v, Fraction) for v in vals)
    if exact:
        if not all(isinstance(v, Fraction) for v in vals):
            raise InputError("exact mode requested but the input has float entries")
        return vals
    return [complex(v) for v in vals]


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------


def plucker_to_json(pv: PluckerVector) -> dict:
    coords = []
    for key, v in pv.coords.items():
        if pv.exact:
            coords.append({"index": list(key), "rat": format_rational(v)})
        else:
            coords.append({"index": list(key), "re": v.real, "im": v.imag})
    return {"k": pv.k, "n": pv.n, "coords": coords}


def plucker_from_json(obj, exact: bool | None = None) -> PluckerVector:
    try:
        k, n = int(obj["k"]), int(obj["n"])
        raw = obj["coords"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError("a Plücker vector needs k, n and coords") from exc
    coords = {}
    for entry in raw:
        key = tuple(int(i) for i in entry["index"])
        coords[key] = scalar_from_json(entry["rat"] if "rat" in entry else entry)
    if exact is None:
        exact = all(isinstance(v, Fraction) for v in coords.values())
    if not exact:
        coords = {key: complex(v) for key, v in coords.items()}
    elif not all(isinstance(v, Fraction) for v in coords.values()):
        raise InputError("exact mode requested but the point has float coordinates")
    try:
        return PluckerVector(k, n, coords)
    except (ValueError, KeyError) as exc:
        raise InputError(str(exc)) from exc


def frame_to_json(frame: Frame) -> dict:
    return {"k": frame.k, "n": frame.n, "matrix": matrix_to_json(frame.matrix)}


def frame_from_json(obj, exact: bool | None = None) -> Frame:
    try:
        m = matrix_from_json(obj["matrix"], exact)
    except (KeyError, TypeError) as exc:
        raise InputError("a frame needs a matrix") from exc
    if "n" in obj and int(obj["n"]) != m.shape[0] or "k" in obj and int(obj["k"]) != m.shape[1]:
        raise InputError(f"declared size does not match the {m.shape[0]}x{m.shape[1]} matrix")
    return Frame(m)


def generator_to_json(g: Generator) -> dict:
    return {"n": g.n, "split": g.split, "matrix": matrix_to_json(g.matrix)}


def generator_from_json(obj, exact: bool | None = None) -> Generator:
    if isinstance(obj, dict) and obj.get("shift"):
        try:
            g = Generator.shift(int(obj["n"]), int(obj["split"]))
        except (KeyError, ValueError) as exc:
            raise InputError(f"bad shift generator: {exc}") from exc
        return g if exact is not False else g.as_complex()
    try:
        m = matrix_from_json(obj["matrix"], exact)
        split = int(obj["split"])
    except (KeyError, TypeError) as exc:
        raise InputError("a generator needs split and matrix") from exc
    if "n" in obj and int(obj["n"]) != m.shape[0]:
        raise InputError(f"declared n={obj['n']} but the matrix is {m.shape[0]}x{m.shape[1]}")
    try:
        return Generator(m, split)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def soliton_from_json(obj) -> SolitonData:
    try:
        parts = [_vector_from_json(obj[name], False) for name in ("mu", "lambda", "alpha", "beta")]
    except (KeyError, TypeError) as exc:
        raise InputError("soliton data needs mu, lambda, alpha and beta") from exc
    try:
        return SolitonData(*parts)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def soliton_to_json(d: SolitonData) -> dict:
    return {
        name: [scalar_to_json(v) for v in getattr(d, attr)]
        for name, attr in (("mu", "mu"), ("lambda", "lam"), ("alpha", "alpha"), ("beta", "beta"))
    }


def cm_from_json(obj, exact: bool | None = None) -> CMData:
    try:
        x, z = matrix_from_json(obj["X"], exact), matrix_from_json(obj["Z"], exact)
    except (KeyError, TypeError) as exc:
        raise InputError("Calogero-Moser data needs X and Z") from exc
    try:
        return CMData(x, z)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cm_to_json(d: CMData) -> dict:
    return {"X": matrix_to_json(d.x), "Z": matrix_to_json(d.z)}


def times_from_json(values, exact: bool | None = None) -> list:
    return _vector_from_json(values, exact)


def dumps_line(record: dict) -> str:
    """One report line: compact, key order as given, stable float repr."""
    return json.dumps(record, separators=(",", ":"), allow_nan=True)
