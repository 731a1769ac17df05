"""JSON and CSV formats for point sets, matrices and emitted artifacts.

Floats are written with ``repr`` (shortest string that round-trips to the
same double), so every artifact reloads bit-for-bit.
"""

import csv
import hashlib
import json
import math

import numpy as np

from .lift import DirectionSet, SpectrahedralLift
from .mvee import JohnDecomposition
from .psdrank import PsdFactorization


class InputError(ValueError):
    """Malformed input file; the message names the offending part."""


def digest_bytes(data):
    return "sha256:" + hashlib.sha256(data).hexdigest()


def digest_file(path):
    with open(path, "rb") as fh:
        return digest_bytes(fh.read())


def _number(x, where):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InputError(f"{where}: expected a number, got {x!r}")
    if not math.isfinite(x):
        raise InputError(f"{where}: non-finite value {x!r}")
    return x


def _rows(data, where, width=None):
    if not isinstance(data, list):
        raise InputError(f"{where}: expected a list of rows")
    out = []
    for i, row in enumerate(data):
        if not isinstance(row, list):
            raise InputError(f"{where} row {i}: expected a list")
        if width is not None and len(row) != width:
            raise InputError(f"{where} row {i}: has {len(row)} entries, expected {width}")
        out.append([_number(x, f"{where} row {i}") for x in row])
    return out


def points_from_obj(obj):
    """``{"dim", "integer", "points"}`` -> (array, integer flag)."""
    if not isinstance(obj, dict) or "points" not in obj:
        raise InputError('point set must be an object with a "points" array')
    dim = obj.get("dim")
    rows = _rows(obj["points"], "points", dim)
    if not rows:
        raise InputError("empty point set")
    if dim is None:
        dim = len(rows[0])
        rows = _rows(obj["points"], "points", dim)
    integer = all(float(x).is_integer() for row in rows for x in row)
    if obj.get("integer") and not integer:
        bad = next(i for i, row in enumerate(rows) if not all(float(x).is_integer() for x in row))
        raise InputError(f"points row {bad}: marked integer but has a fractional coordinate")
    dtype = np.int64 if integer else np.float64
    return np.array(rows, dtype=dtype).reshape(len(rows), dim), integer


def points_to_obj(P):
    P = np.asarray(P)
    integer = bool(np.issubdtype(P.dtype, np.integer)) or bool(np.all(P == np.round(P)))
    data = P.astype(np.int64).tolist() if integer else P.astype(np.float64).tolist()
    return {"dim": int(P.shape[1]), "integer": integer, "points": data}


def read_points_csv(text):
    rows = []
    for i, rec in enumerate(csv.reader(text.splitlines())):
        if not rec or all(not f.strip() for f in rec):
            continue
        try:
            vals = [float(f) for f in rec]
        except ValueError:
            raise InputError(f"points row {i}: cannot parse {rec!r}") from None
        rows.append(vals)
    return points_from_obj({"points": rows})


def load_points(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    text = raw.decode("utf-8")
    if path.lower().endswith(".csv"):
        P, integer = read_points_csv(text)
    else:
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"not valid JSON: {exc}") from None
        P, integer = points_from_obj(obj)
    return P, integer, digest_bytes(raw)


def matrix_from_obj(obj):
    if not isinstance(obj, dict) or "data" not in obj:
        raise InputError('matrix must be an object with "rows", "cols" and "data"')
    rows, cols = obj.get("rows"), obj.get("cols")
    data = _rows(obj["data"], "data", cols)
    if rows is not None and len(data) != rows:
        raise InputError(f"data has {len(data)} rows, expected {rows}")
    if not data:
        raise InputError("empty matrix")
    return np.array(data, dtype=np.float64)


def matrix_to_obj(A):
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    return {"rows": int(A.shape[0]), "cols": int(A.shape[1]), "data": A.tolist()}


def load_matrix(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        obj = json.loads(raw.decode("utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"not valid JSON: {exc}") from None
    return matrix_from_obj(obj), digest_bytes(raw)


def _array(x, ndim, where, dtype=np.float64):
    try:
        a = np.array(x, dtype=dtype)
    except (TypeError, ValueError):
        raise InputError(f"{where}: not a numeric array") from None
    if a.ndim != ndim:
        raise InputError(f"{where}: expected a {ndim}-d array")
    return a


def _entry_to_obj(e):
    e = np.asarray(e, dtype=np.float64)
    return {"rank1": e.tolist()} if e.ndim == 1 else {"full": e.tolist()}


def _entry_from_obj(obj, where):
    if isinstance(obj, dict) and "rank1" in obj:
        return _array(obj["rank1"], 1, where)
    if isinstance(obj, dict) and "full" in obj:
        return _array(obj["full"], 2, where)
    raise InputError(f'{where}: expected {{"rank1": ...}} or {{"full": ...}}')


def factorization_to_obj(F):
    return {
        "r": int(F.r),
        "left": [_entry_to_obj(e) for e in F.left],
        "right": [_entry_to_obj(e) for e in F.right],
    }


def factorization_from_obj(obj):
    try:
        r = int(obj["r"])
        left = tuple(_entry_from_obj(e, f"left[{i}]") for i, e in enumerate(obj["left"]))
        right = tuple(_entry_from_obj(e, f"right[{j}]") for j, e in enumerate(obj["right"]))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed factorization: {exc}") from None
    return PsdFactorization(r, left, right)


def directions_to_obj(dirs):
    return {
        "k": int(dirs.k),
        "radius": None if dirs.radius is None else int(dirs.radius),
        "v": dirs.v.tolist(),
        "m": dirs.m.tolist(),
        "width": dirs.width.tolist(),
    }


def directions_from_obj(obj):
    d = len(obj["v"][0]) if obj["v"] else 0
    v = np.array(obj["v"], dtype=np.int64).reshape(len(obj["v"]), d)
    return DirectionSet(
        int(obj["k"]),
        v,
        np.array(obj["m"], dtype=np.int64),
        np.array(obj["width"], dtype=np.int64),
        obj.get("radius"),
    )


def basis_from_obj(obj):
    try:
        return np.array(obj["data"], dtype=np.float64).reshape(obj["rows"], obj["cols"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed basis: {exc}") from None


def lift_to_obj(lift):
    F = lift.factorization
    return {
        "d": int(lift.d),
        "k": int(lift.k),
        "r": int(lift.r),
        "constraints": [
            {"v_hat": vh.tolist(), "V": _entry_to_obj(Vj)} for vh, Vj in zip(lift.v_hat, F.right)
        ],
        "certificates": [
            {"u_hat": uh.tolist(), "U": _entry_to_obj(Ui)} for uh, Ui in zip(lift.u_hat, F.left)
        ],
        "span_basis": matrix_to_obj(lift.span_basis),
        "perp_basis": matrix_to_obj(lift.perp_basis),
    }


def lift_from_obj(obj):
    try:
        d, k, r = int(obj["d"]), int(obj["k"]), int(obj["r"])
        cons, certs = obj["constraints"], obj["certificates"]
        v_hat = np.array([c["v_hat"] for c in cons], dtype=np.int64).reshape(len(cons), d + 1)
        u_hat = np.array([c["u_hat"] for c in certs], dtype=np.int64).reshape(len(certs), d + 1)
        V = tuple(_entry_from_obj(c["V"], f"constraint {j}") for j, c in enumerate(cons))
        U = tuple(_entry_from_obj(c["U"], f"certificate {i}") for i, c in enumerate(certs))
        span = basis_from_obj(obj["span_basis"])
        perp = basis_from_obj(obj["perp_basis"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed lift: {exc}") from None
    return SpectrahedralLift(d, k, r, v_hat, V, u_hat, U, span, perp)


def john_to_obj(john):
    return {
        "indices": np.asarray(john.indices).tolist(),
        "weights": np.asarray(john.weights, dtype=np.float64).tolist(),
        "frame": np.asarray(john.frame, dtype=np.float64).tolist(),
        "residual": float(john.residual),
    }


def john_from_obj(obj):
    idx = np.array(obj["indices"], dtype=np.int64)
    w = np.array(obj["weights"], dtype=np.float64)
    F = np.atleast_2d(np.array(obj["frame"], dtype=np.float64))
    return JohnDecomposition(idx, w, F, float(obj.get("residual", 0.0)))


def _clean(x):
    """Turn numpy scalars and arrays into plain JSON values; inf/nan become strings."""
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        f = float(x)
        return f if math.isfinite(f) else repr(f)
    return x


def dumps(obj):
    return json.dumps(_clean(obj), indent=1, sort_keys=True) + "\n"


def write_json(obj, path):
    text = dumps(obj)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text


def read_json(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        return json.loads(raw.decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputError(f"not valid JSON: {exc}") from None
