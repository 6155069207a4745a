"""JSON schemas for arrangements, systems, tuples and characters.

All files carry ``"schema": 1`` (optional on input, always emitted);
unknown fields are rejected.  Rationals travel as strings so no float ever
contaminates the exact data.
"""

from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from .arrangement import Arrangement, Hyperplane, LineDirection
from .errors import InputError
from .katz import CharacterValue, MonodromyTuple
from .linalg import Matrix, frac
from .pfaffian import ConvolutionParameter, PfaffianSystem

SCHEMA = 1


def rational_str(x: Fraction) -> str:
    return str(x)


def _check_fields(obj: dict, required, optional=()):
    if not isinstance(obj, dict):
        raise InputError("expected a JSON object")
    allowed = set(required) | set(optional) | {"schema"}
    unknown = set(obj) - allowed
    if unknown:
        raise InputError(f"unknown fields: {sorted(unknown)}")
    missing = set(required) - set(obj)
    if missing:
        raise InputError(f"missing fields: {sorted(missing)}")
    if obj.get("schema", SCHEMA) != SCHEMA:
        raise InputError(f"unsupported schema version {obj.get('schema')}")


def _parse_rational(x) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise InputError(f"rationals must be strings or integers, got {x!r}")
    try:
        return frac(x)
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad rational {x!r}") from exc


def arrangement_to_json(arr: Arrangement) -> dict:
    return {
        "schema": SCHEMA,
        "dim": arr.ambient_dim,
        "hyperplanes": [
            {
                "label": h.label,
                "coeffs": [rational_str(c) for c in h.coeffs],
                "constant": rational_str(h.constant),
            }
            for h in arr.hyperplanes
        ],
    }


def arrangement_from_json(obj: dict) -> Arrangement:
    _check_fields(obj, ("dim", "hyperplanes"))
    if not isinstance(obj["dim"], int) or obj["dim"] < 1:
        raise InputError("dim must be a positive integer")
    hs = []
    for entry in obj["hyperplanes"]:
        _check_fields(entry, ("label", "coeffs", "constant"))
        hs.append(
            Hyperplane.make(
                [_parse_rational(c) for c in entry["coeffs"]],
                _parse_rational(entry["constant"]),
                str(entry["label"]),
            )
        )
    return Arrangement.make(obj["dim"], hs)


def line_to_json(y: LineDirection) -> dict:
    return {"schema": SCHEMA, "direction": [rational_str(c) for c in y.direction]}


def line_from_json(obj: dict) -> LineDirection:
    _check_fields(obj, ("direction",))
    return LineDirection.make([_parse_rational(c) for c in obj["direction"]])


def _matrix_to_json(m: Matrix) -> list:
    return [[rational_str(x) for x in row] for row in m]


def _matrix_from_json(rows, d: int) -> Matrix:
    out = tuple(tuple(_parse_rational(x) for x in row) for row in rows)
    if len(out) != d or any(len(r) != d for r in out):
        raise InputError(f"residue matrix is not {d} x {d}")
    return out


def system_to_json(sys: PfaffianSystem) -> dict:
    return {
        "schema": SCHEMA,
        "arrangement": arrangement_to_json(sys.arrangement),
        "dimE": sys.dim_e,
        "residues": {
            lbl: _matrix_to_json(m) for lbl, m in sorted(sys.residues.items())
        },
    }


def system_from_json(obj: dict, check: bool = True) -> PfaffianSystem:
    _check_fields(obj, ("arrangement", "dimE", "residues"))
    arr = arrangement_from_json(obj["arrangement"])
    d = obj["dimE"]
    if not isinstance(d, int) or d < 0:
        raise InputError("dimE must be a nonnegative integer")
    residues = {
        str(lbl): _matrix_from_json(rows, d) for lbl, rows in obj["residues"].items()
    }
    return PfaffianSystem.make(arr, d, residues, check=check)


def tuple_to_json(t: MonodromyTuple) -> dict:
    out: dict = {"schema": SCHEMA, "rank": t.rank, "exact": t.exact}
    if t.exact:
        out["matrices"] = [_matrix_to_json(m) for m in t.matrices]
    else:
        out["matrices"] = [
            [[[float(x.real), float(x.imag)] for x in row] for row in np.asarray(m)]
            for m in t.matrices
        ]
    if t.labels:
        out["labels"] = list(t.labels)
    return out


def tuple_from_json(obj: dict) -> MonodromyTuple:
    _check_fields(obj, ("rank", "matrices"), optional=("exact", "labels"))
    rank = obj["rank"]
    if not isinstance(rank, int) or rank < 0:
        raise InputError("rank must be a nonnegative integer")
    labels = obj.get("labels")
    if obj.get("exact", False):
        mats = [_matrix_from_json(rows, rank) for rows in obj["matrices"]]
        return MonodromyTuple.exact_tuple(mats, labels)
    mats = []
    for rows in obj["matrices"]:
        if len(rows) != rank or any(len(r) != rank for r in rows):
            raise InputError(f"tuple matrix is not {rank} x {rank}")
        mats.append(
            np.array(
                [[complex(e[0], e[1]) for e in row] for row in rows], dtype=complex
            ).reshape(rank, rank)
        )
    return MonodromyTuple.numeric(mats, labels)


def character_from_json(obj: dict) -> CharacterValue:
    _check_fields(obj, (), optional=("lambda", "scalar"))
    has_lambda = "lambda" in obj
    has_scalar = "scalar" in obj
    if has_lambda == has_scalar:
        raise InputError("character needs exactly one of 'lambda' or 'scalar'")
    if has_lambda:
        return CharacterValue.from_exponent(_parse_rational(obj["lambda"]))
    return CharacterValue.from_scalar(_parse_rational(obj["scalar"]))


def character_to_json(c: CharacterValue) -> dict:
    if c.scalar is not None:
        return {"schema": SCHEMA, "scalar": rational_str(c.scalar)}
    return {"schema": SCHEMA, "lambda": rational_str(c.exponent)}


def parameter_from_string(s: str) -> ConvolutionParameter:
    return ConvolutionParameter.make(_parse_rational(s))


def dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def load_path(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise InputError(f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {path}: {exc}") from exc
