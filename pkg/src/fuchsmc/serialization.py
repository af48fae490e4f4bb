"""JSON file formats and the operation-log entries.

Residue-tuple file:   {"poles": [...], "matrices": [[[...], ...], ...],
                       "scheme": {...}?}
Normal-form file:     {"blocks": [...], "poles": [...], "A": [[...], ...],
                       "scheme": {...}?}
Scheme object:        {"points": ["inf", ...], "columns":
                       [[{"value": ..., "mult": k}, ...], ...]}

All scalars are strings in the canonical grammar.  Operation logs are JSON
objects, one per line, replayable through apply_operation.
"""

from __future__ import annotations

import json
from typing import Any

from .errors import ParseError
from .katz import (
    addition,
    append_infinity_pole,
    drop_trailing_zero_pole,
    middle_convolution,
    permute,
    swap_with_infinity,
)
from .linalg import ExactMatrix
from .okubo import OkuboSystem, euler_transform, onf_from_scf, scf_from_onf
from .scalars import format_scalar, parse_scalar
from .schlesinger import SchlesingerTuple
from .spectral import RiemannScheme
from .yokoyama import ExtensionParams, RestrictionParams, extend_direct, restrict


def matrix_to_json(m: ExactMatrix) -> list[list[str]]:
    return [[format_scalar(x) for x in row] for row in m.rows]


def matrix_from_json(data) -> ExactMatrix:
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise ParseError("matrix must be a non-empty list of rows")
    return ExactMatrix.from_rows([[parse_scalar(x) for x in row] for row in data])


def scheme_to_json(s: RiemannScheme) -> dict:
    return {
        "points": ["inf"] + [format_scalar(t) for t in s.poles],
        "columns": [
            [{"value": format_scalar(l), "mult": m} for l, m in col]
            for col in s.columns
        ],
    }


def scheme_from_json(data) -> RiemannScheme:
    try:
        points = data["points"]
        columns = data["columns"]
    except (TypeError, KeyError) as exc:
        raise ParseError("scheme needs points and columns") from exc
    if not points or points[0] != "inf":
        raise ParseError('scheme points must start with "inf"')
    poles = [parse_scalar(t) for t in points[1:]]
    cols = []
    for col in columns:
        cols.append([(parse_scalar(e["value"]), int(e["mult"])) for e in col])
    return RiemannScheme(poles, cols)


def scf_to_json(t: SchlesingerTuple) -> dict:
    out: dict[str, Any] = {
        "poles": [format_scalar(x) for x in t.poles],
        "matrices": [matrix_to_json(m) for m in t.matrices],
    }
    if t.scheme is not None:
        out["scheme"] = scheme_to_json(t.scheme)
    return out


def scf_from_json(data) -> SchlesingerTuple:
    try:
        poles = [parse_scalar(x) for x in data["poles"]]
        mats = [matrix_from_json(m) for m in data["matrices"]]
    except (TypeError, KeyError) as exc:
        raise ParseError("residue-tuple file needs poles and matrices") from exc
    scheme = scheme_from_json(data["scheme"]) if "scheme" in data else None
    return SchlesingerTuple(poles, mats, scheme)


def onf_to_json(o: OkuboSystem) -> dict:
    out: dict[str, Any] = {
        "blocks": list(o.block_sizes),
        "poles": [format_scalar(x) for x in o.poles],
        "A": matrix_to_json(o.a),
    }
    if o.scheme is not None:
        out["scheme"] = scheme_to_json(o.scheme)
    return out


def onf_from_json(data) -> OkuboSystem:
    try:
        blocks = [int(b) for b in data["blocks"]]
        poles = [parse_scalar(x) for x in data["poles"]]
        a = matrix_from_json(data["A"])
    except (TypeError, KeyError) as exc:
        raise ParseError("normal-form file needs blocks, poles and A") from exc
    scheme = scheme_from_json(data["scheme"]) if "scheme" in data else None
    return OkuboSystem(blocks, poles, a, scheme)


def system_from_json(data):
    """Either file format, detected by its keys."""
    if isinstance(data, dict) and "matrices" in data:
        return scf_from_json(data)
    if isinstance(data, dict) and "A" in data:
        return onf_from_json(data)
    raise ParseError("unrecognized system file (expected matrices or A)")


def system_to_json(system) -> dict:
    if isinstance(system, SchlesingerTuple):
        return scf_to_json(system)
    return onf_to_json(system)


def load_system(path: str):
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    return system_from_json(data)


def save_system(path: str, system) -> None:
    with open(path, "w") as fh:
        json.dump(system_to_json(system), fh, indent=1)
        fh.write("\n")


# -- operation log ----------------------------------------------------------------


def parse_operations(text: str) -> list[dict]:
    """One JSON object per non-empty line."""
    ops = []
    for k, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            entry = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"operation line {k}: {exc}") from exc
        if not isinstance(entry, dict) or "op" not in entry:
            raise ParseError(f'operation line {k}: expected an object with "op"')
        ops.append(entry)
    return ops


def format_operation(entry: dict) -> str:
    return json.dumps(entry, sort_keys=True)


def apply_operation(system, entry: dict):
    """Apply one log entry; converts between the two shapes as needed.

    Tuple-level entries (mc, add, swapinf, perm, dropzero) run on the residue
    tuple; normal-form entries (extend, restrict, euler) convert the state
    first when necessary.
    """
    op = entry.get("op")
    if op in ("mc", "add", "swapinf", "perm", "appendpole", "dropzero"):
        t = scf_from_onf(system) if isinstance(system, OkuboSystem) else system
        if op == "mc":
            return middle_convolution(t, parse_scalar(str(entry["lambda"])))
        if op == "add":
            return addition(t, [parse_scalar(str(x)) for x in entry["mu"]])
        if op == "swapinf":
            return swap_with_infinity(t, int(entry["j"]))
        if op == "perm":
            return permute(t, [int(x) for x in entry["sigma"]])
        if op == "appendpole":
            return append_infinity_pole(t, parse_scalar(str(entry["t"])))
        return drop_trailing_zero_pole(t)
    if op in ("extend", "restrict", "euler", "convert"):
        o = onf_from_scf(system) if isinstance(system, SchlesingerTuple) else system
        if op == "extend":
            params = ExtensionParams(
                parse_scalar(str(entry["rho1"])),
                parse_scalar(str(entry["rho2"])),
                parse_scalar(str(entry["t"])),
            )
            return extend_direct(o, params)
        if op == "restrict":
            return restrict(o, _restriction_params(o, entry))
        if op == "euler":
            return euler_transform(o, parse_scalar(str(entry["lambda"])))
        return o
    raise ParseError(f"unknown operation {op!r}")


def _restriction_params(o: OkuboSystem, entry: dict) -> RestrictionParams:
    from .errors import NotQ2Error

    j = int(entry["j"])
    if "mu1" in entry and "mu2" in entry:
        return RestrictionParams(
            parse_scalar(str(entry["mu1"])), parse_scalar(str(entry["mu2"])), j
        )
    if o.scheme is None:
        raise NotQ2Error(
            "restriction needs mu1/mu2 explicitly or a declared scheme to read them from"
        )
    inf_col = o.scheme.column_at_infinity()
    if len(inf_col) != 2:
        raise NotQ2Error("infinity column must consist of exactly two parts")
    (l1, _), (l2, _) = inf_col
    return RestrictionParams(-l1, -l2, j)
