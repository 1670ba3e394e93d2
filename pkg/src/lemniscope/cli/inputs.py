"""Reading rational maps from JSON.

Accepted shapes::

    {"p": {"coeffs": [[re, im], ...]}, "q": {"roots": [[re, im], ...], "leading": [re, im]}}
    {"coeffs": [[re, im], ...]}          # p only, q = 1
    {"roots": [...], "leading": ...}     # p only, q = 1

Coefficients are in ascending degree.  A bare number stands for a real value.
"""

from __future__ import annotations

import json
import sys

from ..polyfield import Polynomial, _parse_complex
from ..qdmodel import ModelError, RationalMap


class InputError(ValueError):
    pass


def parse_polynomial(obj, name: str = "p") -> Polynomial:
    try:
        if isinstance(obj, list):
            return Polynomial.from_json(obj)
        if not isinstance(obj, dict):
            raise InputError(f"{name}: expected an object with 'coeffs' or 'roots'")
        if "coeffs" in obj:
            return Polynomial.from_json(obj["coeffs"])
        if "roots" in obj:
            lead = _parse_complex(obj.get("leading", 1.0))
            return Polynomial.from_roots([_parse_complex(v) for v in obj["roots"]], lead)
    except ValueError as exc:
        raise InputError(f"{name}: {exc}") from exc
    raise InputError(f"{name}: expected 'coeffs' or 'roots'")


def parse_map(data) -> RationalMap:
    if not isinstance(data, dict):
        raise InputError("input must be a JSON object")
    if "p" in data:
        p = parse_polynomial(data["p"], "p")
        q = parse_polynomial(data["q"], "q") if data.get("q") is not None else Polynomial((1.0,))
    else:
        p, q = parse_polynomial(data, "p"), Polynomial((1.0,))
    try:
        return RationalMap(p, q)
    except ModelError as exc:
        raise InputError(str(exc)) from exc


def load(path: str) -> tuple[dict, RationalMap]:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        data = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read input {path!r}: {exc}") from exc
    return data, parse_map(data)
