"""JSON (de)serialization of the engine's data types.

Schemas (all rationals as "p/q" strings, cyclotomic elements as coefficient
vectors over the power basis):

  monomial    {"m": int, "coeff": [str...], "uexp": int}
  param       {"m": int, "rank": int, "A": [[int]], "S": [[int]]}
  point       [monomial...]
  heis        {"c": monomial, "x": point, "h_l": [int]}
  multiplier  {"param": param, "B_rank": int, "images": [heis],
               "sqrt": [[monomial]] | null}
  smallelem   {"c": monomial, "xi": point, "gamma": [int]}
"""

from __future__ import annotations

import json

from .heisenberg import HeisElement
from .intlinalg import Lattice, mat
from .multiplier import Multiplier
from .scalars import CycloField, UnitMonomial, monomial_from_json, monomial_to_json
from .torus import QuantParam, TorusPoint


def param_to_json(p: QuantParam) -> dict:
    return {
        "m": p.field.order,
        "rank": p.rank,
        "A": [list(r) for r in p.A],
        "S": [list(r) for r in p.S],
    }


def param_from_json(data: dict) -> QuantParam:
    field = CycloField(data["m"])
    return QuantParam(field, Lattice(data["rank"]), mat(data["A"]), mat(data["S"]))


def point_to_json(x: TorusPoint) -> list:
    return [monomial_to_json(v) for v in x.values]


def point_from_json(data: list) -> TorusPoint:
    return TorusPoint(tuple(monomial_from_json(v) for v in data))


def heis_to_json(e: HeisElement) -> dict:
    return {
        "c": monomial_to_json(e.c),
        "x": point_to_json(e.x),
        "h_l": list(e.h_l),
    }


def heis_from_json(data: dict, param: QuantParam) -> HeisElement:
    return HeisElement(
        param,
        monomial_from_json(data["c"]),
        point_from_json(data["x"]),
        tuple(data["h_l"]),
    )


def multiplier_to_json(L: Multiplier) -> dict:
    return {
        "param": param_to_json(L.param),
        "B_rank": L.rank,
        "images": [heis_to_json(img) for img in L.images],
        "sqrt": None
        if L.sqrt_pairing is None
        else [[monomial_to_json(u) for u in row] for row in L.sqrt_pairing],
    }


def multiplier_from_json(data: dict) -> Multiplier:
    param = param_from_json(data["param"])
    images = [heis_from_json(i, param) for i in data["images"]]
    sqrt = data.get("sqrt")
    if sqrt is not None:
        sqrt = [[monomial_from_json(u) for u in row] for row in sqrt]
    return Multiplier(param, images, sqrt)


def smallelem_to_json(c: UnitMonomial, xi: TorusPoint, gamma) -> dict:
    return {"c": monomial_to_json(c), "xi": point_to_json(xi), "gamma": list(gamma)}


def smallelem_from_json(data: dict):
    from .smallheis import SmallHeisElement

    return SmallHeisElement(
        monomial_from_json(data["c"]),
        point_from_json(data["xi"]),
        tuple(data["gamma"]),
    )


def load(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def dump(obj, path: str):
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")
