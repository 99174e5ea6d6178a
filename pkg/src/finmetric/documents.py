"""JSON documents: parsing, canonical serialization and schemas.

Every document is an object with a ``"kind"`` field.  Rationals are written
as strings (``"3/4"``, ``"2"``, ``"inf"``); spaces list their points in
lexicographic order, so ``serialize(parse(serialize(x))) == serialize(x)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .core import FinSpace, Morphism
from .descent import Covering, DescentDatum
from .errors import MetricError, ParseError
from .gh import Correspondence
from .submetry import Family, PointedFamily
from .values import BadValue, ExtValue, format_value, to_value

KINDS = ("space", "morphism", "covering", "descent", "correspondence", "family", "pointed-family", "result")


@dataclass(frozen=True)
class Document:
    kind: str
    payload: Any


def _fail(msg: str) -> ParseError:
    return ParseError("E_PARSE", msg)


def _obj(raw: Any, what: str) -> dict:
    if not isinstance(raw, dict):
        raise _fail(f"{what} must be a JSON object")
    return raw


def _list(raw: Any, what: str) -> list:
    if not isinstance(raw, list):
        raise _fail(f"{what} must be a JSON array")
    return raw


def _str(raw: Any, what: str) -> str:
    if not isinstance(raw, str):
        raise _fail(f"{what} must be a string")
    return raw


def _field(raw: dict, key: str, what: str) -> Any:
    if key not in raw:
        raise _fail(f"{what} is missing {key!r}")
    return raw[key]


def parse_value(raw: Any) -> ExtValue:
    if isinstance(raw, float) or isinstance(raw, bool) or not isinstance(raw, (str, int)):
        raise ParseError("E_BAD_RATIONAL", f"value {raw!r} must be a rational string or integer")
    try:
        return to_value(raw)
    except BadValue as exc:
        raise ParseError("E_BAD_RATIONAL", str(exc)) from None


# --- to JSON ---------------------------------------------------------------

def space_json(X: FinSpace) -> dict:
    return {"points": list(X.points), "d": [[format_value(v) for v in row] for row in X.d]}


def morphism_json(f: Morphism) -> dict:
    return {"dom": space_json(f.dom), "cod": space_json(f.cod), "map": dict(f.map)}


def covering_json(cov: Covering) -> dict:
    return {"base": space_json(cov.base), "legs": [morphism_json(g) for g in cov.legs]}


def descent_json(datum: DescentDatum) -> dict:
    return {
        "base": space_json(datum.base),
        "covering": [morphism_json(g) for g in datum.covering.legs],
        "charts": [morphism_json(p) for p in datum.charts],
        "transitions": {
            f"{i},{j}": sorted([a, b] for a, b in phi.items()) for (i, j), phi in datum.transitions.items()
        },
    }


def correspondence_json(R: Correspondence) -> dict:
    return {
        "left": space_json(R.left),
        "right": space_json(R.right),
        "pairs": [list(p) for p in R.sorted_pairs()],
    }


def family_json(fam: Family) -> dict:
    out = {"total": morphism_json(fam.total)}
    if fam.to_x is not None:
        out["to_x"] = morphism_json(fam.to_x)
    return out


def pointed_family_json(pf: PointedFamily) -> dict:
    return {"total": morphism_json(pf.family.total), "sections": [dict(s.map) for s in pf.sections]}


_ENCODERS = {
    "space": space_json,
    "morphism": morphism_json,
    "covering": covering_json,
    "descent": descent_json,
    "correspondence": correspondence_json,
    "family": family_json,
    "pointed-family": pointed_family_json,
    "result": dict,
}


def to_json(doc: Document) -> dict:
    body = _ENCODERS[doc.kind](doc.payload)
    return {"kind": doc.kind, **body}


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":")) + "\n"


def serialize(doc: Document) -> str:
    return dumps(to_json(doc))


# --- from JSON -------------------------------------------------------------

def parse_space(raw: Any) -> FinSpace:
    raw = _obj(raw, "space")
    pts = [_str(p, "point label") for p in _list(_field(raw, "points", "space"), "points")]
    rows = _list(_field(raw, "d", "space"), "d")
    d = [[parse_value(v) for v in _list(row, "matrix row")] for row in rows]
    try:
        return FinSpace(pts, d)
    except MetricError as exc:
        raise _fail(f"malformed space: {exc.message}") from None


def parse_map(raw: Any, dom: FinSpace, cod: FinSpace, what: str = "map") -> dict[str, str]:
    raw = _obj(raw, what)
    mapping = {_str(k, "map key"): _str(v, "map value") for k, v in raw.items()}
    if set(mapping) != set(dom.points):
        raise _fail(f"{what} must be defined on exactly the domain points")
    stray = sorted(v for v in mapping.values() if v not in cod)
    if stray:
        raise _fail(f"{what} sends points outside the codomain: {stray}")
    return mapping


def parse_morphism(raw: Any) -> Morphism:
    raw = _obj(raw, "morphism")
    dom = parse_space(_field(raw, "dom", "morphism"))
    cod = parse_space(_field(raw, "cod", "morphism"))
    return Morphism(dom, cod, parse_map(_field(raw, "map", "morphism"), dom, cod))


def parse_covering(raw: Any) -> Covering:
    raw = _obj(raw, "covering")
    base = parse_space(_field(raw, "base", "covering"))
    legs = tuple(parse_morphism(g) for g in _list(_field(raw, "legs", "covering"), "legs"))
    return Covering(base, legs)


def parse_descent(raw: Any) -> DescentDatum:
    raw = _obj(raw, "descent")
    base = parse_space(_field(raw, "base", "descent"))
    legs = tuple(parse_morphism(g) for g in _list(_field(raw, "covering", "descent"), "covering"))
    charts = tuple(parse_morphism(p) for p in _list(_field(raw, "charts", "descent"), "charts"))
    transitions: dict[tuple[int, int], dict[str, str]] = {}
    for key, pairs in _obj(_field(raw, "transitions", "descent"), "transitions").items():
        try:
            i, j = (int(t) for t in key.split(","))
        except ValueError:
            raise _fail(f"transition key {key!r} must look like 'i,j'") from None
        phi = {}
        for pair in _list(pairs, "transition"):
            pair = _list(pair, "transition pair")
            if len(pair) != 2:
                raise _fail("transition pairs have two entries")
            a, b = _str(pair[0], "transition point"), _str(pair[1], "transition point")
            if a in phi:
                raise _fail(f"transition {key} lists {a!r} twice")
            phi[a] = b
        transitions[(i, j)] = phi
    return DescentDatum(Covering(base, legs), charts, transitions)


def parse_correspondence(raw: Any) -> Correspondence:
    raw = _obj(raw, "correspondence")
    X = parse_space(_field(raw, "left", "correspondence"))
    Y = parse_space(_field(raw, "right", "correspondence"))
    pairs = []
    for pair in _list(_field(raw, "pairs", "correspondence"), "pairs"):
        pair = _list(pair, "pair")
        if len(pair) != 2:
            raise _fail("correspondence pairs have two entries")
        x, y = _str(pair[0], "point"), _str(pair[1], "point")
        if x not in X or y not in Y:
            raise _fail(f"pair {[x, y]} references an unknown point")
        pairs.append((x, y))
    return Correspondence(X, Y, frozenset(pairs))


def parse_family(raw: Any) -> Family:
    raw = _obj(raw, "family")
    total = parse_morphism(_field(raw, "total", "family"))
    to_x = parse_morphism(raw["to_x"]) if "to_x" in raw else None
    if to_x is not None and to_x.dom != total.dom:
        raise _fail("to_x must start at the total space")
    return Family(total, to_x)


def parse_pointed_family(raw: Any) -> PointedFamily:
    raw = _obj(raw, "pointed-family")
    total = parse_morphism(_field(raw, "total", "pointed-family"))
    sections = tuple(
        Morphism(total.cod, total.dom, parse_map(s, total.cod, total.dom, "section"))
        for s in _list(_field(raw, "sections", "pointed-family"), "sections")
    )
    return PointedFamily(Family(total), sections)


_DECODERS = {
    "space": parse_space,
    "morphism": parse_morphism,
    "covering": parse_covering,
    "descent": parse_descent,
    "correspondence": parse_correspondence,
    "family": parse_family,
    "pointed-family": parse_pointed_family,
    "result": lambda raw: {k: v for k, v in raw.items()},
}


def from_json(raw: Any) -> Document:
    raw = _obj(raw, "document")
    kind = raw.get("kind")
    if kind not in _DECODERS:
        raise ParseError("E_UNKNOWN_KIND", f"unknown document kind {kind!r}")
    body = {k: v for k, v in raw.items() if k != "kind"}
    return Document(kind, _DECODERS[kind](body))


def parse_document(text: str | bytes) -> Document:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError("E_PARSE", "input is not UTF-8", position=exc.start) from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("E_PARSE", exc.msg, position=exc.pos) from None
    return from_json(raw)


# --- schemas ---------------------------------------------------------------

_VALUE = {"type": "string", "pattern": r"^(inf|[0-9]+(/[1-9][0-9]*)?)$"}
_SPACE = {
    "type": "object",
    "required": ["points", "d"],
    "properties": {
        "points": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "d": {"type": "array", "items": {"type": "array", "items": _VALUE}},
    },
}
_MAP = {"type": "object", "additionalProperties": {"type": "string"}}
_MORPHISM = {
    "type": "object",
    "required": ["dom", "cod", "map"],
    "properties": {"dom": _SPACE, "cod": _SPACE, "map": _MAP},
}
_PAIRS = {"type": "array", "items": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2}}


def _doc(kind: str, required: list[str], props: dict) -> dict:
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": kind,
        "type": "object",
        "required": ["kind", *required],
        "properties": {"kind": {"const": kind}, **props},
    }


SCHEMAS = {
    "space": _doc("space", ["points", "d"], _SPACE["properties"]),
    "morphism": _doc("morphism", ["dom", "cod", "map"], _MORPHISM["properties"]),
    "covering": _doc("covering", ["base", "legs"], {"base": _SPACE, "legs": {"type": "array", "items": _MORPHISM}}),
    "descent": _doc(
        "descent",
        ["base", "covering", "charts", "transitions"],
        {
            "base": _SPACE,
            "covering": {"type": "array", "items": _MORPHISM},
            "charts": {"type": "array", "items": _MORPHISM},
            "transitions": {
                "type": "object",
                "propertyNames": {"pattern": r"^[0-9]+,[0-9]+$"},
                "additionalProperties": _PAIRS,
            },
        },
    ),
    "correspondence": _doc("correspondence", ["left", "right", "pairs"], {"left": _SPACE, "right": _SPACE, "pairs": _PAIRS}),
    "family": _doc("family", ["total"], {"total": _MORPHISM, "to_x": _MORPHISM}),
    "pointed-family": _doc(
        "pointed-family", ["total", "sections"], {"total": _MORPHISM, "sections": {"type": "array", "items": _MAP}}
    ),
    "result": _doc("result", [], {"command": {"type": "string"}}),
}
