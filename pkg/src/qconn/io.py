"""JSON documents for topologies, metrics, scales, and expansion-rate tables.

``dumps`` is canonical (sorted keys, canonically ordered sets), so
``dumps(load(text)) == text`` for any canonical document.
"""

from __future__ import annotations

import json
from typing import Any

from .quantale import EXT, OmegaQuantale, QuantaleError
from .scales import Scale
from .spaces import FiniteTopSpace, SpaceError, VMetricSpace

__all__ = [
    "DocumentError",
    "dumps",
    "loads",
    "topology_to_json",
    "topology_from_json",
    "metric_to_json",
    "metric_from_json",
    "quantale_from_json",
    "scale_to_json",
    "scale_from_json",
    "alpha_from_json",
    "value_to_json",
    "value_from_json",
]


class DocumentError(ValueError):
    """Malformed or inconsistent JSON document."""


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True) + "\n"


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"malformed JSON: {exc}") from None


def _expect(doc, kind: str) -> None:
    if not isinstance(doc, dict) or doc.get("type") != kind:
        raise DocumentError(f"expected a {kind!r} document")


def value_to_json(q, v):
    return q.dump(v)


def value_from_json(q, raw):
    try:
        return q.parse(raw)
    except (QuantaleError, ValueError, ZeroDivisionError) as exc:
        raise DocumentError(str(exc)) from None


def topology_to_json(T: FiniteTopSpace) -> dict:
    return {"type": "topology", "points": list(T.points), "opens": [T.labels_of(U) for U in T.opens]}


def topology_from_json(doc) -> FiniteTopSpace:
    _expect(doc, "topology")
    try:
        return FiniteTopSpace(doc["points"], [list(o) for o in doc["opens"]])
    except KeyError as exc:
        raise DocumentError(f"missing field {exc}") from None


def quantale_from_json(doc):
    if not isinstance(doc, dict):
        raise DocumentError("quantale must be an object")
    kind = doc.get("kind")
    if kind == "ext_rational":
        return EXT
    if kind == "omega":
        ground = doc.get("ground")
        if not isinstance(ground, list):
            raise DocumentError("omega quantale needs a ground list")
        return OmegaQuantale([str(g) for g in ground])
    raise DocumentError(f"unknown quantale kind {kind!r}")


def metric_to_json(M: VMetricSpace) -> dict:
    q = M.quantale
    return {
        "type": "metric",
        "quantale": q.to_json(),
        "symmetric": M.symmetric,
        "points": list(M.points),
        "d": [[q.dump(v) for v in row] for row in M.d],
    }


def metric_from_json(doc) -> VMetricSpace:
    _expect(doc, "metric")
    try:
        q = quantale_from_json(doc["quantale"])
        d = [[value_from_json(q, v) for v in row] for row in doc["d"]]
        return VMetricSpace(q, doc["points"], d, bool(doc.get("symmetric", False)))
    except KeyError as exc:
        raise DocumentError(f"missing field {exc}") from None


def scale_to_json(R: Scale) -> dict:
    q = R.space.quantale
    return {"type": "scale", "points": list(R.space.points), "radii": [q.dump(r) for r in R.radii]}


def scale_from_json(doc, M: VMetricSpace) -> Scale:
    _expect(doc, "scale")
    if list(doc.get("points", [])) != list(M.points):
        raise DocumentError("scale points do not match the metric's points")
    q = M.quantale
    try:
        return Scale(M, tuple(value_from_json(q, r) for r in doc["radii"]))
    except (QuantaleError, SpaceError) as exc:
        raise DocumentError(str(exc)) from None


def alpha_from_json(doc, q):
    """Expansion-rate table: ``{"type": "alpha", "table": [[arg, value], ...]}``.

    For the extended rationals the pairs are thresholds of a step function;
    for Omega they are an explicit lookup.
    """
    _expect(doc, "alpha")
    pairs = doc.get("table")
    if not isinstance(pairs, list) or not all(isinstance(p, list) and len(p) == 2 for p in pairs):
        raise DocumentError("alpha table must be a list of [argument, value] pairs")
    parsed = [(value_from_json(q, a), value_from_json(q, b)) for a, b in pairs]
    if q == EXT:
        return sorted(parsed, key=lambda p: p[0])
    return dict(parsed)
