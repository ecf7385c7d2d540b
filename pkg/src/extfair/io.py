"""JSON documents for instances and allocations.

Numbers travel as strings (``"-40"``, ``"3/1000"``, ``"0.0001"``) and are
written back in canonical ``p/q`` form, so a parse/serialize round trip is
exact and output is byte-stable.
"""
from __future__ import annotations

import json
from pathlib import Path

from .core import (
    Allocation,
    FullInstance,
    Instance1D,
    Instance2D,
    InvalidInstance,
    format_rational,
)

SCHEMA_2D = "extfair/instance-2d/1"
SCHEMA_1D = "extfair/instance-1d/1"
SCHEMA_FULL = "extfair/instance-full/1"
SCHEMA_ALLOC = "extfair/alloc/1"


def _row(xs) -> list[str]:
    return [format_rational(x) for x in xs]


def instance_to_doc(instance, shift=None) -> dict:
    if isinstance(instance, Instance2D):
        vals = [{"v": _row(a), "vprime": _row(b)} for a, b in zip(instance.v, instance.vprime)]
        schema = SCHEMA_2D
    elif isinstance(instance, Instance1D):
        vals = [{"w": _row(r)} for r in instance.w]
        schema = SCHEMA_1D
    elif isinstance(instance, FullInstance):
        vals = [{"v_full": [_row(r) for r in block]} for block in instance.v_full]
        schema = SCHEMA_FULL
    else:
        raise TypeError(f"cannot serialize {type(instance).__name__}")
    doc = {
        "schema": schema,
        "agents": instance.n,
        "items": list(instance.item_ids),
        "valuations": vals,
    }
    if shift is not None:
        doc["shift"] = _row(shift)
    return doc


def _field(rec, key, i):
    if not isinstance(rec, dict) or key not in rec:
        raise InvalidInstance(f"agent {i} record lacks {key!r}")
    return rec[key]


def instance_from_doc(doc: dict):
    if not isinstance(doc, dict):
        raise InvalidInstance("instance document must be a JSON object")
    schema = doc.get("schema")
    n = doc.get("agents")
    items = doc.get("items")
    vals = doc.get("valuations")
    if not isinstance(n, int) or not isinstance(items, list) or not isinstance(vals, list):
        raise InvalidInstance("instance document needs 'agents', 'items' and 'valuations'")
    if len(vals) != n:
        raise InvalidInstance(f"{len(vals)} valuation records for {n} agents")
    m = len(items)

    def check_len(row, what):
        if not isinstance(row, list) or len(row) != m:
            raise InvalidInstance(f"{what} must list {m} numbers")
        if any(not isinstance(x, str) for x in row):
            raise InvalidInstance(f"{what}: numbers must be JSON strings")
        return row

    if schema == SCHEMA_2D:
        v = [check_len(_field(r, "v", i), f"agent {i} v") for i, r in enumerate(vals)]
        vp = [check_len(_field(r, "vprime", i), f"agent {i} vprime") for i, r in enumerate(vals)]
        return Instance2D(v, vp, items)
    if schema == SCHEMA_1D:
        w = [check_len(_field(r, "w", i), f"agent {i} w") for i, r in enumerate(vals)]
        return Instance1D(w, items)
    if schema == SCHEMA_FULL:
        blocks = []
        for i, r in enumerate(vals):
            block = _field(r, "v_full", i)
            if not isinstance(block, list) or len(block) != n:
                raise InvalidInstance(f"agent {i} v_full must have {n} rows")
            blocks.append([check_len(row, f"agent {i} v_full") for row in block])
        return FullInstance(blocks, items)
    raise InvalidInstance(f"unknown schema {schema!r}")


def allocation_to_doc(alloc: Allocation) -> dict:
    return {"schema": SCHEMA_ALLOC, "assignment": list(alloc.assignment)}


def allocation_from_doc(doc: dict) -> Allocation:
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA_ALLOC:
        raise InvalidInstance(f"expected schema {SCHEMA_ALLOC!r}")
    a = doc.get("assignment")
    if not isinstance(a, list) or any(not isinstance(x, int) or isinstance(x, bool) for x in a):
        raise InvalidInstance("assignment must be a list of agent indices")
    return Allocation(a)


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def load_json(path) -> dict:
    return json.loads(Path(path).read_text())


def load_instance(path):
    return instance_from_doc(load_json(path))


def load_allocation(path) -> Allocation:
    return allocation_from_doc(load_json(path))


def save(doc, path) -> None:
    Path(path).write_text(dumps(doc))
