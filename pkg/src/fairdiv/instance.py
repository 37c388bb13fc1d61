"""JSON instance files.

Schema (version 1)::

    {
      "schema": 1,
      "agents": ["alice", "bob"],
      "items": ["e1", "e2"],
      "valuations": {
        "alice": {"class": "matroidal", "matroid": {"kind": "laminar", "sets": [["e1", "e2"]], "caps": [1]}},
        "bob": {"class": "additive", "values": {"e1": "1/2", "e2": 1}}
      },
      "params": {"epsilon": "1/2", "complete": false}
    }

``valuations`` may also be a list aligned with ``agents``. Valuation entries:

* ``matroidal`` with ``matroid.kind`` one of ``uniform`` (``rank``, optional
  ``items``), ``partition`` (``blocks``, ``caps``), ``laminar`` (``sets``,
  ``caps``), ``transversal`` (``slots``: list of item lists), ``rank_table``
  (``table``: list of ``{"set": [...], "rank": r}`` covering every subset).
* ``binary_additive`` with ``desired`` (item list) or 0/1 ``values``.
* ``additive`` with ``values`` (item -> number or ``"p/q"`` string; missing
  items are worth 0).
* ``superadditive`` / ``general`` with ``table``: list of
  ``{"set": [...], "value": v}``. Subsets not listed take the largest value of
  a listed subset they contain (0 if none).

Subsets are always sorted arrays of item names.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import FairDivError, SchemaError
from .valuations import (
    ADDITIVE,
    BINARY_ADDITIVE,
    CLASS_TAGS,
    EXHAUSTIVE_MAX,
    GENERAL,
    MATROIDAL,
    SUPERADDITIVE,
    TABLE_MAX,
    Profile,
    Valuation,
    additive,
    binary_additive,
    from_mask,
    from_table,
    laminar,
    partition,
    rank_table,
    transversal,
    uniform,
    validate_class,
)

SCHEMA_VERSION = 1


@dataclass
class Instance:
    agents: list
    items: list
    profile: Profile
    params: dict = field(default_factory=dict)
    name: str = ""

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def m(self) -> int:
        return len(self.items)


def parse_number(x) -> Fraction:
    if isinstance(x, bool):
        raise SchemaError(f"expected a number, got {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(str(x))
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError):
            raise SchemaError(f"cannot parse number {x!r}") from None
    raise SchemaError(f"expected a number, got {x!r}")


def format_number(x):
    """Integers stay JSON ints; other rationals become ``"p/q"`` strings."""
    x = Fraction(x)
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _item_list(names, index, where):
    if not isinstance(names, list):
        raise SchemaError(f"{where}: expected a list of item names")
    out = []
    for s in names:
        if s not in index:
            raise SchemaError(f"{where}: unknown item {s!r}")
        out.append(index[s])
    return out


def _parse_valuation(entry, index, where) -> Valuation:
    m = len(index)
    if not isinstance(entry, dict) or "class" not in entry:
        raise SchemaError(f"{where}: valuation must be an object with a 'class' key")
    tag = entry["class"]
    if tag not in CLASS_TAGS:
        raise SchemaError(f"{where}: unknown class {tag!r}")
    try:
        if tag == MATROIDAL:
            mat = entry.get("matroid")
            if not isinstance(mat, dict):
                raise SchemaError(f"{where}: matroidal valuation needs a 'matroid' object")
            kind = mat.get("kind")
            if kind == "uniform":
                items = _item_list(mat["items"], index, where) if "items" in mat else None
                return uniform(m, int(mat["rank"]), items)
            if kind == "partition":
                return partition(m, [_item_list(b, index, where) for b in mat["blocks"]], mat["caps"])
            if kind == "laminar":
                return laminar(m, [_item_list(b, index, where) for b in mat["sets"]], mat["caps"])
            if kind == "transversal":
                return transversal(m, [_item_list(b, index, where) for b in mat["slots"]])
            if kind == "rank_table":
                table = [None] * (1 << m)
                for row in mat["table"]:
                    mask = 0
                    for e in _item_list(row["set"], index, where):
                        mask |= 1 << e
                    table[mask] = int(row["rank"])
                if any(x is None for x in table):
                    raise SchemaError(f"{where}: rank table must list every subset")
                return rank_table(m, table)
            raise SchemaError(f"{where}: unknown matroid kind {kind!r}")
        if tag == BINARY_ADDITIVE:
            if "desired" in entry:
                return binary_additive(m, _item_list(entry["desired"], index, where))
            vals = _values(entry, index, where)
            if any(x not in (0, 1) for x in vals):
                raise SchemaError(f"{where}: binary additive values must be 0 or 1")
            return binary_additive(m, [e for e, x in enumerate(vals) if x == 1])
        if tag == ADDITIVE:
            return additive(m, _values(entry, index, where))
        # superadditive / general: subset table with monotone closure
        if m > TABLE_MAX:
            raise SchemaError(f"{where}: value tables support at most {TABLE_MAX} items")
        listed = {}
        for row in entry.get("table", []):
            mask = 0
            for e in _item_list(row["set"], index, where):
                mask |= 1 << e
            listed[mask] = parse_number(row["value"])
        table = [Fraction(0)] * (1 << m)
        for x in range(1 << m):
            if x in listed:
                table[x] = listed[x]
            best = table[x]
            y = x
            while y:
                low = y & -y
                if table[x & ~low] > best:
                    best = table[x & ~low]
                y ^= low
            table[x] = max(best, listed.get(x, best))
        return from_table(m, tag, table)
    except SchemaError:
        raise
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"{where}: malformed valuation ({exc})") from None
    except FairDivError as exc:
        raise SchemaError(f"{where}: {exc}") from None


def _values(entry, index, where):
    raw = entry.get("values")
    if not isinstance(raw, dict):
        raise SchemaError(f"{where}: 'values' must map item names to numbers")
    vals = [Fraction(0)] * len(index)
    for name, x in raw.items():
        if name not in index:
            raise SchemaError(f"{where}: unknown item {name!r}")
        vals[index[name]] = parse_number(x)
    return vals


def parse_instance(text: str, *, validate: bool = True, name: str = "") -> Instance:
    """Parse and validate an instance document; indices follow declaration order."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"JSON syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return instance_from_dict(doc, validate=validate, name=name)


def instance_from_dict(doc, *, validate: bool = True, name: str = "") -> Instance:
    if not isinstance(doc, dict):
        raise SchemaError("instance must be a JSON object")
    version = doc.get("schema", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema version {version!r}")
    agents, items = doc.get("agents"), doc.get("items")
    if not isinstance(agents, list) or not agents:
        raise SchemaError("'agents' must be a non-empty list of names")
    if not isinstance(items, list):
        raise SchemaError("'items' must be a list of names")
    for label, names in (("agent", agents), ("item", items)):
        if not all(isinstance(s, str) for s in names):
            raise SchemaError(f"{label} names must be strings")
        if len(set(names)) != len(names):
            raise SchemaError(f"{label} names must be unique")
    index = {s: e for e, s in enumerate(items)}
    raw = doc.get("valuations")
    if isinstance(raw, dict):
        missing = [a for a in agents if a not in raw]
        extra = [a for a in raw if a not in agents]
        if missing or extra:
            raise SchemaError(f"valuations keyed by agent: missing {missing}, unknown {extra}")
        entries = [raw[a] for a in agents]
    elif isinstance(raw, list):
        if len(raw) != len(agents):
            raise SchemaError("valuation list must align with the agent list")
        entries = raw
    else:
        raise SchemaError("'valuations' must be an object or a list")
    vals = [_parse_valuation(e, index, f"valuations[{a!r}]") for a, e in zip(agents, entries)]
    if validate:
        for a, v in zip(agents, vals):
            if v.m <= EXHAUSTIVE_MAX:
                report = validate_class(v)
                if not report.valid:
                    rule, x, y = report.violations[0]
                    names = lambda s: [items[e] for e in s] if isinstance(s, list) else s
                    raise SchemaError(
                        f"valuations[{a!r}] fails {v.class_tag} check '{rule}' at {names(x)} / {names(y)}"
                    )
    params = doc.get("params", {})
    if not isinstance(params, dict):
        raise SchemaError("'params' must be an object")
    return Instance(list(agents), list(items), Profile(vals), dict(params), name)


# --- serialisation --------------------------------------------------------------


def _names(items, elems):
    return [items[e] for e in sorted(elems)]


def valuation_to_dict(v: Valuation, items: list) -> dict:
    spec = v.spec or {}
    kind = spec.get("kind")
    if v.class_tag == MATROIDAL and kind in ("uniform", "partition", "laminar", "transversal"):
        mat = {"kind": kind}
        if kind == "uniform":
            mat["rank"] = spec["rank"]
            if "items" in spec:
                mat["items"] = _names(items, spec["items"])
        elif kind == "partition":
            mat["blocks"] = [_names(items, b) for b in spec["blocks"]]
            mat["caps"] = list(spec["caps"])
        elif kind == "laminar":
            mat["sets"] = [_names(items, b) for b in spec["sets"]]
            mat["caps"] = list(spec["caps"])
        else:
            mat["slots"] = [_names(items, b) for b in spec["slots"]]
        return {"class": MATROIDAL, "matroid": mat}
    if v.class_tag == MATROIDAL:
        rows = [{"set": _names(items, from_mask(x)), "rank": int(v.value(x))} for x in range(1 << v.m)]
        return {"class": MATROIDAL, "matroid": {"kind": "rank_table", "table": rows}}
    if v.class_tag == BINARY_ADDITIVE:
        desired = [e for e in range(v.m) if v.value(1 << e) == 1]
        return {"class": BINARY_ADDITIVE, "desired": _names(items, desired)}
    if v.class_tag == ADDITIVE:
        return {"class": ADDITIVE, "values": {items[e]: format_number(v.value(1 << e)) for e in range(v.m)}}
    rows = [{"set": _names(items, from_mask(x)), "value": format_number(v.value(x))} for x in range(1 << v.m)]
    return {"class": v.class_tag, "table": rows}


def instance_to_dict(inst: Instance) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "agents": list(inst.agents),
        "items": list(inst.items),
        "valuations": {a: valuation_to_dict(v, inst.items) for a, v in zip(inst.agents, inst.profile)},
        "params": dict(inst.params),
    }


def dump_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2, sort_keys=False) + "\n"


def default_instance(P: Profile, name: str = "", params: dict | None = None) -> Instance:
    """Wrap a bare profile with generated names ``agent1..`` / ``e1..``."""
    agents = [f"agent{i + 1}" for i in range(P.n)]
    items = [f"e{e + 1}" for e in range(P.m)]
    return Instance(agents, items, P, dict(params or {}), name)


def profiles_equal(P: Profile, Q: Profile) -> bool:
    """Same classes and identical values on every subset (``m <= TABLE_MAX``)."""
    if P.n != Q.n or P.m != Q.m:
        return False
    for v, w in zip(P, Q):
        if v.class_tag != w.class_tag:
            return False
        if any(v.value(x) != w.value(x) for x in range(1 << v.m)):
            return False
    return True


__all__ = [
    "Instance",
    "parse_instance",
    "dump_instance",
    "instance_from_dict",
    "instance_to_dict",
    "default_instance",
    "profiles_equal",
    "format_number",
    "parse_number",
    "GENERAL",
    "SUPERADDITIVE",
]
