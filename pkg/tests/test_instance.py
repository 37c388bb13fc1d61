import json

import pytest

from fairdiv.errors import SchemaError
from fairdiv.fixtures import named_instances
from fairdiv.instance import dump_instance, parse_instance, profiles_equal
from fairdiv.valuations import BINARY_ADDITIVE

from .conftest import FIXTURE_DIR


def test_contested_fixture_file():
    inst = parse_instance((FIXTURE_DIR / "single_item_contested.json").read_text())
    assert inst.n == 2 and inst.m == 1
    assert all(v.class_tag == BINARY_ADDITIVE for v in inst.profile)


def test_sec_fixture_file(sec_profile):
    inst = parse_instance((FIXTURE_DIR / "sec_example.json").read_text())
    assert profiles_equal(inst.profile, sec_profile)


def test_empty_agents():
    with pytest.raises(SchemaError):
        parse_instance(json.dumps({"agents": [], "items": [], "valuations": {}}))


def test_syntax_error_position():
    with pytest.raises(SchemaError, match="line 2 column"):
        parse_instance('{"agents": ["a"],\n  "items": ]}')


@pytest.mark.parametrize(
    "doc, msg",
    [
        ({"agents": ["a", "a"], "items": [], "valuations": []}, "unique"),
        ({"agents": ["a"], "items": ["x"], "valuations": {"b": {}}}, "missing"),
        ({"agents": ["a"], "items": ["x"], "valuations": [{"class": "weird"}]}, "unknown class"),
        ({"agents": ["a"], "items": ["x"], "valuations": [{"class": "additive", "values": {"y": 1}}]}, "unknown item"),
        ({"agents": ["a"], "items": ["x"], "valuations": [{"class": "matroidal", "matroid": {"kind": "laminar", "sets": [["x"]]}}]}, "malformed"),
        ({"agents": ["a"], "items": ["x"], "valuations": [{"class": "additive", "values": {"x": "1/0"}}]}, "cannot parse"),
        ({"schema": 7, "agents": ["a"], "items": [], "valuations": []}, "schema version"),
    ],
)
def test_schema_errors(doc, msg):
    with pytest.raises(SchemaError, match=msg):
        parse_instance(json.dumps(doc))


def test_class_validation_witness():
    doc = {
        "agents": ["a"],
        "items": ["x", "y"],
        "valuations": [{"class": "superadditive", "table": [{"set": ["x"], "value": 1}, {"set": ["y"], "value": 1}]}],
    }
    with pytest.raises(SchemaError, match="superadditive"):
        parse_instance(json.dumps(doc))


def test_table_closure_and_fractions():
    doc = {
        "agents": ["a"],
        "items": ["x", "y"],
        "valuations": [{"class": "general", "table": [{"set": ["x"], "value": "3/2"}]}],
    }
    v = parse_instance(json.dumps(doc)).profile[0]
    assert [v.value(x) for x in range(4)] == [0, 1.5, 0, 1.5]


@pytest.mark.parametrize("name", sorted(named_instances()))
def test_round_trip(name):
    inst = named_instances()[name]
    text = dump_instance(inst)
    again = parse_instance(text)
    assert profiles_equal(inst.profile, again.profile)
    assert dump_instance(again) == text
    assert (FIXTURE_DIR / f"{name}.json").read_text() == text


def test_all_matroid_kinds_round_trip():
    doc = {
        "agents": ["u", "p", "l", "t", "r"],
        "items": ["a", "b", "c"],
        "valuations": {
            "u": {"class": "matroidal", "matroid": {"kind": "uniform", "rank": 1, "items": ["a", "c"]}},
            "p": {"class": "matroidal", "matroid": {"kind": "partition", "blocks": [["a", "b"]], "caps": [1]}},
            "l": {"class": "matroidal", "matroid": {"kind": "laminar", "sets": [["a"], ["a", "b"]], "caps": [0, 1]}},
            "t": {"class": "matroidal", "matroid": {"kind": "transversal", "slots": [["a", "b"], ["b", "c"]]}},
            "r": {"class": "matroidal", "matroid": {"kind": "rank_table", "table": [
                {"set": s, "rank": min(len(s), 1)} for s in ([], ["a"], ["b"], ["a", "b"], ["c"], ["a", "c"], ["b", "c"], ["a", "b", "c"])
            ]}},
        },
    }
    inst = parse_instance(json.dumps(doc))
    again = parse_instance(dump_instance(inst))
    assert profiles_equal(inst.profile, again.profile)
    assert inst.profile[2].value(0b011) == 1 and inst.profile[2].value(0b001) == 0
