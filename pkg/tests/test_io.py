import json

import pytest

from extfair import Allocation, BuiltinId, FullInstance, Instance1D, builtin, transform
from extfair.core import InvalidInstance
from extfair.generate import random_instance
from extfair.io import (
    SCHEMA_1D,
    allocation_from_doc,
    allocation_to_doc,
    dumps,
    instance_from_doc,
    instance_to_doc,
    load_instance,
    save,
)


@pytest.mark.parametrize("inst", [
    builtin(BuiltinId.VG_GOODS),
    builtin(BuiltinId.EXAMPLE2_PROPXE),
    transform(builtin(BuiltinId.INTRO_2GOODS)).one_d,
    FullInstance.embed(builtin(BuiltinId.MEW_COUNTEREX)),
    random_instance(3, 3, 5, "mixed", "mixed", max_den=10),
])
def test_round_trip_exact_and_stable(inst):
    text = dumps(instance_to_doc(inst))
    back = instance_from_doc(json.loads(text))
    assert back == inst
    assert dumps(instance_to_doc(back)) == text


def test_decimal_strings_accepted():
    doc = {"schema": SCHEMA_1D, "agents": 1, "items": ["a", "b"], "valuations": [{"w": ["0.0001", "-3/6"]}]}
    inst = instance_from_doc(doc)
    assert inst.w[0][0].denominator == 10**4
    assert instance_to_doc(inst)["valuations"][0]["w"] == ["1/10000", "-1/2"]


def test_shift_written():
    res = transform(builtin(BuiltinId.EXAMPLE_CHORES_NEG))
    doc = instance_to_doc(res.one_d, shift=res.shift)
    assert doc["shift"] == ["-177", "-177"]


@pytest.mark.parametrize("doc", [
    [],
    {"schema": "nope", "agents": 1, "items": [], "valuations": [{}]},
    {"schema": SCHEMA_1D, "agents": 2, "items": ["a"], "valuations": [{"w": ["1"]}]},
    {"schema": SCHEMA_1D, "agents": 1, "items": ["a"], "valuations": [{"w": [1]}]},
    {"schema": SCHEMA_1D, "agents": 1, "items": ["a"], "valuations": [{"w": ["1", "2"]}]},
    {"schema": SCHEMA_1D, "agents": 1, "items": ["a"], "valuations": [{"v": ["1"]}]},
    {"schema": SCHEMA_1D, "items": ["a"], "valuations": [{"w": ["1"]}]},
])
def test_malformed_instances(doc):
    with pytest.raises(InvalidInstance):
        instance_from_doc(doc)


def test_bad_number_string():
    doc = {"schema": SCHEMA_1D, "agents": 1, "items": ["a"], "valuations": [{"w": ["1/0"]}]}
    with pytest.raises(ValueError):
        instance_from_doc(doc)


def test_allocation_round_trip():
    a = Allocation([2, 0, 1])
    assert allocation_from_doc(json.loads(dumps(allocation_to_doc(a)))) == a


@pytest.mark.parametrize("doc", [{"assignment": [0]}, {"schema": "extfair/alloc/1", "assignment": [True]},
                                 {"schema": "extfair/alloc/1", "assignment": "01"}])
def test_malformed_allocations(doc):
    with pytest.raises(InvalidInstance):
        allocation_from_doc(doc)


def test_save_and_load(tmp_path):
    inst = builtin(BuiltinId.EQ_COUNTEREX)
    path = tmp_path / "eq.json"
    save(instance_to_doc(inst), path)
    assert load_instance(path) == inst


def test_generator_signs():
    for kind in ("goods", "chores"):
        for ext in ("correlated", "inverse"):
            inst = random_instance(1, 3, 6, kind, ext, max_den=4)
            w = [x for r in inst.w for x in r]
            vp = [x for r in inst.vprime for x in r]
            assert all(x >= 0 for x in w) if kind == "goods" else all(x <= 0 for x in w)
            positive = (ext == "correlated") == (kind == "goods")
            assert all(x >= 0 for x in vp) if positive else all(x <= 0 for x in vp)
            assert all(x.denominator <= 4 for x in inst.w[0] + inst.vprime[0])


def test_generator_deterministic_and_validated():
    assert random_instance(5, 2, 3) == random_instance(5, 2, 3)
    with pytest.raises(ValueError):
        random_instance(0, 2, 3, "mixed", "correlated")
    with pytest.raises(ValueError):
        random_instance(0, 2, 3, "gold")
