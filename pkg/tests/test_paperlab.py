import json

import pytest

from extfair.paperlab import CLAIMS, _Claim, claim_ids, run_suite


@pytest.fixture(scope="module")
def full_run():
    return run_suite()


def test_full_run_has_no_failures(full_run):
    assert [r.claim_id for r in full_run] == claim_ids()
    assert not [r.claim_id for r in full_run if r.status == "FAIL"]


def test_discrepancies_only_on_fragile_claims(full_run):
    for r in full_run:
        if r.status == "DISCREPANCY":
            assert CLAIMS[r.claim_id].fragile
            assert r.evidence


def test_core_claims_pass(full_run):
    status = {r.claim_id: r.status for r in full_run}
    for cid in ("transform-intro", "intro-ef", "intro-prop", "example1-v", "example1-w", "example2",
                "mms-goods-counterex", "example5", "shift-identity", "lemma1", "vg-profile", "lemma2",
                "vc-profile", "lemma3", "eq-counterex", "mew-counterex", "fullext-gap"):
        assert status[cid] == "PASS", cid


def test_documents_are_json(full_run):
    for r in full_run:
        doc = json.loads(json.dumps(r.to_doc()))
        assert doc["claim"] == r.claim_id and doc["status"] in ("PASS", "FAIL", "DISCREPANCY")
        assert r.claim_id in r.line()


def test_single_filter():
    (r,) = run_suite(["lemma2"])
    assert r.claim_id == "lemma2" and r.status == "PASS" and "NONE" in r.computed


def test_empty_filter():
    assert run_suite([]) == []


def test_unknown_claim():
    with pytest.raises(KeyError):
        run_suite(["no-such-claim"])


@pytest.mark.parametrize("fragile,matches,consistent,want", [
    (False, True, True, "PASS"),
    (False, False, True, "FAIL"),
    (True, False, True, "DISCREPANCY"),
    (True, True, False, "FAIL"),
    (True, False, False, "FAIL"),
])
def test_status_policy(fragile, matches, consistent, want):
    claim = _Claim("toy", "toy", fragile, lambda: ("e", "c", matches, consistent, {}))
    assert claim.run().status == want
