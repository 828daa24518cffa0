import json

import pytest
from fastapi.testclient import TestClient

from pnvc.service.app import app
from conftest import NET_A_TEXT, NET_B_TEXT

client = TestClient(app)


def test_health():
    assert client.get("/health").json() == {"status": "ok"}


def test_parse_text_source():
    resp = client.post("/parse", json={"net_text": NET_A_TEXT})
    assert resp.status_code == 200
    body = resp.json()
    assert body["size_bits"] == 15
    assert body["net"]["places"] == ["p1", "p2", "p3"]
    assert body["net"]["transitions"][0] == {
        "name": "t1", "in": {"p1": 1}, "out": {"p2": 1, "p3": 1}}
    assert body["net"]["marking"] == {"p1": 1}


def test_parse_json_source_roundtrip():
    body = client.post("/parse", json={"net_text": NET_A_TEXT}).json()
    again = client.post("/parse", json={"net": body["net"]})
    assert again.status_code == 200
    assert again.json()["net"] == body["net"]


def test_parse_requires_exactly_one_source():
    assert client.post("/parse", json={}).status_code == 422
    both = {"net_text": NET_A_TEXT,
            "net": {"places": ["p1"], "transitions": []}}
    assert client.post("/parse", json=both).status_code == 422


def test_parse_error_maps_to_422():
    resp = client.post("/parse", json={"net_text": "places\n"})
    assert resp.status_code == 422
    assert "place" in resp.json()["detail"]


def test_analyze_net_a():
    resp = client.post("/analyze", json={"net_text": NET_A_TEXT})
    assert resp.status_code == 200
    body = resp.json()
    assert body["k"] == 2 and body["k_prime"] == 3
    assert body["cover"] == ["p1", "p2"]


def test_analyze_net_b():
    body = client.post("/analyze", json={"net_text": NET_B_TEXT}).json()
    assert body["k"] == 4 and body["k_prime"] == 5
    assert body["independent"] == ["p6"]
    assert body["varieties"] == {"p5": 0, "p6": 0}


def test_cover_endpoint_examples():
    resp = client.post("/cover", json={
        "net_text": NET_A_TEXT, "target": {"p1": 1, "p2": 1}, "method": "both"})
    body = resp.json()
    assert body["verdict"] == "not-covered" and body["decided"]
    assert body["witness"] is None

    body = client.post("/cover", json={
        "net_text": NET_A_TEXT, "target": {"p3": 1}}).json()
    assert body["verdict"] == "covered"
    assert body["witness"] == ["t1"]


def test_bounded_endpoint():
    body = client.post("/bounded", json={"net_text": NET_A_TEXT}).json()
    assert body["verdict"] == "unbounded" and body["decided"]
    assert body["evidence"]["self_covering"] == ["t1", "t2"]


def test_mc_endpoint():
    body = client.post("/mc", json={
        "net_text": NET_A_TEXT, "formula": "EF(p1>=1 && p2>=1)"}).json()
    assert body == {"formula": "EF(p1>=1 && p2>=1)", "verdict": "false",
                    "evidence": {"kind": "kappa"}}
    body = client.post("/mc", json={
        "net_text": NET_A_TEXT, "formula": "{p1+p2} < omega"}).json()
    assert body["verdict"] == "true"


def test_mc_bad_formula_maps_to_422():
    resp = client.post("/mc", json={"net_text": NET_A_TEXT, "formula": "p9 >= 1"})
    assert resp.status_code == 422


def test_bounds_endpoint_from_net():
    body = client.post("/bounds", json={
        "net_text": NET_A_TEXT, "target": {"p3": 1}, "i": 1}).json()
    assert body["params"]["k_prime"] == 3
    assert body["cover_bound"]["exact"] == str(191_102_976)
    assert body["constants"] == {"c_prime": 2, "d": 2}


def test_bounds_endpoint_raw_params():
    body = client.post("/bounds", json={
        "m": 2, "w": 1, "k_prime": 2, "r": 1, "i": 1, "j": 1}).json()
    assert body["cover_bound"]["recurrence"]["exact"] == "146"
    resp = client.post("/bounds", json={"m": 2})
    assert resp.status_code == 422


def test_gen_endpoint_deterministic():
    req = {"places": 4, "transitions": 5, "max_weight": 2, "target_vc": 2,
           "seed": 42}
    a = client.post("/gen", json=req).json()
    b = client.post("/gen", json=req).json()
    assert a == b
    assert a["planted_cover_valid"] is True
    # the text parses back through the service
    assert client.post("/parse", json={"net_text": a["net_text"]}).status_code == 200


def test_propcheck_endpoint():
    body = client.post("/propcheck", json={
        "suites": ["transfer"], "trials": 3, "seed": 1}).json()
    assert body["ok"] is True
    assert body["suites"][0]["suite"] == "transfer"
    assert body["suites"][0]["passed"] == 3
