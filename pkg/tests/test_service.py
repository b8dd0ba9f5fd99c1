"""HTTP surface: endpoints, schemas, error mapping."""

import json

import pytest
from fastapi.testclient import TestClient

from qmahler.service import app
from qmahler.service.schemas import (
    FieldInfoResponse,
    PowerReplaceResponse,
    ReplaceResponse,
    TMetricResponse,
)


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200 and r.json()["status"] == "ok"


def test_field_info_endpoint(client):
    r = client.post("/field/info", json={"field": 3})
    assert r.status_code == 200
    body = r.json()
    assert body["balance"]["balanced"] is False
    assert body["balance"]["witness"] == "1+sqrt(3)"
    assert body["unit_group"]["fundamental_unit"] == "2+sqrt(3)"
    # response parses back through its model
    FieldInfoResponse.model_validate(body)


def test_field_info_q(client):
    r = client.post("/field/info", json={"field": "Q"})
    assert r.status_code == 200
    body = r.json()
    assert body["field"] == "Q" and body["class_info"]["class_number"] == 1
    assert body["balance"]["balanced"] is True


def test_height_and_measure_endpoints(client):
    r = client.post("/element/height", json={"field": "Q", "expr": "2/3"})
    assert r.status_code == 200
    assert r.json()["value"]["exact_form"] == "log(3)"
    r = client.post("/element/measure", json={"field": "Q", "expr": "sqrt(2)"})
    assert r.status_code == 200
    body = r.json()
    assert body["relative_degree"] == 2 and body["value"]["exact_form"] == "log(2)"


def test_ideal_endpoints(client):
    r = client.post("/ideal/factor", json={"field": -1, "ideal": "(6)"})
    assert r.status_code == 200
    assert {(f["prime"], f["exponent"]) for f in r.json()["factors"]} == {
        ("(2, w-1)", 2),
        ("(3)", 1),
    }
    r = client.post(
        "/ideal/refine",
        json={"field": "Q", "ideal": "(12)", "parts": ["(6)", "(6)"]},
    )
    assert r.status_code == 200
    body = r.json()
    assert body["refined"] == ["(6)", "(2)"]
    assert body["product_equals_ideal"] and all(body["containments"])


def test_replace_endpoint(client):
    r = client.post(
        "/replace", json={"field": "Q", "alpha": "2", "factors": ["6", "1/3"]}
    )
    assert r.status_code == 200
    body = ReplaceResponse.model_validate(r.json())
    assert body.gammas == ["2", "1"] and body.certified


def test_power_replace_endpoint(client):
    r = client.post(
        "/power-replace",
        json={
            "field": -5,
            "lambda": 2,
            "alpha": "2",
            "factors": ["1+sqrt(-5)", "(1-sqrt(-5))/3"],
        },
    )
    assert r.status_code == 200
    body = PowerReplaceResponse.model_validate(r.json())
    assert body.certified and body.lam == 2
    assert json.loads(r.text)["lambda"] == 2  # wire name


def test_tmetric_endpoint(client):
    r = client.post(
        "/tmetric", json={"field": "Q", "alpha": "12", "t": ["inf", "1", "0.5"]}
    )
    assert r.status_code == 200
    body = TMetricResponse.model_validate(r.json())
    by_t = {e.t: e for e in body.results}
    assert by_t["inf"].value.exact_form == "log(3)"
    assert sorted(by_t["inf"].factors) == ["2", "2", "3"]
    assert by_t["1"].value.exact_form == "log(12)"
    assert by_t["1/2"].value.exact_form == "log(12)"


def test_tmetric_rank1_endpoint(client):
    r = client.post("/tmetric", json={"field": 2, "alpha": "2", "t": ["inf"]})
    assert r.status_code == 200
    entry = r.json()["results"][0]
    assert entry["factors"] == ["sqrt(2)", "sqrt(2)"]
    r = client.post("/tmetric", json={"field": 2, "alpha": "2", "t": ["1"]})
    assert r.status_code == 400  # finite t unsupported over real quadratic fields


def test_verify_endpoint(client):
    r = client.post("/verify", json={"suite": "units"})
    assert r.status_code == 200
    body = r.json()
    assert body["passed"] and body["checked"] > 0
    r = client.post("/verify", json={"suite": "nope"})
    assert r.status_code == 400


def test_domain_errors_are_400(client):
    for payload in (
        {"field": "Q", "expr": "0"},
        {"field": 12, "expr": "1"},  # d not squarefree
        {"field": "Q", "expr": "garbage$"},
    ):
        r = client.post("/element/height", json=payload)
        assert r.status_code == 400, payload
        assert "error" in r.json()


def test_validation_errors_are_422(client):
    r = client.post("/element/height", json={"field": "Q"})
    assert r.status_code == 422


def test_json_determinism(client):
    a = client.post("/tmetric", json={"field": "Q", "alpha": "40", "t": ["2"]})
    b = client.post("/tmetric", json={"field": "Q", "alpha": "40", "t": ["2"]})
    assert a.text == b.text
