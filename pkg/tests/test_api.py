"""HTTP API: the full game flow, error statuses, and schema closure."""

from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from wxbits.api import create_app, load_schema, validate_payload
from wxbits.engine import ContestEngine
from wxbits.errors import SchemaError

from test_baseline import CSV_HEADER, member_rows


@pytest.fixture
def client():
    return TestClient(create_app(ContestEngine()))


def members_csv(n=30) -> str:
    return CSV_HEADER + "".join(member_rows(n))


FUTURE_DAY = "2099-01-02"


def create_open_game(client, game_id="KOUN-1", day=FUTURE_DAY):
    r = client.post("/v1/games", json={"id": game_id, "site": "KOUN", "forecast_day": day})
    assert r.status_code == 201, r.text
    r = client.post(f"/v1/games/{game_id}/baseline", json={"members_csv": members_csv()})
    assert r.status_code == 200, r.text
    r = client.post(f"/v1/games/{game_id}/open")
    assert r.status_code == 200, r.text
    return game_id


def valid_submission() -> dict:
    return {
        "game1": {"temp_max": {"q50": [60, 40], "q90": [10, 90]}},
        "game2": {"temp_max": [10] * 10},
        "deterministic": {"temp_max": "67"},
    }


ALL_OBSERVATIONS = {
    "observations": {
        "temp_max": {"value": "71"},
        "temp_min": {"value": "48"},
        "wind_max": {"value": "18"},
        "precip_accum": {"value": "0.12"},
    }
}


def drive_to_verified(client, game_id="KOUN-1"):
    create_open_game(client, game_id)
    r = client.put(f"/v1/games/{game_id}/submissions/alice", json=valid_submission())
    assert r.status_code == 200, r.text
    assert client.post(f"/v1/games/{game_id}/lock").status_code == 200
    r = client.post(f"/v1/games/{game_id}/observations", json=ALL_OBSERVATIONS)
    assert r.status_code == 200, r.text
    r = client.post(f"/v1/games/{game_id}/verify")
    assert r.status_code == 200, r.text
    return r


class TestLifecycleEndpoints:
    def test_game_before_baseline_has_null_baseline(self, client):
        r = client.post("/v1/games", json={"id": "G", "site": "KOUN", "forecast_day": FUTURE_DAY})
        assert r.status_code == 201
        payload = client.get("/v1/games/G").json()
        assert payload["state"] == "draft"
        assert payload["baseline"] is None

    def test_baseline_payload_rendered_for_ui(self, client):
        create_open_game(client, "G")
        payload = client.get("/v1/games/G").json()
        assert payload["state"] == "open"
        assert set(payload["baseline"]) == {"temp_max", "temp_min", "wind_max", "precip_accum"}
        temp = payload["baseline"]["temp_max"]
        assert len(temp["thresholds"]) == 2
        assert len(temp["bins"]) == 10

    def test_submission_upsert_echoes_stored_state(self, client):
        create_open_game(client, "G")
        r = client.put("/v1/games/G/submissions/alice", json=valid_submission())
        assert r.status_code == 200
        echo = r.json()
        assert echo["player_id"] == "alice"
        assert echo["game1"]["temp_max"]["q50"] == [60, 40]
        replacement = valid_submission()
        replacement["game1"]["temp_max"]["q50"] = [70, 30]
        r = client.put("/v1/games/G/submissions/alice", json=replacement)
        assert r.json()["game1"]["temp_max"]["q50"] == [70, 30]

    def test_full_flow_produces_scores(self, client):
        r = drive_to_verified(client, "G")
        payload = r.json()
        assert payload["state"] == "verified"
        assert "alice" in payload["players"]
        assert any(rec["game"] == "game1" for rec in payload["records"])
        assert any(rec["game"] == "game2" for rec in payload["records"])
        assert payload["legacy"]

    def test_scores_get_matches_verify_output(self, client):
        verify_body = drive_to_verified(client, "G").content
        scores_body = client.get("/v1/games/G/scores").content
        assert verify_body == scores_body

    def test_leaderboard_and_diagnostics(self, client):
        drive_to_verified(client, "G")
        rows = client.get("/v1/leaderboard").json()["rows"]
        assert rows and rows[0]["player_id"] == "alice"
        diag = client.get("/v1/players/alice/diagnostics")
        assert diag.status_code == 200
        assert diag.json()["game1"]["decomposition"]["n_events"] >= 1


class TestErrorStatuses:
    def test_validation_error_is_400(self, client):
        create_open_game(client, "G")
        bad = valid_submission()
        bad["game1"]["temp_max"]["q50"] = [60, 39]  # sums to 99
        r = client.put("/v1/games/G/submissions/alice", json=bad)
        assert r.status_code == 400
        assert r.json()["code"] == "InvalidAllocation"

    def test_schema_violation_is_400(self, client):
        create_open_game(client, "G")
        bad = {"game1": {"temp_max": {"q50": [60, "x"]}}}
        r = client.put("/v1/games/G/submissions/alice", json=bad)
        assert r.status_code == 400
        assert r.json()["code"] == "SchemaError"

    def test_unknown_game_is_404(self, client):
        assert client.get("/v1/games/nope").status_code == 404
        r = client.post("/v1/games/nope/open")
        assert r.status_code == 404
        assert r.json()["code"] == "UnknownGame"

    def test_unknown_player_is_404(self, client):
        drive_to_verified(client, "G")
        assert client.get("/v1/players/nobody/diagnostics").status_code == 404

    def test_wrong_state_is_409(self, client):
        client.post("/v1/games", json={"id": "G", "site": "KOUN", "forecast_day": FUTURE_DAY})
        r = client.post("/v1/games/G/open")  # no baseline yet
        assert r.status_code == 409
        assert r.json()["code"] == "WrongState"

    def test_submission_before_open_is_409(self, client):
        client.post("/v1/games", json={"id": "G", "site": "KOUN", "forecast_day": FUTURE_DAY})
        r = client.put("/v1/games/G/submissions/alice", json=valid_submission())
        assert r.status_code == 409
        assert r.json()["code"] == "GameNotOpen"

    def test_submission_after_lock_is_423(self, client):
        create_open_game(client, "G")
        client.post("/v1/games/G/lock")
        r = client.put("/v1/games/G/submissions/alice", json=valid_submission())
        assert r.status_code == 423
        assert r.json()["code"] == "DeadlinePassed"

    def test_submission_after_deadline_is_423(self, client):
        # a game whose deadline is already in the past, but still "open"
        client.post(
            "/v1/games",
            json={"id": "G", "site": "KOUN", "forecast_day": "2000-01-02"},
        )
        client.post("/v1/games/G/baseline", json={"members_csv": members_csv()})
        client.post("/v1/games/G/open")
        r = client.put("/v1/games/G/submissions/alice", json=valid_submission())
        assert r.status_code == 423

    def test_verify_twice_is_409(self, client):
        drive_to_verified(client, "G")
        r = client.post("/v1/games/G/verify")
        assert r.status_code == 409
        assert r.json()["code"] == "AlreadyVerified"

    def test_verify_without_observations_is_400(self, client):
        create_open_game(client, "G")
        client.post("/v1/games/G/lock")
        r = client.post("/v1/games/G/verify")
        assert r.status_code == 400
        assert r.json()["code"] == "MissingObservation"

    def test_server_time_header_present(self, client):
        r = client.get("/v1/leaderboard")
        assert "X-Server-Time" in r.headers


class TestSchemaClosure:
    """Every GET payload re-validates against the schema the inputs use."""

    def test_game_payload(self, client):
        create_open_game(client, "G")
        validate_payload("game", client.get("/v1/games/G").json())

    def test_submission_echo(self, client):
        create_open_game(client, "G")
        body = valid_submission()
        validate_payload("submission", body)  # input side
        echo = client.put("/v1/games/G/submissions/alice", json=body).json()
        validate_payload("submission", echo)  # output side, same schema

    def test_scores_payload(self, client):
        drive_to_verified(client, "G")
        validate_payload("scores", client.get("/v1/games/G/scores").json())

    def test_leaderboard_payload(self, client):
        drive_to_verified(client, "G")
        validate_payload("leaderboard", client.get("/v1/leaderboard").json())

    def test_diagnostics_payload(self, client):
        drive_to_verified(client, "G")
        validate_payload(
            "diagnostics", client.get("/v1/players/alice/diagnostics").json()
        )

    def test_schemas_are_valid_2020_12(self):
        import jsonschema

        for name in ("game", "submission", "observations", "scores", "leaderboard", "diagnostics"):
            jsonschema.Draft202012Validator.check_schema(load_schema(name))

    def test_validator_rejects_garbage(self):
        with pytest.raises(SchemaError):
            validate_payload("submission", {"game2": {"temp_max": [10] * 9}})
