"""HTTP API contract: shapes, pagination, error envelope, static hosting."""

from datetime import timedelta

import pytest
from fastapi.testclient import TestClient

from helpers import T0, make_article
from newslens.api import create_app
from newslens.store import Store
from test_store import make_event


@pytest.fixture()
def store(tmp_path):
    with Store(tmp_path) as s:
        yield s


@pytest.fixture()
def client(store):
    return TestClient(create_app(store))


def seed_events(store, count=5):
    for i in range(count):
        store.add_article(make_article(f"a{i:03d}", source=f"src-{i % 2}", hours=float(i)))
        store.upsert_event(make_event(
            f"ev-{i:06d}", hours=float(i), article_ids=(f"a{i:03d}",),
            tags=((f"tag{i}", 1.0), ("common", 0.5)), suspicion=(i % 10) / 10,
            discussions=i))


def test_health_reports_revision(client, store):
    assert client.get("/api/health").json() == {"status": "ok", "revision": 0}
    store.upsert_event(make_event("ev-000001"))
    body = client.get("/api/health").json()
    assert body["revision"] == 1


def test_events_list_shape(client, store):
    seed_events(store, 3)
    body = client.get("/api/events").json()
    assert body["total"] == 3
    assert body["limit"] == 50
    assert body["offset"] == 0
    first = body["items"][0]
    assert set(first) >= {"label", "title", "article_ids", "first_seen", "last_seen", "tags"}
    assert first["first_seen"].endswith("Z")


def test_events_pagination_walk_is_complete(client, store):
    seed_events(store, 12)
    seen = []
    offset = 0
    while True:
        body = client.get("/api/events", params={"limit": 5, "offset": offset}).json()
        seen.extend(item["label"] for item in body["items"])
        if offset + 5 >= body["total"]:
            break
        offset += 5
    assert sorted(seen) == [f"ev-{i:06d}" for i in range(12)]
    assert len(set(seen)) == 12


def test_events_time_filter_and_keyword(client, store):
    seed_events(store, 5)
    body = client.get("/api/events", params={
        "from": (T0 + timedelta(hours=3, minutes=30)).isoformat(),
    }).json()
    assert {item["label"] for item in body["items"]} == {
        # events whose span [i, i+4] hours still overlaps 3.5h onward
        "ev-000000", "ev-000001", "ev-000002", "ev-000003", "ev-000004"}
    body = client.get("/api/events", params={"q": "tag3"}).json()
    assert [item["label"] for item in body["items"]] == ["ev-000003"]


def test_events_group_by_media(client, store):
    seed_events(store, 6)
    body = client.get("/api/events", params={"group_by": "media"}).json()
    assert body["total"] == 2
    assert sum(row["article_count"] for row in body["items"]) == 6
    for row in body["items"]:
        assert set(row) == {"key", "event_count", "article_count", "mean_metrics"}


def test_events_group_by_opinion_ordering(client, store):
    seed_events(store, 4)
    body = client.get("/api/events", params={"group_by": "opinion"}).json()
    discussions = [item["metrics"]["popularity_discussions"] for item in body["items"]]
    assert discussions == sorted(discussions, reverse=True)


def test_event_detail_and_404(client, store):
    seed_events(store, 1)
    assert client.get("/api/events/ev-000000").json()["label"] == "ev-000000"
    response = client.get("/api/events/ev-999999")
    assert response.status_code == 404
    body = response.json()
    assert body["error"]["code"] == "not_found"
    assert "ev-999999" in body["error"]["message"]


def test_limit_cap_enforced(client, store):
    response = client.get("/api/events", params={"limit": 201})
    assert response.status_code == 400
    assert response.json()["error"]["code"] == "bad_limit"
    assert client.get("/api/events", params={"limit": 200}).status_code == 200
    assert client.get("/api/events", params={"limit": 0}).status_code == 400


def test_bad_timestamp_rejected(client):
    response = client.get("/api/events", params={"from": "yesterday"})
    assert response.status_code == 400
    assert response.json()["error"]["code"] == "bad_timestamp"


def test_from_after_to_rejected(client):
    response = client.get("/api/events", params={
        "from": "2025-06-02T00:00:00Z", "to": "2025-06-01T00:00:00Z"})
    assert response.status_code == 400
    assert response.json()["error"]["code"] == "bad_request"


def test_bad_group_by_rejected(client):
    response = client.get("/api/events", params={"group_by": "sideways"})
    assert response.status_code == 400


def test_non_integer_limit_rejected(client):
    response = client.get("/api/events", params={"limit": "many"})
    assert response.status_code == 400
    assert response.json()["error"]["code"] == "validation"


def test_timeseries_contract(client, store):
    seed_events(store, 2)
    body = client.get("/api/timeseries", params={
        "metric": "suspicion",
        "from": T0.isoformat(),
        "to": (T0 + timedelta(hours=6)).isoformat(),
        "bucket_hours": 24,
    }).json()
    assert len(body["points"]) == 1
    point = body["points"][0]
    assert set(point) == {"bucket_start", "scope", "metric", "value"}
    assert point["metric"] == "suspicion"
    assert point["value"] == pytest.approx((0.0 + 0.1) / 2)


def test_timeseries_unknown_metric_rejected(client, store):
    seed_events(store, 1)
    response = client.get("/api/timeseries", params={"metric": "charisma"})
    assert response.status_code == 400


def test_timeseries_bad_bucket_rejected(client):
    response = client.get("/api/timeseries", params={"metric": "suspicion", "bucket_hours": 0})
    assert response.status_code == 400
    assert response.json()["error"]["code"] == "bad_bucket"


def test_timeseries_missing_metric_param(client):
    response = client.get("/api/timeseries")
    assert response.status_code == 400
    assert response.json()["error"]["code"] == "validation"


def test_timeseries_open_ended_range_fast(client, store):
    seed_events(store, 3)
    import time
    started = time.perf_counter()
    body = client.get("/api/timeseries", params={"metric": "suspicion"}).json()
    elapsed = time.perf_counter() - started
    assert body["points"]
    assert elapsed < 0.5


def test_trending_tags_contract(client, store):
    seed_events(store, 4)
    body = client.get("/api/trending-tags", params={"limit": 3}).json()
    assert body["tags"][0] == {"tag": "common", "events": 4}
    assert len(body["tags"]) == 3


def test_trending_limit_cap(client):
    assert client.get("/api/trending-tags", params={"limit": 999}).status_code == 400


def test_unknown_route_wrapped_error(client):
    response = client.get("/api/nope")
    assert response.status_code == 404
    assert response.json()["error"]["code"] == "not_found"


def test_static_mount_serves_dashboard(store, tmp_path):
    static = tmp_path / "site"
    static.mkdir()
    (static / "index.html").write_text("<!doctype html><title>lens</title>", encoding="utf-8")
    client = TestClient(create_app(store, static_dir=static))
    response = client.get("/")
    assert response.status_code == 200
    assert "lens" in response.text
    # API routes still take priority
    assert client.get("/api/health").json()["status"] == "ok"


def test_read_your_writes_through_api(client, store):
    store.upsert_event(make_event("ev-000042", title="just written"))
    assert client.get("/api/events/ev-000042").json()["title"] == "just written"
    store.upsert_event(make_event("ev-000042", title="rewritten"))
    assert client.get("/api/events/ev-000042").json()["title"] == "rewritten"
