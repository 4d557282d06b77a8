import { afterEach, describe, expect, it } from "vitest";

import { ApiClient, ApiError, isAbort } from "../src/api.js";
import { DEFAULT_STATE, type ViewState } from "../src/state.js";
import { EVENTS_PAGE, HttpStub, defaultRoutes, installFixtureApi, type FixtureApi } from "./fixture.js";

let fixture: FixtureApi;

afterEach(() => {
  fixture?.restore();
});

function filteredState(): ViewState {
  return {
    ...DEFAULT_STATE,
    keyword: "storm",
    groupBy: "media",
    from: "2025-06-01T00:00:00Z",
    to: "2025-06-08T00:00:00Z",
  };
}

describe("request construction", () => {
  it("sends the view state as documented query parameters", async () => {
    fixture = installFixtureApi(defaultRoutes());
    const client = new ApiClient();
    await client.events(filteredState(), 25, 50);

    const [call] = fixture.callsTo("/api/events");
    expect(call.params.get("q")).toBe("storm");
    expect(call.params.get("group_by")).toBe("media");
    expect(call.params.get("from")).toBe("2025-06-01T00:00:00Z");
    expect(call.params.get("to")).toBe("2025-06-08T00:00:00Z");
    expect(call.params.get("limit")).toBe("25");
    expect(call.params.get("offset")).toBe("50");
  });

  it("omits empty keyword and open time bounds", async () => {
    fixture = installFixtureApi(defaultRoutes());
    await new ApiClient().events(DEFAULT_STATE, 50, 0);

    const [call] = fixture.callsTo("/api/events");
    expect(call.params.has("q")).toBe(false);
    expect(call.params.has("from")).toBe(false);
    expect(call.params.has("to")).toBe(false);
  });

  it("passes metric and bucket size to the timeseries endpoint", async () => {
    fixture = installFixtureApi(defaultRoutes());
    await new ApiClient().timeseries({ ...DEFAULT_STATE, metric: "bias" }, 6);

    const [call] = fixture.callsTo("/api/timeseries");
    expect(call.params.get("metric")).toBe("bias");
    expect(call.params.get("bucket_hours")).toBe("6");
  });
});

describe("error envelope", () => {
  it("surfaces code, message and status from the standard error body", async () => {
    fixture = installFixtureApi({
      "/api/events": () => {
        throw new HttpStub(400, "bad_limit", "limit must be <= 200");
      },
    });
    const attempt = new ApiClient().events(DEFAULT_STATE, 50, 0);
    await expect(attempt).rejects.toMatchObject({
      name: "ApiError",
      code: "bad_limit",
      message: "limit must be <= 200",
      status: 400,
    });
  });

  it("maps unknown routes to the not_found code", async () => {
    fixture = installFixtureApi({});
    const attempt = new ApiClient().eventDetail("ev-000404");
    await expect(attempt).rejects.toBeInstanceOf(ApiError);
    await expect(attempt).rejects.toMatchObject({ code: "not_found", status: 404 });
  });
});

describe("in-flight supersede", () => {
  it("aborts the older request when a newer one starts on the same channel", async () => {
    fixture = installFixtureApi(defaultRoutes());
    fixture.setDelay("/api/events", 25);
    const client = new ApiClient();

    const first = client.events(DEFAULT_STATE, 50, 0);
    const second = client.events({ ...DEFAULT_STATE, keyword: "later" }, 50, 0);

    const firstOutcome = await first.then(
      () => "resolved",
      (err) => (isAbort(err) ? "aborted" : "failed"),
    );
    expect(firstOutcome).toBe("aborted");
    await expect(second).resolves.toEqual(EVENTS_PAGE);
    expect(fixture.callsTo("/api/events")).toHaveLength(2);
  });

  it("leaves requests on other channels untouched", async () => {
    fixture = installFixtureApi(defaultRoutes());
    fixture.setDelay("/api/events", 15);
    const client = new ApiClient();

    const events = client.events(DEFAULT_STATE, 50, 0);
    const series = client.timeseries(DEFAULT_STATE, 24);

    await expect(series).resolves.toHaveLength(4);
    await expect(events).resolves.toEqual(EVENTS_PAGE);
  });
});
