/**
 * Thin typed client for the /api endpoints. Each kind of request runs on a
 * named channel, and starting a new request on a channel aborts the one still
 * in flight, so a burst of state changes can never paint stale data over
 * fresh data.
 */

import type { ViewState } from "./state.js";
import type {
  ApiErrorBody,
  EventRecord,
  GroupRow,
  HealthInfo,
  Page,
  TimeSeriesPoint,
  TrendingTag,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export function isAbort(err: unknown): boolean {
  return err instanceof DOMException && err.name === "AbortError";
}

function spanParams(state: ViewState): Record<string, string> {
  const params: Record<string, string> = {};
  if (state.from !== null) params.from = state.from;
  if (state.to !== null) params.to = state.to;
  return params;
}

export class ApiClient {
  private inflight = new Map<string, AbortController>();

  constructor(private base = "") {}

  private async get<T>(channel: string, path: string, params: Record<string, string>): Promise<T> {
    this.inflight.get(channel)?.abort();
    const controller = new AbortController();
    this.inflight.set(channel, controller);
    const query = new URLSearchParams(params).toString();
    const url = this.base + path + (query ? `?${query}` : "");
    const response = await fetch(url, { signal: controller.signal });
    let body: unknown;
    try {
      body = await response.json();
    } catch {
      throw new ApiError("bad_response", `non-JSON response from ${path}`, response.status);
    }
    if (!response.ok) {
      const envelope = body as Partial<ApiErrorBody>;
      throw new ApiError(
        envelope.error?.code ?? "http_error",
        envelope.error?.message ?? `request to ${path} failed`,
        response.status,
      );
    }
    return body as T;
  }

  health(): Promise<HealthInfo> {
    return this.get("health", "/api/health", {});
  }

  events(state: ViewState, limit: number, offset: number): Promise<Page<EventRecord | GroupRow>> {
    const params = spanParams(state);
    if (state.keyword !== "") params.q = state.keyword;
    params.group_by = state.groupBy;
    params.limit = String(limit);
    params.offset = String(offset);
    return this.get("events", "/api/events", params);
  }

  eventDetail(label: string): Promise<EventRecord> {
    return this.get("detail", `/api/events/${encodeURIComponent(label)}`, {});
  }

  timeseries(state: ViewState, bucketHours: number): Promise<TimeSeriesPoint[]> {
    const params = spanParams(state);
    params.metric = state.metric;
    params.bucket_hours = String(bucketHours);
    return this.get("timeseries", "/api/timeseries", params);
  }

  trendingTags(state: ViewState, k: number): Promise<{ tags: TrendingTag[] }> {
    const params = spanParams(state);
    params.k = String(k);
    return this.get("tags", "/api/trending-tags", params);
  }
}
