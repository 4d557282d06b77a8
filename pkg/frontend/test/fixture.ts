/**
 * In-memory stand-in for the HTTP API: replaces global fetch with a router
 * over canned handlers, records every call, and honours abort signals so the
 * client's supersede behaviour can be exercised without a server.
 */

import type { EventRecord, GroupRow, Page, TimeSeriesPoint } from "../src/types.js";

export class HttpStub extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export type RouteHandler = (params: URLSearchParams) => unknown;

export interface RecordedCall {
  path: string;
  params: URLSearchParams;
}

export interface FixtureApi {
  calls: RecordedCall[];
  callsTo(path: string): RecordedCall[];
  setRoute(path: string, handler: RouteHandler): void;
  /** Delay responses on one path by `ms` (real timers). */
  setDelay(path: string, ms: number): void;
  restore(): void;
}

function abortError(): DOMException {
  return new DOMException("the request was aborted", "AbortError");
}

function sleep(ms: number, signal: AbortSignal | null | undefined): Promise<void> {
  return new Promise((resolve, reject) => {
    const timer = setTimeout(() => resolve(), ms);
    signal?.addEventListener("abort", () => {
      clearTimeout(timer);
      reject(abortError());
    });
  });
}

export function installFixtureApi(routes: Record<string, RouteHandler>): FixtureApi {
  const table = new Map(Object.entries(routes));
  const delays = new Map<string, number>();
  const calls: RecordedCall[] = [];
  const realFetch = globalThis.fetch;

  globalThis.fetch = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = new URL(String(input), "http://fixture.test");
    const signal = init?.signal;
    if (signal?.aborted) throw abortError();
    calls.push({ path: url.pathname, params: url.searchParams });

    const delay = delays.get(url.pathname);
    if (delay !== undefined) await sleep(delay, signal);
    if (signal?.aborted) throw abortError();

    const handler = table.get(url.pathname);
    const json = (status: number, body: unknown) =>
      new Response(JSON.stringify(body), {
        status,
        headers: { "content-type": "application/json" },
      });
    if (handler === undefined) {
      return json(404, { error: { code: "not_found", message: `no route ${url.pathname}` } });
    }
    try {
      return json(200, handler(url.searchParams));
    } catch (err) {
      if (err instanceof HttpStub) {
        return json(err.status, { error: { code: err.code, message: err.message } });
      }
      throw err;
    }
  }) as typeof fetch;

  return {
    calls,
    callsTo: (path) => calls.filter((c) => c.path === path),
    setRoute: (path, handler) => void table.set(path, handler),
    setDelay: (path, ms) => void delays.set(path, ms),
    restore: () => {
      globalThis.fetch = realFetch;
    },
  };
}

// --- canned payloads ------------------------------------------------------

export function makeEvent(index: number, overrides: Partial<EventRecord> = {}): EventRecord {
  const label = `ev-${String(index).padStart(6, "0")}`;
  return {
    label,
    title: `fixture event ${index}`,
    article_ids: [`a-${index}-1`, `a-${index}-2`],
    first_seen: "2025-06-01T08:00:00Z",
    last_seen: "2025-06-02T16:00:00Z",
    tags: [
      ["river", 0.41],
      ["flood", 0.3],
    ],
    metrics: {
      incitement: 0.2,
      bias: 0.35,
      subjectivity: 0.5,
      sentiment: -0.25,
      suspicion: 0.12,
      popularity_articles: 2,
      popularity_discussions: 4,
    },
    community: {
      event_label: label,
      users: [],
      density: 0,
      flagged: false,
      bot_phrase_ratio: 0,
    },
    ...overrides,
  };
}

export const FLAGGED_EVENT: EventRecord = makeEvent(2, {
  title: "harbor strike talks stall",
  metrics: {
    incitement: 0.6,
    bias: 0.7,
    subjectivity: 0.8,
    sentiment: -0.6,
    suspicion: 0.91,
    popularity_articles: 5,
    popularity_discussions: 12,
  },
  community: {
    event_label: "ev-000002",
    users: ["u-09", "u-11", "u-14", "u-17"],
    density: 0.83,
    flagged: true,
    bot_phrase_ratio: 0.75,
  },
});

export const EVENTS_PAGE: Page<EventRecord> = {
  items: [
    makeEvent(1, { title: "river flood warning extended" }),
    FLAGGED_EVENT,
    makeEvent(3, { title: "observatory reopens", metrics: undefined, community: undefined }),
  ],
  total: 3,
  limit: 50,
  offset: 0,
};

export const MEDIA_PAGE: Page<GroupRow> = {
  items: [
    { key: "wire", event_count: 2, article_count: 5, mean_metrics: { suspicion: 0.4, bias: 0.5 } },
    { key: "rss", event_count: 1, article_count: 2, mean_metrics: { suspicion: 0.1, bias: 0.2 } },
  ],
  total: 2,
  limit: 50,
  offset: 0,
};

export function makePoints(metric: string, values: number[]): TimeSeriesPoint[] {
  return values.map((value, i) => ({
    bucket_start: `2025-06-0${i + 1}T00:00:00Z`,
    scope: null,
    metric,
    value,
  }));
}

export function defaultRoutes(): Record<string, RouteHandler> {
  return {
    "/api/health": () => ({ status: "ok", revision: 3 }),
    "/api/events": (params) => (params.get("group_by") === "media" ? MEDIA_PAGE : EVENTS_PAGE),
    "/api/events/ev-000002": () => FLAGGED_EVENT,
    "/api/timeseries": (params) => makePoints(params.get("metric") ?? "suspicion", [0.1, 0.2, 0.9, 0.3]),
    "/api/trending-tags": () => ({ tags: [{ tag: "flood", events: 2 }, { tag: "strike", events: 1 }] }),
  };
}
