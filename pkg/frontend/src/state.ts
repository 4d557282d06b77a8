/**
 * The whole dashboard view is one small state record, and every state is
 * round-trippable through the URL query string so any view can be shared as
 * a link. Decoding is defensive: a malformed value falls back to its default
 * and produces a warning instead of breaking the page.
 */

export const GROUPINGS = ["events", "media", "opinion"] as const;
export type Grouping = (typeof GROUPINGS)[number];

export const METRICS = [
  "incitement",
  "bias",
  "subjectivity",
  "sentiment",
  "suspicion",
  "popularity_articles",
  "popularity_discussions",
] as const;
export type MetricName = (typeof METRICS)[number];

export interface ViewState {
  groupBy: Grouping;
  keyword: string;
  /** Inclusive time span, canonical `YYYY-MM-DDTHH:MM:SSZ` or null for open. */
  from: string | null;
  to: string | null;
  /** Event label opened in the detail panel, if any. */
  selected: string | null;
  /** Metric plotted in the time-series chart. */
  metric: MetricName;
}

export const DEFAULT_STATE: ViewState = {
  groupBy: "events",
  keyword: "",
  from: null,
  to: null,
  selected: null,
  metric: "suspicion",
};

const TIMESTAMP_RE = /^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z$/;
const EVENT_LABEL_RE = /^ev-\d{6}$/;

export function isValidTimestamp(value: string): boolean {
  if (!TIMESTAMP_RE.test(value)) return false;
  const ms = Date.parse(value);
  if (!Number.isFinite(ms)) return false;
  // Date.parse rolls invalid days over (Feb 30 -> Mar 2); the server does
  // not, so only accept strings that survive a parse/format round trip.
  return new Date(ms).toISOString() === value.replace("Z", ".000Z");
}

/** Serialize to a query string; fields at their default value are omitted. */
export function encodeState(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.groupBy !== DEFAULT_STATE.groupBy) params.set("group", state.groupBy);
  if (state.keyword !== "") params.set("q", state.keyword);
  if (state.from !== null) params.set("from", state.from);
  if (state.to !== null) params.set("to", state.to);
  if (state.selected !== null) params.set("event", state.selected);
  if (state.metric !== DEFAULT_STATE.metric) params.set("metric", state.metric);
  return params.toString();
}

export interface DecodeResult {
  state: ViewState;
  warnings: string[];
}

/**
 * Parse a query string (with or without the leading "?") back into a state.
 * Invalid values never throw: each falls back to the default for its field
 * and adds one warning. An inverted time span drops both bounds.
 */
export function decodeState(search: string): DecodeResult {
  const params = new URLSearchParams(search.startsWith("?") ? search.slice(1) : search);
  const state: ViewState = { ...DEFAULT_STATE };
  const warnings: string[] = [];

  const group = params.get("group");
  if (group !== null) {
    if ((GROUPINGS as readonly string[]).includes(group)) {
      state.groupBy = group as Grouping;
    } else {
      warnings.push(`ignoring group=${group!}: expected one of ${GROUPINGS.join(", ")}`);
    }
  }

  const keyword = params.get("q");
  if (keyword !== null) state.keyword = keyword;

  for (const field of ["from", "to"] as const) {
    const raw = params.get(field);
    if (raw === null) continue;
    if (isValidTimestamp(raw)) {
      state[field] = raw;
    } else {
      warnings.push(`ignoring ${field}=${raw}: expected YYYY-MM-DDTHH:MM:SSZ`);
    }
  }
  if (state.from !== null && state.to !== null && Date.parse(state.from) > Date.parse(state.to)) {
    warnings.push(`ignoring time span: from=${state.from} is after to=${state.to}`);
    state.from = null;
    state.to = null;
  }

  const selected = params.get("event");
  if (selected !== null) {
    if (EVENT_LABEL_RE.test(selected)) {
      state.selected = selected;
    } else {
      warnings.push(`ignoring event=${selected}: not an event label`);
    }
  }

  const metric = params.get("metric");
  if (metric !== null) {
    if ((METRICS as readonly string[]).includes(metric)) {
      state.metric = metric as MetricName;
    } else {
      warnings.push(`ignoring metric=${metric}: expected one of ${METRICS.join(", ")}`);
    }
  }

  return { state, warnings };
}
