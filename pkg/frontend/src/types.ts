/**
 * Shapes of the JSON payloads served under /api. These mirror the server's
 * serialization exactly; the UI never derives or recomputes metric values,
 * it only displays what arrives here.
 */

export interface MetricScores {
  incitement: number;
  bias: number;
  subjectivity: number;
  sentiment: number;
  suspicion: number;
  popularity_articles: number;
  popularity_discussions: number;
}

export interface CommunityReport {
  event_label: string;
  users: string[];
  density: number;
  flagged: boolean;
  bot_phrase_ratio: number;
}

export interface EventRecord {
  label: string;
  title: string;
  article_ids: string[];
  first_seen: string;
  last_seen: string;
  /** [term, weight] pairs, already ranked by the server. */
  tags: [string, number][];
  metrics?: MetricScores;
  community?: CommunityReport;
}

/** One row of a grouped /api/events response (group_by=media or opinion). */
export interface GroupRow {
  key: string;
  event_count: number;
  article_count: number;
  mean_metrics: Record<string, number>;
}

export interface Page<T> {
  items: T[];
  total: number;
  limit: number;
  offset: number;
}

export interface TimeSeriesPoint {
  bucket_start: string;
  scope: string | null;
  metric: string;
  value: number;
}

export interface TrendingTag {
  tag: string;
  events: number;
}

export interface HealthInfo {
  status: string;
  revision: number;
}

export interface ApiErrorBody {
  error: { code: string; message: string };
}

export function isGroupRow(item: EventRecord | GroupRow): item is GroupRow {
  return "key" in item && !("label" in item);
}
