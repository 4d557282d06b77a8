/**
 * Dashboard shell: wires the controls, event list, detail panel and metric
 * chart to the HTTP API. The rules it lives by:
 *
 *  - the URL query string is the whole view state (see state.ts), kept in
 *    sync on every change so the current view is always linkable;
 *  - each user action triggers exactly one request per panel it affects,
 *    with keyword input debounced;
 *  - a newer request on the same channel supersedes the older one (the API
 *    client aborts it), so responses never arrive out of order;
 *  - metric values are rendered exactly as the API sent them — the UI does
 *    no arithmetic on scores.
 */

import { ApiClient, ApiError, isAbort } from "./api.js";
import { chartMarkup } from "./chart.js";
import {
  DEFAULT_STATE,
  GROUPINGS,
  METRICS,
  decodeState,
  encodeState,
  isValidTimestamp,
  type ViewState,
} from "./state.js";
import { isGroupRow, type EventRecord, type GroupRow, type TrendingTag } from "./types.js";

export interface AppOptions {
  debounceMs?: number;
  pageSize?: number;
  bucketHours?: number;
}

export interface AppHandle {
  state(): ViewState;
  /** Resolves once every request started so far has settled and rendered. */
  whenIdle(): Promise<void>;
  refresh(): void;
}

const SKELETON = `
<header class="topbar">
  <h1>newslens</h1>
  <span id="revision" class="revision"></span>
</header>
<div id="warnings" class="warnings" hidden></div>
<div id="banner" class="banner"></div>
<form class="controls" autocomplete="off">
  <label>group by
    <select id="group-select"></select>
  </label>
  <label>keyword
    <input id="search-input" type="search" placeholder="filter events">
  </label>
  <label>from
    <input id="from-input" type="datetime-local" step="1">
  </label>
  <label>to
    <input id="to-input" type="datetime-local" step="1">
  </label>
  <label>metric
    <select id="metric-select"></select>
  </label>
</form>
<section id="tags-panel" class="tags-panel"></section>
<div class="layout">
  <section id="list-panel" class="list-panel" aria-live="polite"></section>
  <aside id="detail-panel" class="detail-panel" hidden></aside>
</div>
<section id="chart-panel" class="chart-panel"></section>
`;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className !== undefined) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** "2025-06-01T08:00:00Z" -> value usable in a datetime-local input. */
function toInputValue(ts: string | null): string {
  return ts === null ? "" : ts.replace("Z", "");
}

/** datetime-local value ("YYYY-MM-DDTHH:MM[:SS]") -> canonical timestamp. */
function fromInputValue(value: string): string | null {
  if (value === "") return null;
  const canonical = value.length === 16 ? `${value}:00Z` : `${value}Z`;
  return isValidTimestamp(canonical) ? canonical : null;
}

export function boot(root: HTMLElement, api: ApiClient, options: AppOptions = {}): AppHandle {
  const debounceMs = options.debounceMs ?? 250;
  const pageSize = options.pageSize ?? 50;
  const bucketHours = options.bucketHours ?? 24;

  root.innerHTML = SKELETON;
  const pick = <T extends HTMLElement>(id: string) => root.querySelector(`#${id}`) as T;
  const groupSelect = pick<HTMLSelectElement>("group-select");
  const searchInput = pick<HTMLInputElement>("search-input");
  const fromInput = pick<HTMLInputElement>("from-input");
  const toInput = pick<HTMLInputElement>("to-input");
  const metricSelect = pick<HTMLSelectElement>("metric-select");
  const warningsBox = pick<HTMLDivElement>("warnings");
  const banner = pick<HTMLDivElement>("banner");
  const tagsPanel = pick<HTMLElement>("tags-panel");
  const listPanel = pick<HTMLElement>("list-panel");
  const detailPanel = pick<HTMLElement>("detail-panel");
  const chartPanel = pick<HTMLElement>("chart-panel");

  for (const g of GROUPINGS) {
    const option = el("option", undefined, g);
    option.value = g;
    groupSelect.append(option);
  }
  for (const m of METRICS) {
    const option = el("option", undefined, m);
    option.value = m;
    metricSelect.append(option);
  }

  const decoded = decodeState(window.location.search);
  let state: ViewState = decoded.state;
  let offset = 0;
  let pending = 0;

  if (decoded.warnings.length > 0) {
    warningsBox.hidden = false;
    for (const w of decoded.warnings) warningsBox.append(el("p", "warning", w));
  }

  function syncControls(): void {
    groupSelect.value = state.groupBy;
    searchInput.value = state.keyword;
    fromInput.value = toInputValue(state.from);
    toInput.value = toInputValue(state.to);
    metricSelect.value = state.metric;
  }

  function syncUrl(): void {
    const query = encodeState(state);
    const url = query === "" ? window.location.pathname : `${window.location.pathname}?${query}`;
    window.history.replaceState(null, "", url);
  }

  function track(work: Promise<void>): void {
    pending += 1;
    void work.finally(() => {
      pending -= 1;
    });
  }

  async function whenIdle(): Promise<void> {
    // Requests settle through microtasks only, so draining the microtask
    // queue until the counter clears is enough — no timers involved.
    while (pending > 0) await Promise.resolve();
    await Promise.resolve();
    await Promise.resolve();
  }

  function clearBanner(source: string): void {
    if (banner.dataset.source === source) {
      banner.replaceChildren();
      delete banner.dataset.source;
    }
  }

  function showError(source: string, err: unknown, retry: () => void): void {
    const message =
      err instanceof ApiError ? `${err.code}: ${err.message}` : err instanceof Error ? err.message : String(err);
    const box = el("div", "error-banner");
    box.setAttribute("role", "alert");
    box.append(el("span", "error-message", message));
    const button = el("button", "retry", "retry");
    button.type = "button";
    button.addEventListener("click", () => {
      banner.replaceChildren();
      delete banner.dataset.source;
      retry();
    });
    box.append(button);
    banner.replaceChildren(box);
    banner.dataset.source = source;
  }

  function metricSpan(name: string, value: number): HTMLElement {
    const span = el("span", "metric");
    span.dataset.metric = name;
    span.append(el("span", "metric-name", name), el("span", "metric-value", String(value)));
    return span;
  }

  function renderEventCard(record: EventRecord): HTMLElement {
    const card = el("article", "event-card");
    card.dataset.label = record.label;
    if (record.label === state.selected) card.classList.add("selected");

    const head = el("header", "event-head");
    head.append(el("h3", "event-title", record.title), el("span", "event-id", record.label));
    if (record.community?.flagged) {
      head.append(
        el("span", "badge badge-flagged", `coordinated activity · ${record.community.users.length} accounts`),
      );
    }
    card.append(head);

    card.append(
      el(
        "div",
        "event-span",
        `${record.first_seen} → ${record.last_seen} · ${record.article_ids.length} article(s)`,
      ),
    );

    const tags = el("div", "event-tags");
    for (const [term, weight] of record.tags) {
      const chip = el("span", "tag-chip", term);
      chip.title = String(weight);
      tags.append(chip);
    }
    card.append(tags);

    if (record.metrics) {
      const line = el("div", "event-metrics");
      line.append(
        metricSpan("suspicion", record.metrics.suspicion),
        metricSpan("sentiment", record.metrics.sentiment),
        metricSpan("popularity_articles", record.metrics.popularity_articles),
        metricSpan("popularity_discussions", record.metrics.popularity_discussions),
      );
      card.append(line);
    }

    card.addEventListener("click", () => selectEvent(record.label));
    return card;
  }

  function renderGroupTable(rows: GroupRow[]): HTMLElement {
    const table = el("table", "group-table");
    const head = el("thead");
    const headRow = el("tr");
    for (const column of [state.groupBy, "events", "articles", "mean suspicion"]) {
      headRow.append(el("th", undefined, column));
    }
    head.append(headRow);
    table.append(head);
    const body = el("tbody");
    for (const row of rows) {
      const tr = el("tr", "group-row");
      tr.dataset.key = row.key;
      tr.append(el("td", "group-key", row.key));
      tr.append(el("td", "group-events", String(row.event_count)));
      tr.append(el("td", "group-articles", String(row.article_count)));
      const mean = row.mean_metrics["suspicion"];
      tr.append(el("td", "group-suspicion", mean === undefined ? "—" : String(mean)));
      body.append(tr);
    }
    table.append(body);
    return table;
  }

  function renderPager(total: number, count: number): HTMLElement {
    const pager = el("div", "pager");
    const prev = el("button", "pager-prev", "newer");
    prev.type = "button";
    prev.disabled = offset === 0;
    prev.addEventListener("click", () => {
      offset = Math.max(0, offset - pageSize);
      refreshList();
    });
    const next = el("button", "pager-next", "older");
    next.type = "button";
    next.disabled = offset + count >= total;
    next.addEventListener("click", () => {
      offset += pageSize;
      refreshList();
    });
    const label = count === 0 ? `0 of ${total}` : `${offset + 1}–${offset + count} of ${total}`;
    pager.append(prev, el("span", "pager-label", label), next);
    return pager;
  }

  function refreshList(): void {
    listPanel.dataset.state = "loading";
    listPanel.replaceChildren(el("p", "loading", "loading…"));
    track(
      api
        .events(state, pageSize, offset)
        .then((page) => {
          clearBanner("events");
          listPanel.replaceChildren();
          if (page.items.length === 0) {
            listPanel.dataset.state = "empty";
            listPanel.append(el("p", "empty", "no events in range"));
            return;
          }
          listPanel.dataset.state = "ready";
          const groupRows = page.items.filter(isGroupRow);
          if (groupRows.length > 0) {
            listPanel.append(renderGroupTable(groupRows));
          } else {
            for (const item of page.items as EventRecord[]) listPanel.append(renderEventCard(item));
          }
          listPanel.append(renderPager(page.total, page.items.length));
        })
        .catch((err) => {
          if (isAbort(err)) return;
          listPanel.dataset.state = "error";
          listPanel.replaceChildren(el("p", "empty", "event list unavailable"));
          showError("events", err, refreshList);
        }),
    );
  }

  function refreshChart(): void {
    chartPanel.dataset.state = "loading";
    track(
      api
        .timeseries(state, bucketHours)
        .then((points) => {
          clearBanner("timeseries");
          chartPanel.dataset.state = points.length === 0 ? "empty" : "ready";
          chartPanel.innerHTML = `<h2 class="chart-title">${state.metric} over time</h2>${chartMarkup(points)}`;
        })
        .catch((err) => {
          if (isAbort(err)) return;
          chartPanel.dataset.state = "error";
          showError("timeseries", err, refreshChart);
        }),
    );
  }

  function refreshTags(): void {
    track(
      api
        .trendingTags(state, 12)
        .then(({ tags }) => {
          clearBanner("tags");
          tagsPanel.replaceChildren();
          for (const tag of tags) tagsPanel.append(renderTrendingTag(tag));
        })
        .catch((err) => {
          if (isAbort(err)) return;
          showError("tags", err, refreshTags);
        }),
    );
  }

  function renderTrendingTag(tag: TrendingTag): HTMLElement {
    const chip = el("button", "trend-chip", `${tag.tag} (${tag.events})`);
    chip.type = "button";
    chip.addEventListener("click", () => {
      state = { ...state, keyword: tag.tag };
      offset = 0;
      syncControls();
      syncUrl();
      refreshList();
    });
    return chip;
  }

  function refreshDetail(): void {
    if (state.selected === null) {
      detailPanel.hidden = true;
      detailPanel.replaceChildren();
      return;
    }
    const label = state.selected;
    detailPanel.hidden = false;
    detailPanel.replaceChildren(el("p", "loading", "loading…"));
    track(
      api
        .eventDetail(label)
        .then((record) => {
          clearBanner("detail");
          renderDetail(record);
        })
        .catch((err) => {
          if (isAbort(err)) return;
          detailPanel.replaceChildren(el("p", "empty", "event unavailable"));
          showError("detail", err, refreshDetail);
        }),
    );
  }

  function renderDetail(record: EventRecord): void {
    detailPanel.replaceChildren();
    const close = el("button", "detail-close", "close");
    close.type = "button";
    close.addEventListener("click", () => selectEvent(null));
    detailPanel.append(close);
    detailPanel.append(el("h2", "detail-title", record.title));
    detailPanel.append(el("p", "event-id", record.label));
    detailPanel.append(el("p", "event-span", `${record.first_seen} → ${record.last_seen}`));

    const articles = el("ul", "detail-articles");
    for (const id of record.article_ids) articles.append(el("li", undefined, id));
    detailPanel.append(el("h4", undefined, `articles (${record.article_ids.length})`), articles);

    if (record.metrics) {
      const list = el("dl", "detail-metrics");
      for (const [name, value] of Object.entries(record.metrics)) {
        list.append(el("dt", undefined, name));
        const dd = el("dd", undefined, String(value));
        dd.dataset.metric = name;
        list.append(dd);
      }
      detailPanel.append(el("h4", undefined, "scores"), list);
    }

    if (record.community) {
      const section = el("div", "detail-community");
      if (record.community.flagged) {
        section.append(el("span", "badge badge-flagged", "coordinated activity"));
      }
      const facts = el("p", "community-facts");
      facts.textContent =
        `density ${record.community.density} · ` +
        `repeated-phrase ratio ${record.community.bot_phrase_ratio} · ` +
        `${record.community.users.length} account(s)`;
      section.append(facts);
      if (record.community.users.length > 0) {
        const users = el("ul", "community-users");
        for (const user of record.community.users) users.append(el("li", undefined, user));
        section.append(users);
      }
      detailPanel.append(el("h4", undefined, "discussion community"), section);
    }
  }

  function selectEvent(label: string | null): void {
    if (state.selected === label) return;
    state = { ...state, selected: label };
    syncUrl();
    for (const card of listPanel.querySelectorAll(".event-card")) {
      card.classList.toggle("selected", (card as HTMLElement).dataset.label === label);
    }
    refreshDetail();
  }

  let debounceTimer: ReturnType<typeof setTimeout> | undefined;
  searchInput.addEventListener("input", () => {
    clearTimeout(debounceTimer);
    debounceTimer = setTimeout(() => {
      if (searchInput.value === state.keyword) return;
      state = { ...state, keyword: searchInput.value };
      offset = 0;
      syncUrl();
      refreshList();
    }, debounceMs);
  });

  groupSelect.addEventListener("change", () => {
    state = { ...state, groupBy: groupSelect.value as ViewState["groupBy"] };
    offset = 0;
    syncUrl();
    refreshList();
  });

  function onSpanChange(): void {
    const from = fromInputValue(fromInput.value);
    const to = fromInputValue(toInput.value);
    if (from !== null && to !== null && Date.parse(from) > Date.parse(to)) {
      warningsBox.hidden = false;
      warningsBox.replaceChildren(el("p", "warning", "span start is after its end; change ignored"));
      syncControls();
      return;
    }
    warningsBox.hidden = true;
    state = { ...state, from, to };
    offset = 0;
    syncUrl();
    refreshList();
    refreshChart();
    refreshTags();
  }
  fromInput.addEventListener("change", onSpanChange);
  toInput.addEventListener("change", onSpanChange);

  metricSelect.addEventListener("change", () => {
    state = { ...state, metric: metricSelect.value as ViewState["metric"] };
    syncUrl();
    refreshChart();
  });

  function refresh(): void {
    refreshList();
    refreshChart();
    refreshTags();
    refreshDetail();
  }

  syncControls();
  syncUrl();
  track(
    api
      .health()
      .then((info) => {
        pick<HTMLSpanElement>("revision").textContent = `store revision ${info.revision}`;
      })
      .catch(() => {
        /* banner would be noise; the panels surface real failures */
      }),
  );
  refresh();

  return {
    state: () => ({ ...state }),
    whenIdle,
    refresh,
  };
}

export { DEFAULT_STATE };
