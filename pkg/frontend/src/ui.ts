import type { SessionView } from "./session.js";
import type {
  Importance,
  Label,
  MetricsSummary,
  QueryDoc,
  SessionMetricsDoc,
} from "./types.js";

type Child = Node | string;

function el(
  tag: string,
  attrs: Record<string, string> = {},
  children: Child[] = [],
): HTMLElement {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  for (const c of children)
    node.append(typeof c === "string" ? document.createTextNode(c) : c);
  return node;
}

function fmt(x: number | null, digits = 3): string {
  return x === null ? "-" : x.toFixed(digits);
}

/** Table of all original feature columns, in service order. */
export function featureTable(query: QueryDoc): HTMLElement {
  const rows = Object.entries(query.features).map(([name, value]) =>
    el("tr", {}, [
      el("td", { class: "feat-name" }, [name]),
      el("td", { class: "feat-value" }, [String(value)]),
    ]),
  );
  return el("table", { class: "features" }, [
    el("thead", {}, [
      el("tr", {}, [el("th", {}, ["feature"]), el("th", {}, ["value"])]),
    ]),
    el("tbody", {}, rows),
  ]);
}

export function importanceList(imp: Importance[] | null): HTMLElement {
  if (imp === null || imp.length === 0)
    return el("p", { class: "importances-none" }, ["no importances exposed"]);
  const items = imp.map((e) =>
    el("li", {}, [`${e.feature} (${e.weight.toFixed(3)})`]),
  );
  return el("ol", { class: "importances" }, items);
}

export interface QueryActions {
  onLabel: (label: Label) => void;
}

/**
 * Draw the pending query with its two labeling actions. Actions are
 * disabled while a submit is in flight or the service is retraining.
 */
export function renderQueryPanel(
  root: HTMLElement,
  view: SessionView,
  actions: QueryActions,
): void {
  root.replaceChildren();
  if (view.kind === "done") {
    root.append(
      el("div", { class: "done-banner" }, [
        el("h2", {}, ["budget spent"]),
        el("p", {}, ["every query is labeled; the summary below is final"]),
      ]),
    );
    return;
  }
  if (view.kind === "retraining") {
    root.append(
      el("div", { class: "retraining" }, [
        el("p", { class: "spinner" }, ["retraining"]),
        button("label normal", "normal", true, actions),
        button("label attack", "attack", true, actions),
      ]),
    );
    return;
  }
  const q = view.query;
  const head = el("div", { class: "query-head" }, [
    el("h2", {}, [`query #${q.query_number}`]),
    el("span", { class: "remaining" }, [
      `${view.queriesRemaining} of budget left`,
    ]),
    el("span", { class: "strategy" }, [
      q.strategy_score === null
        ? q.strategy
        : `${q.strategy} score ${q.strategy_score.toFixed(4)}`,
    ]),
  ]);
  const prob = el("p", { class: "probability" }, [
    q.model_probability === null
      ? "model probability unavailable for this learner"
      : `model says attack with p = ${q.model_probability.toFixed(3)}`,
  ]);
  const controls = el("div", { class: "actions" }, [
    button("label normal", "normal", view.busy, actions),
    button("label attack", "attack", view.busy, actions),
  ]);
  if (view.busy) controls.append(el("span", { class: "spinner" }, ["sending"]));
  if (view.error !== null)
    controls.append(
      el("span", { class: "submit-error" }, [
        `${view.error} - pick a label to retry`,
      ]),
    );
  root.append(
    head,
    prob,
    controls,
    el("details", { class: "importances-box", open: "" }, [
      el("summary", {}, ["top feature importances"]),
      importanceList(q.top_importances),
    ]),
    featureTable(q),
  );
}

function button(
  text: string,
  label: Label,
  disabled: boolean,
  actions: QueryActions,
): HTMLButtonElement {
  const b = el("button", { class: `label-${label}` }, [text]) as HTMLButtonElement;
  b.disabled = disabled;
  b.addEventListener("click", () => actions.onLabel(label));
  return b;
}

/** Polyline chart of F1 against queries answered. */
export function curveSvg(
  points: [number, number][],
  width = 420,
  height = 160,
): SVGSVGElement {
  const ns = "http://www.w3.org/2000/svg";
  const svg = document.createElementNS(ns, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "f1-curve");
  const pad = 28;
  const maxQ = Math.max(1, ...points.map(([q]) => q));
  const x = (q: number) => pad + ((width - 2 * pad) * q) / maxQ;
  const y = (f1: number) => height - pad - (height - 2 * pad) * f1;
  const axis = document.createElementNS(ns, "path");
  axis.setAttribute(
    "d",
    `M ${pad} ${y(1)} L ${pad} ${y(0)} L ${x(maxQ)} ${y(0)}`,
  );
  axis.setAttribute("class", "axis");
  svg.append(axis);
  for (const tick of [0, 0.5, 1]) {
    const t = document.createElementNS(ns, "text");
    t.setAttribute("x", "2");
    t.setAttribute("y", String(y(tick) + 4));
    t.setAttribute("class", "tick");
    t.textContent = tick.toFixed(1);
    svg.append(t);
  }
  const line = document.createElementNS(ns, "polyline");
  line.setAttribute(
    "points",
    points.map(([q, f1]) => `${x(q)},${y(f1)}`).join(" "),
  );
  line.setAttribute("class", "curve");
  svg.append(line);
  return svg;
}

/**
 * Progress panel: a live F1 curve in replay-assist mode, otherwise the
 * labels-given counter the blind mode is limited to.
 */
export function renderProgressPanel(
  root: HTMLElement,
  doc: SessionMetricsDoc,
): void {
  root.replaceChildren();
  const head = el("div", { class: "progress-head" }, [
    el("h2", {}, ["progress"]),
    el("span", {}, [
      `${doc.labels_given} labeled, ${doc.queries_remaining} remaining`,
    ]),
  ]);
  root.append(head);
  if (doc.f1_curve !== null) {
    root.append(curveSvg(doc.f1_curve));
    const last = doc.f1_curve[doc.f1_curve.length - 1];
    if (last !== undefined)
      root.append(
        el("p", { class: "f1-now" }, [
          `dev F1 after ${last[0]} ${last[0] === 1 ? "query" : "queries"}: ${fmt(last[1])}`,
        ]),
      );
  } else {
    root.append(
      el("p", { class: "blind-note" }, [
        "labeling blind: metrics are hidden without replay assist",
      ]),
    );
  }
  if (doc.status === "done") {
    root.append(summaryBlock(doc));
  }
}

function summaryBlock(doc: SessionMetricsDoc): HTMLElement {
  const lines: HTMLElement[] = [];
  const events = doc.events;
  if (events !== null && events.length > 0) {
    const final = events[events.length - 1]!;
    lines.push(
      el("p", {}, [
        `final dev F1 ${fmt(final.f1)} ` +
          `(precision ${fmt(final.precision)}, recall ${fmt(final.recall)})`,
      ]),
      el("p", {}, [
        `confusion: tp ${final.tp}, fp ${final.fp}, fn ${final.fn}, tn ${final.tn}`,
      ]),
    );
  }
  lines.push(
    el("p", {}, [
      `${doc.labels_given} labels on ${doc.dataset} ` +
        `(${doc.learner}, ${doc.strategy})`,
    ]),
  );
  return el("div", { class: "final-summary" }, lines);
}
