// @vitest-environment jsdom
import { describe, expect, it, vi } from "vitest";

import type { SessionView } from "../src/session.js";
import type { QueryDoc, SessionMetricsDoc } from "../src/types.js";
import {
  curveSvg,
  featureTable,
  renderProgressPanel,
  renderQueryPanel,
} from "../src/ui.js";

// the 41 original columns, as the service decodes them
const FEATURES: Record<string, string | number> = Object.fromEntries([
  ["duration", 0],
  ["protocol_type", "tcp"],
  ["service", "http"],
  ["flag", "SF"],
  ["src_bytes", 181],
  ["dst_bytes", 5450],
  ["land", 0],
  ["wrong_fragment", 0],
  ["urgent", 0],
  ["hot", 0],
  ["num_failed_logins", 0],
  ["logged_in", 1],
  ["num_compromised", 0],
  ["root_shell", 0],
  ["su_attempted", 0],
  ["num_root", 0],
  ["num_file_creations", 0],
  ["num_shells", 0],
  ["num_access_files", 0],
  ["num_outbound_cmds", 0],
  ["is_host_login", 0],
  ["is_guest_login", 0],
  ["count", 8],
  ["srv_count", 8],
  ["serror_rate", 0.0],
  ["srv_serror_rate", 0.0],
  ["rerror_rate", 0.0],
  ["srv_rerror_rate", 0.0],
  ["same_srv_rate", 1.0],
  ["diff_srv_rate", 0.0],
  ["srv_diff_host_rate", 0.0],
  ["dst_host_count", 9],
  ["dst_host_srv_count", 9],
  ["dst_host_same_srv_rate", 1.0],
  ["dst_host_diff_srv_rate", 0.0],
  ["dst_host_same_src_port_rate", 0.11],
  ["dst_host_srv_diff_host_rate", 0.0],
  ["dst_host_serror_rate", 0.0],
  ["dst_host_srv_serror_rate", 0.0],
  ["dst_host_rerror_rate", 0.0],
  ["dst_host_srv_rerror_rate", 0.0],
]);

function queryDoc(over: Partial<QueryDoc> = {}): QueryDoc {
  return {
    query_number: 3,
    record_index: 4711,
    features: FEATURES,
    model_probability: 0.47,
    strategy: "entropy",
    strategy_score: 0.9974,
    queries_remaining: 8,
    top_importances: [
      { feature: "src_bytes", weight: 0.31 },
      { feature: "count", weight: 0.22 },
    ],
    true_label: "normal",
    ...over,
  };
}

function labelingView(over: Partial<Extract<SessionView, { kind: "labeling" }>> = {}): SessionView {
  return {
    kind: "labeling",
    query: queryDoc(),
    queriesRemaining: 8,
    metrics: null,
    busy: false,
    error: null,
    ...over,
  };
}

function metricsDoc(over: Partial<SessionMetricsDoc> = {}): SessionMetricsDoc {
  return {
    schema: "netal-service-v1",
    session_id: "sid1",
    dataset: "neptune",
    status: "awaiting_label",
    learner: "random_forest",
    strategy: "entropy",
    labels_given: 2,
    queries_remaining: 8,
    feature_importances: null,
    initial: null,
    f1_curve: [
      [0, 0.82],
      [1, 0.9],
      [2, 0.95],
    ],
    events: [
      {
        query: 2,
        index: 9,
        score: 0.7,
        label: 1,
        f1: 0.95,
        precision: 1.0,
        recall: 0.9,
        tp: 18,
        fp: 0,
        fn: 2,
        tn: 40,
      },
    ],
    zscore: null,
    ...over,
  };
}

function root(): HTMLElement {
  const node = document.createElement("div");
  document.body.append(node);
  return node;
}

describe("query panel", () => {
  it("shows every original feature as a table row", () => {
    const node = root();
    renderQueryPanel(node, labelingView(), { onLabel: () => {} });
    expect(node.querySelectorAll("table.features tbody tr")).toHaveLength(41);
    expect(node.querySelector("h2")?.textContent).toBe("query #3");
    expect(node.textContent).toContain("8 of budget left");
    expect(node.textContent).toContain("p = 0.470");
  });

  it("label buttons report the chosen class", () => {
    const node = root();
    const onLabel = vi.fn();
    renderQueryPanel(node, labelingView(), { onLabel });
    (node.querySelector("button.label-attack") as HTMLButtonElement).click();
    (node.querySelector("button.label-normal") as HTMLButtonElement).click();
    expect(onLabel.mock.calls).toEqual([["attack"], ["normal"]]);
  });

  it("disables actions while a submit is in flight", () => {
    const node = root();
    renderQueryPanel(node, labelingView({ busy: true }), { onLabel: () => {} });
    const buttons = [...node.querySelectorAll("button")] as HTMLButtonElement[];
    expect(buttons.length).toBe(2);
    expect(buttons.every((b) => b.disabled)).toBe(true);
    expect(node.textContent).toContain("sending");
  });

  it("disables actions while the service retrains", () => {
    const node = root();
    renderQueryPanel(node, { kind: "retraining" }, { onLabel: () => {} });
    const buttons = [...node.querySelectorAll("button")] as HTMLButtonElement[];
    expect(buttons.every((b) => b.disabled)).toBe(true);
    expect(node.textContent).toContain("retraining");
  });

  it("keeps the retry affordance after a failed submit", () => {
    const node = root();
    renderQueryPanel(node, labelingView({ error: "fetch failed" }), {
      onLabel: () => {},
    });
    const buttons = [...node.querySelectorAll("button")] as HTMLButtonElement[];
    expect(buttons.every((b) => !b.disabled)).toBe(true);
    expect(node.textContent).toContain("fetch failed");
    expect(node.textContent).toContain("retry");
  });

  it("shows the closing banner once done", () => {
    const node = root();
    renderQueryPanel(node, { kind: "done" }, { onLabel: () => {} });
    expect(node.querySelectorAll("button")).toHaveLength(0);
    expect(node.textContent).toContain("budget spent");
  });
});

describe("progress panel", () => {
  it("draws one curve point per labeled query plus the initial model", () => {
    const node = root();
    renderProgressPanel(node, metricsDoc());
    const line = node.querySelector("polyline.curve");
    expect(line).not.toBeNull();
    expect(line!.getAttribute("points")!.trim().split(/\s+/)).toHaveLength(3);
    expect(node.textContent).toContain("2 labeled, 8 remaining");
    expect(node.textContent).toContain("dev F1 after 2 queries: 0.950");
  });

  it("falls back to a counter when metrics are hidden", () => {
    const node = root();
    renderProgressPanel(
      node,
      metricsDoc({ f1_curve: null, events: null, initial: null }),
    );
    expect(node.querySelector("svg")).toBeNull();
    expect(node.textContent).toContain("labeling blind");
  });

  it("freezes into a final summary when the session is done", () => {
    const node = root();
    renderProgressPanel(
      node,
      metricsDoc({ status: "done", queries_remaining: 0 }),
    );
    expect(node.textContent).toContain("final dev F1 0.950");
    expect(node.textContent).toContain("tp 18, fp 0, fn 2, tn 40");
    expect(node.textContent).toContain("random_forest, entropy");
  });
});

describe("building blocks", () => {
  it("feature table preserves service order", () => {
    const table = featureTable(queryDoc());
    const names = [...table.querySelectorAll("td.feat-name")].map(
      (td) => td.textContent,
    );
    expect(names[0]).toBe("duration");
    expect(names[names.length - 1]).toBe("dst_host_srv_rerror_rate");
  });

  it("curve svg scales F1 into the viewbox", () => {
    const svg = curveSvg(
      [
        [0, 0.0],
        [5, 1.0],
      ],
      420,
      160,
    );
    const pts = svg
      .querySelector("polyline.curve")!
      .getAttribute("points")!
      .split(" ")
      .map((p) => p.split(",").map(Number));
    expect(pts).toHaveLength(2);
    // higher F1 sits higher on screen (smaller y)
    expect(pts[1]![1]).toBeLessThan(pts[0]![1]);
  });
});
