import { LabelServiceClient } from "./api.js";
import { SessionController } from "./session.js";
import { renderProgressPanel, renderQueryPanel } from "./ui.js";
import type { Label } from "./types.js";

// ?api=http://host:port points at a service on another origin (needs a
// proxy or CORS there); default is same-origin, e.g. behind serve.mjs
const params = new URLSearchParams(location.search);
const client = new LabelServiceClient(params.get("api") ?? "");

const LEARNERS = ["random_forest", "logistic", "gradient_boosting", "ensemble"];
const STRATEGIES = ["entropy", "uncertainty", "random", "isolation"];

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing #${id}`);
  return node;
}

function option(value: string): HTMLOptionElement {
  const o = document.createElement("option");
  o.value = value;
  o.textContent = value;
  return o;
}

function attach(controller: SessionController): void {
  location.hash = `s=${controller.sessionId}`;
  byId("setup").hidden = true;
  const queryRoot = byId("query");
  const progressRoot = byId("progress");
  controller.onView((view) =>
    renderQueryPanel(queryRoot, view, {
      onLabel: (label: Label) => void controller.submit(label),
    }),
  );
  controller.onMetrics((doc) => renderProgressPanel(progressRoot, doc));
  controller.startPolling();
  void controller.pollOnce();
}

async function boot(): Promise<void> {
  const status = byId("status");
  let datasets: string[];
  try {
    datasets = (await client.health()).datasets;
  } catch (err) {
    status.textContent =
      `cannot reach the labeling service: ${String(err)}. ` +
      "Start it with: netal serve --data <dir> --state <dir>";
    return;
  }
  status.textContent = "";

  const datasetSel = byId("dataset") as HTMLSelectElement;
  datasetSel.replaceChildren(...datasets.map(option));
  const learnerSel = byId("learner") as HTMLSelectElement;
  learnerSel.replaceChildren(...LEARNERS.map(option));
  const strategySel = byId("strategy") as HTMLSelectElement;
  strategySel.replaceChildren(...STRATEGIES.map(option));

  const hash = new URLSearchParams(location.hash.slice(1));
  const existing = hash.get("s");
  if (existing !== null) {
    attach(await SessionController.resume(client, existing));
    return;
  }

  const form = byId("create-form") as HTMLFormElement;
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const num = (id: string) =>
      Number((byId(id) as HTMLInputElement).value);
    status.textContent = "training initial model";
    SessionController.create(client, {
      dataset: datasetSel.value,
      learner: learnerSel.value,
      strategy: strategySel.value,
      seed: num("seed"),
      n_seed: num("n-seed"),
      budget: num("budget"),
      replay_assist: (byId("replay-assist") as HTMLInputElement).checked,
    }).then(
      (controller) => {
        status.textContent = "";
        attach(controller);
      },
      (err) => {
        status.textContent = `session failed: ${String(err)}`;
      },
    );
  });
}

void boot();
