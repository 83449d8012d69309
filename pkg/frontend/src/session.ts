import {
  ApiError,
  ConflictError,
  SessionDoneError,
} from "./api.js";
import type { LabelServiceApi } from "./api.js";
import type {
  CreateSessionRequest,
  Label,
  MetricsSummary,
  QueryDoc,
  SessionMetricsDoc,
} from "./types.js";

/**
 * What the page should show right now. The service owns all state; a
 * view is derived from its documents and can always be rebuilt.
 */
export type SessionView =
  | {
      kind: "labeling";
      query: QueryDoc;
      queriesRemaining: number;
      /** dev metrics after the last committed label (replay assist only) */
      metrics: MetricsSummary | null;
      /** a submit is in flight; actions must be disabled */
      busy: boolean;
      /** last transport failure, shown next to the retry affordance */
      error: string | null;
    }
  | { kind: "retraining" }
  | { kind: "done" };

export type ViewListener = (view: SessionView) => void;
export type MetricsListener = (doc: SessionMetricsDoc) => void;

/**
 * Drives one labeling session: holds the pending query, submits labels
 * with the query-number guard, and polls session metrics.
 *
 * Submit never relabels on conflict: a 409 means this tab's picture is
 * stale, so the controller refetches the server's pending query and
 * re-renders instead.
 */
export class SessionController {
  private view: SessionView;
  private viewListeners: ViewListener[] = [];
  private metricsListeners: MetricsListener[] = [];
  private timer: ReturnType<typeof setInterval> | null = null;

  private constructor(
    readonly client: LabelServiceApi,
    readonly sessionId: string,
    view: SessionView,
  ) {
    this.view = view;
  }

  static async create(
    client: LabelServiceApi,
    req: CreateSessionRequest,
  ): Promise<SessionController> {
    const doc = await client.createSession(req);
    const view: SessionView =
      doc.status === "done" || doc.query === null
        ? { kind: "done" }
        : {
            kind: "labeling",
            query: doc.query,
            queriesRemaining: doc.queries_remaining,
            metrics: doc.initial,
            busy: false,
            error: null,
          };
    return new SessionController(client, doc.session_id, view);
  }

  /** Rebuild the exact current view from the service, e.g. after a reload. */
  static async resume(
    client: LabelServiceApi,
    sessionId: string,
  ): Promise<SessionController> {
    let view: SessionView;
    try {
      const doc = await client.getQuery(sessionId);
      if (doc.status === "awaiting_label" && doc.query !== null) {
        const metrics = await client.getMetrics(sessionId);
        view = {
          kind: "labeling",
          query: doc.query,
          queriesRemaining: doc.query.queries_remaining,
          metrics: lastMetrics(metrics),
          busy: false,
          error: null,
        };
      } else {
        view = { kind: "retraining" };
      }
    } catch (err) {
      if (!(err instanceof SessionDoneError)) throw err;
      view = { kind: "done" };
    }
    return new SessionController(client, sessionId, view);
  }

  currentView(): SessionView {
    return this.view;
  }

  onView(fn: ViewListener): void {
    this.viewListeners.push(fn);
    fn(this.view);
  }

  onMetrics(fn: MetricsListener): void {
    this.metricsListeners.push(fn);
  }

  private setView(view: SessionView): void {
    this.view = view;
    for (const fn of this.viewListeners) fn(view);
  }

  /**
   * Label the pending query. No-op unless the view is labeling and
   * idle, so a double click cannot produce two requests; the server's
   * query-number check guards everything beyond this tab.
   */
  async submit(label: Label): Promise<void> {
    const view = this.view;
    if (view.kind !== "labeling" || view.busy) return;
    this.setView({ ...view, busy: true, error: null });
    try {
      const doc = await this.client.submitLabel(
        this.sessionId,
        view.query.query_number,
        label,
      );
      if (doc.status === "done" || doc.query === null) {
        this.setView({ kind: "done" });
      } else {
        this.setView({
          kind: "labeling",
          query: doc.query,
          queriesRemaining: doc.queries_remaining,
          metrics: doc.metrics,
          busy: false,
          error: null,
        });
      }
    } catch (err) {
      if (err instanceof ConflictError) {
        // stale view; fetch what the server actually wants labeled
        await this.refreshQuery();
      } else if (err instanceof SessionDoneError) {
        this.setView({ kind: "done" });
      } else if (err instanceof ApiError) {
        this.setView({ ...view, busy: false, error: err.message });
      } else {
        // network failure: keep the pending query, offer retry
        this.setView({ ...view, busy: false, error: String(err) });
      }
    }
  }

  /** Re-sync the pending query from the service. */
  async refreshQuery(): Promise<void> {
    try {
      const doc = await this.client.getQuery(this.sessionId);
      if (doc.status === "awaiting_label" && doc.query !== null) {
        const prior = this.view;
        this.setView({
          kind: "labeling",
          query: doc.query,
          queriesRemaining: doc.query.queries_remaining,
          metrics: prior.kind === "labeling" ? prior.metrics : null,
          busy: false,
          error: null,
        });
      } else {
        this.setView({ kind: "retraining" });
      }
    } catch (err) {
      if (!(err instanceof SessionDoneError)) throw err;
      this.setView({ kind: "done" });
    }
  }

  /**
   * Poll session metrics until the session is done. Human-paced loop,
   * sub-second retrains: polling beats push here.
   */
  startPolling(intervalMs = 1500): void {
    if (this.timer !== null) return;
    this.timer = setInterval(() => void this.pollOnce(), intervalMs);
  }

  stopPolling(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  async pollOnce(): Promise<void> {
    let doc: SessionMetricsDoc;
    try {
      doc = await this.client.getMetrics(this.sessionId);
    } catch {
      return; // transient; next tick retries
    }
    for (const fn of this.metricsListeners) fn(doc);
    if (doc.status === "done") {
      if (this.view.kind !== "done") this.setView({ kind: "done" });
      this.stopPolling(); // curve is frozen now
    } else if (this.view.kind === "retraining") {
      await this.refreshQuery();
    }
  }
}

function lastMetrics(doc: SessionMetricsDoc): MetricsSummary | null {
  if (doc.events !== null && doc.events.length > 0) {
    const ev = doc.events[doc.events.length - 1]!;
    return {
      f1: ev.f1,
      precision: ev.precision,
      recall: ev.recall,
      tp: ev.tp,
      fp: ev.fp,
      fn: ev.fn,
      tn: ev.tn,
    };
  }
  return doc.initial;
}
