import { afterEach, describe, expect, it, vi } from "vitest";

import {
  ApiError,
  ConflictError,
  LabelServiceClient,
  SessionDoneError,
} from "../src/api.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function stubFetch(response: Response) {
  const stub = vi.fn().mockResolvedValue(response);
  vi.stubGlobal("fetch", stub);
  return stub;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("request shaping", () => {
  it("health hits GET /health on the base url", async () => {
    const stub = stubFetch(
      jsonResponse(200, { schema: "s", status: "ok", datasets: ["neptune"], sessions: 0 }),
    );
    const client = new LabelServiceClient("http://svc:9");
    const doc = await client.health();
    expect(doc.datasets).toEqual(["neptune"]);
    expect(stub).toHaveBeenCalledWith(
      "http://svc:9/health",
      expect.objectContaining({ method: "GET", body: undefined }),
    );
  });

  it("createSession posts the request as json", async () => {
    const stub = stubFetch(jsonResponse(201, { session_id: "abc" }));
    const client = new LabelServiceClient();
    await client.createSession({ dataset: "smurf", budget: 5 });
    const [url, init] = stub.mock.calls[0]!;
    expect(url).toBe("/sessions");
    expect(init.method).toBe("POST");
    expect(init.headers).toEqual({ "Content-Type": "application/json" });
    expect(JSON.parse(init.body)).toEqual({ dataset: "smurf", budget: 5 });
  });

  it("submitLabel carries the query-number guard", async () => {
    const stub = stubFetch(jsonResponse(200, { status: "awaiting_label" }));
    const client = new LabelServiceClient();
    await client.submitLabel("id1", 7, "attack");
    const [url, init] = stub.mock.calls[0]!;
    expect(url).toBe("/sessions/id1/label");
    expect(JSON.parse(init.body)).toEqual({ query_number: 7, label: "attack" });
  });

  it("getQuery and getMetrics address the session", async () => {
    const stub = vi.fn().mockImplementation(() =>
      Promise.resolve(jsonResponse(200, {})),
    );
    vi.stubGlobal("fetch", stub);
    const client = new LabelServiceClient();
    await client.getQuery("deadbeef");
    await client.getMetrics("deadbeef");
    expect(stub.mock.calls.map((c) => c[0])).toEqual([
      "/sessions/deadbeef/query",
      "/sessions/deadbeef/metrics",
    ]);
  });
});

describe("error classification", () => {
  it("maps 409 to ConflictError with the service detail", async () => {
    stubFetch(jsonResponse(409, { detail: "stale query number 3; pending is 4" }));
    const client = new LabelServiceClient();
    const err = await client.submitLabel("x", 3, "normal").catch((e) => e);
    expect(err).toBeInstanceOf(ConflictError);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(409);
    expect(err.message).toContain("stale query number 3");
  });

  it("maps 410 to SessionDoneError", async () => {
    stubFetch(jsonResponse(410, { detail: "session is done; budget exhausted" }));
    const client = new LabelServiceClient();
    const err = await client.getQuery("x").catch((e) => e);
    expect(err).toBeInstanceOf(SessionDoneError);
    expect(err.status).toBe(410);
  });

  it("maps other failures to ApiError with status", async () => {
    stubFetch(jsonResponse(404, { detail: "unknown session 'x'" }));
    const client = new LabelServiceClient();
    const err = await client.getMetrics("x").catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err).not.toBeInstanceOf(ConflictError);
    expect(err.status).toBe(404);
    expect(err.message).toContain("unknown session");
  });

  it("falls back to status text when the error body is not json", async () => {
    stubFetch(new Response("<html>boom</html>", { status: 500, statusText: "Internal Server Error" }));
    const client = new LabelServiceClient();
    const err = await client.health().catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.message).toBe("Internal Server Error");
  });

  it("propagates network failures untouched", async () => {
    vi.stubGlobal("fetch", vi.fn().mockRejectedValue(new TypeError("fetch failed")));
    const client = new LabelServiceClient();
    await expect(client.health()).rejects.toThrow(TypeError);
  });
});
