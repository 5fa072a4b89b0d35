import { describe, expect, it, vi } from "vitest";

import { AnnotationApi, ApiError } from "../src/api.js";

function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("AnnotationApi", () => {
  it("sends the bearer token on every request", async () => {
    const fetchMock = vi.fn(async () => jsonResponse({ schema_version: 1, tasks: [] }));
    const api = new AnnotationApi("http://svc", "tok-a", fetchMock);
    await api.listTasks();
    const [url, init] = fetchMock.mock.calls[0]!;
    expect(url).toBe("http://svc/tasks");
    expect((init?.headers as Record<string, string>).Authorization).toBe("Bearer tok-a");
  });

  it("maps error bodies to ApiError with status and detail", async () => {
    const fetchMock = vi.fn(async () => jsonResponse({ detail: "revision mismatch" }, 409));
    const api = new AnnotationApi("http://svc", "tok-a", fetchMock);
    await expect(
      api.submitAnnotation("t1", "alice", {
        schema_version: 1, rows: [[1, 2]], unclear: false, base_revision: 0,
      }),
    ).rejects.toMatchObject({ status: 409, message: "revision mismatch" });
  });

  it("serializes the submission body", async () => {
    const fetchMock = vi.fn(async () => jsonResponse({ revision: 1 }));
    const api = new AnnotationApi("http://svc", "tok-a", fetchMock);
    await api.submitAnnotation("t1", "alice", {
      schema_version: 1, rows: [[2, 3]], unclear: true, base_revision: 0,
    });
    const [url, init] = fetchMock.mock.calls[0]!;
    expect(url).toBe("http://svc/tasks/t1/annotations/alice");
    expect(init?.method).toBe("PUT");
    expect(JSON.parse(init?.body as string)).toEqual({
      schema_version: 1, rows: [[2, 3]], unclear: true, base_revision: 0,
    });
  });

  it("retries consistency decisions on network faults with one idempotency key", async () => {
    const seen: string[] = [];
    let calls = 0;
    const fetchMock = vi.fn(async (_url: string, init?: RequestInit) => {
      seen.push((init?.headers as Record<string, string>)["Idempotency-Key"]!);
      calls += 1;
      if (calls === 1) throw new TypeError("network down");
      return jsonResponse({ id: "c1", decision: "accept", corpus_revision: 2, applied: true });
    });
    const api = new AnnotationApi("http://svc", "tok-r", fetchMock);
    const result = await api.decideConsistency("c1", "accept", {
      attempts: 3, sleep: async () => {},
    });
    expect(result.applied).toBe(true);
    expect(calls).toBe(2);
    expect(new Set(seen).size).toBe(1);
  });

  it("does not retry when the server answered with an error", async () => {
    const fetchMock = vi.fn(async () => jsonResponse({ detail: "stale" }, 410));
    const api = new AnnotationApi("http://svc", "tok-r", fetchMock);
    await expect(
      api.decideConsistency("c1", "accept", { sleep: async () => {} }),
    ).rejects.toBeInstanceOf(ApiError);
    expect(fetchMock).toHaveBeenCalledTimes(1);
  });

  it("gives up after the configured attempts", async () => {
    const fetchMock = vi.fn(async () => {
      throw new TypeError("still down");
    });
    const api = new AnnotationApi("http://svc", "tok-r", fetchMock);
    await expect(
      api.decideConsistency("c1", "reject", { attempts: 2, sleep: async () => {} }),
    ).rejects.toThrow(/still down/);
    expect(fetchMock).toHaveBeenCalledTimes(2);
  });
});
