import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

type Handler = (input: string, init?: RequestInit) => Promise<Response>;

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function clientWith(handler: Handler): { client: ApiClient; calls: Array<[string, RequestInit?]> } {
  const calls: Array<[string, RequestInit?]> = [];
  const client = new ApiClient("http://svc", "tok-x", async (input, init) => {
    calls.push([input, init]);
    return handler(input, init);
  });
  return { client, calls };
}

describe("ApiClient", () => {
  it("sends the bearer token and parses the next task", async () => {
    const task = {
      task_id: "p1::alice", pair_id: "p1", question: "Q?", cypher: "MATCH (n) RETURN n",
      schema_snippet: "Graph schema: x", result_preview: [], show_diagnostics: true,
    };
    const { client, calls } = clientWith(async () => jsonResponse(200, { task }));
    const got = await client.nextTask("alice");
    expect(got?.task_id).toBe("p1::alice");
    const [url, init] = calls[0];
    expect(url).toBe("http://svc/api/tasks/next?reviewer=alice");
    expect((init?.headers as Record<string, string>).Authorization).toBe("Bearer tok-x");
  });

  it("returns null on an empty queue", async () => {
    const { client } = clientWith(async () => jsonResponse(200, { task: null }));
    expect(await client.nextTask("alice")).toBeNull();
  });

  it("posts decisions as JSON", async () => {
    const { client, calls } = clientWith(async () =>
      jsonResponse(200, { pair_id: "p1", outcome: "awaiting_votes", decisions: 1 }),
    );
    const result = await client.submitDecision("p1::alice", "accept");
    expect(result.outcome).toBe("awaiting_votes");
    const [url, init] = calls[0];
    expect(url).toBe("http://svc/api/tasks/p1%3A%3Aalice/decision");
    expect(init?.method).toBe("POST");
    expect(JSON.parse(String(init?.body))).toEqual({ decision: "accept" });
  });

  it("raises a typed error carrying the server detail", async () => {
    const { client } = clientWith(async () =>
      jsonResponse(409, { detail: "task already decided" }),
    );
    const error = await client.submitDecision("t", "accept").catch((e) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect(error.status).toBe(409);
    expect(error.isConflict).toBe(true);
    expect(error.detail).toContain("already decided");
  });

  it("flags 401 and 403 as auth errors", async () => {
    const { client } = clientWith(async () => jsonResponse(401, { detail: "bad token" }));
    const error = await client.stats().catch((e) => e);
    expect(error.isAuth).toBe(true);
  });
});
