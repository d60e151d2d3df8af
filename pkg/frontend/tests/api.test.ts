import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { EX, TITLE } from "./fixtures.js";

interface Call {
  url: string;
  init?: RequestInit;
}

function clientWith(status: number, body: unknown): { client: ApiClient; calls: Call[] } {
  const calls: Call[] = [];
  const fetchFn = async (url: string, init?: RequestInit) => {
    calls.push({ url, init });
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { client: new ApiClient("http://engine", fetchFn), calls };
}

describe("ApiClient", () => {
  it("percent-encodes entity IRIs in paths", async () => {
    const { client, calls } = clientWith(200, { iri: "x" });
    await client.getEntity(`${EX}book/1`);
    expect(calls[0]!.url).toBe(
      "http://engine/api/entity/http%3A%2F%2Fexample.org%2Fbook%2F1");
  });

  it("sends the curator header on mutations", async () => {
    const { client, calls } = clientWith(200, {});
    client.curator = "https://orcid.org/0000-0001";
    await client.submitEdit(`${EX}book/1`, 1, [
      { predicate: TITLE, object: { type: "literal", value: "B" } }]);
    const headers = calls[0]!.init?.headers as Record<string, string>;
    expect(headers["X-Curator"]).toBe("https://orcid.org/0000-0001");
    const payload = JSON.parse(String(calls[0]!.init?.body));
    expect(payload.base_version).toBe(1);
  });

  it("maps error bodies onto ApiError with violations", async () => {
    const { client } = clientWith(422, {
      code: 422,
      message: "state violates schema",
      violations: [{ focus: "f", path: TITLE, kind: "MinCount", message: "missing title" }],
    });
    const error = await client.getEntity(`${EX}book/1`).catch((e) => e as ApiError);
    expect(error).toBeInstanceOf(ApiError);
    expect((error as ApiError).status).toBe(422);
    expect((error as ApiError).violations[0]!.kind).toBe("MinCount");
  });

  it("wraps network failures with status 0", async () => {
    const client = new ApiClient("http://engine", async () => {
      throw new TypeError("connection refused");
    });
    const error = await client.getClasses().catch((e) => e as ApiError);
    expect((error as ApiError).status).toBe(0);
  });

  it("restore posts to the version-scoped path", async () => {
    const { client, calls } = clientWith(200, {});
    await client.restore(`${EX}book/1`, 3);
    expect(calls[0]!.url).toMatch(/\/restore\/3$/);
    expect(calls[0]!.init?.method).toBe("POST");
  });
});
