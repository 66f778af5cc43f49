/**
 * In-process stand-in for the parcelsteer HTTP server, replaying JSON
 * fixtures captured from the real service (scripts/capture_fixtures.py).
 *
 * It knows exactly one storyline: a fresh session, one init, and the merge
 * of the two captured parcels, which flips every subsequent read from the
 * "pre" payloads to the "post" ones. Everything else gets a 404 or 409 in
 * the server's error body shape, so an unexpected request surfaces as a
 * toast in the app under test instead of passing silently.
 */
import type { ApiErrorBody, PlaneName } from "../src/types.js";

import fcPost from "./fixtures/fc_post.json";
import fcPre from "./fixtures/fc_pre.json";
import hierarchyFixture from "./fixtures/hierarchy.json";
import mergeDelta from "./fixtures/merge_delta.json";
import meta from "./fixtures/meta.json";
import nodeM1 from "./fixtures/node_m1.json";
import nodeM1Post from "./fixtures/node_m1_post.json";
import nodeM2 from "./fixtures/node_m2.json";
import sessionFixture from "./fixtures/session.json";
import sliceAxialPost from "./fixtures/slice_axial_post.json";
import sliceAxialPre from "./fixtures/slice_axial_pre.json";
import sliceCoronalPost from "./fixtures/slice_coronal_post.json";
import sliceCoronalPre from "./fixtures/slice_coronal_pre.json";
import sliceHighlight from "./fixtures/slice_highlight.json";
import sliceSagittalPost from "./fixtures/slice_sagittal_post.json";
import sliceSagittalPre from "./fixtures/slice_sagittal_pre.json";

type Phase = "pre" | "post";

const SLICES: Record<Phase, Record<PlaneName, unknown>> = {
  pre: {
    sagittal: sliceSagittalPre,
    coronal: sliceCoronalPre,
    axial: sliceAxialPre,
  },
  post: {
    sagittal: sliceSagittalPost,
    coronal: sliceCoronalPost,
    axial: sliceAxialPost,
  },
};

export interface LoggedRequest {
  method: string;
  path: string;
  body?: unknown;
}

function json(status: number, payload: unknown): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export class FakeServer {
  phase: Phase = "pre";
  log: LoggedRequest[] = [];
  delayMs = 0;
  failNext: { match: RegExp; status: number; body: ApiErrorBody } | null = null;

  install(): void {
    globalThis.fetch = ((input: RequestInfo | URL, init?: RequestInit) =>
      this.handle(String(input), init)) as typeof fetch;
  }

  requests(pattern: RegExp): LoggedRequest[] {
    return this.log.filter((r) => pattern.test(`${r.method} ${r.path}`));
  }

  private async handle(url: string, init?: RequestInit): Promise<Response> {
    const method = init?.method ?? "GET";
    const u = new URL(url, "http://fixtures.test");
    this.log.push({
      method,
      path: u.pathname + u.search,
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    });
    if (this.delayMs > 0) {
      await new Promise((resolve) => setTimeout(resolve, this.delayMs));
    }
    if (this.failNext && this.failNext.match.test(`${method} ${u.pathname}`)) {
      const fail = this.failNext;
      this.failNext = null;
      return json(fail.status, fail.body);
    }
    return this.route(method, u, init);
  }

  private route(method: string, u: URL, init?: RequestInit): Response {
    const p = u.pathname;
    if (method === "POST" && p === "/session") return json(200, sessionFixture);
    if (method === "POST" && /\/hierarchy$/.test(p)) {
      this.phase = "pre";
      return json(200, hierarchyFixture);
    }
    if (method === "PUT" && /\/selection$/.test(p)) {
      const body = JSON.parse(String(init?.body)) as { locked: number[] };
      return json(200, { locked: body.locked });
    }
    const node = p.match(/\/node\/(\d+)$/);
    if (method === "GET" && node) {
      const id = Number(node[1]);
      if (id === meta.m1) return json(200, this.phase === "pre" ? nodeM1 : nodeM1Post);
      if (id === meta.m2 && this.phase === "pre") return json(200, nodeM2);
      return json(404, { error_kind: "UnknownNode", message: `no node ${id}`, detail: {} });
    }
    if (method === "GET" && /\/fc$/.test(p)) {
      return json(200, this.phase === "pre" ? fcPre : fcPost);
    }
    const slice = p.match(/\/slice\/(sagittal|coronal|axial)\/(\d+)$/);
    if (method === "GET" && slice) {
      const plane = slice[1] as PlaneName;
      const wantHighlight = u.searchParams.get("highlight");
      if (
        plane === "axial" &&
        this.phase === "pre" &&
        wantHighlight === String(meta.highlight_leaf)
      ) {
        return json(200, sliceHighlight);
      }
      return json(200, SLICES[this.phase][plane]);
    }
    if (method === "POST" && /\/merge$/.test(p)) {
      this.phase = "post";
      return json(200, mergeDelta);
    }
    if (method === "POST" && /\/(expand|collapse)$/.test(p)) {
      return json(409, {
        error_kind: "NotInFixtures",
        message: "the fixture server only supports the captured merge",
        detail: {},
      });
    }
    return json(404, {
      error_kind: "NotFound",
      message: `no fixture for ${method} ${p}`,
      detail: {},
    });
  }
}
