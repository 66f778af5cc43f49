/**
 * Typed fetch client for the parcelsteer HTTP API.
 *
 * Every non-2xx response carries { error_kind, message, detail }; that body
 * is rethrown as an ApiFault so callers can branch on the kind and surface
 * the message without parsing anything themselves.
 */
import type {
  ApiErrorBody,
  DeltaDoc,
  ExportPayload,
  FcPayload,
  HierarchyDoc,
  NodeInfo,
  PlaneName,
  SessionInfo,
  SlicePayload,
} from "./types.js";

export class ApiFault extends Error {
  readonly status: number;
  readonly kind: string;
  readonly detail: unknown;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.name = "ApiFault";
    this.status = status;
    this.kind = body.error_kind;
    this.detail = body.detail;
  }
}

export class Api {
  /** Base URL of the server, "" when the page is served from the same origin. */
  readonly base: string;

  constructor(base = "") {
    this.base = base.replace(/\/$/, "");
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await fetch(this.base + path, init);
    const payload = await resp.json();
    if (!resp.ok) {
      throw new ApiFault(resp.status, payload as ApiErrorBody);
    }
    return payload as T;
  }

  createSession(paths?: {
    scan_path: string;
    atlas_path: string;
    meta_path: string;
  }): Promise<SessionInfo> {
    return this.request("POST", "/session", paths ?? {});
  }

  initHierarchy(sid: string, threshold: number, confirm = false): Promise<HierarchyDoc> {
    return this.request("POST", `/session/${sid}/hierarchy`, { threshold, confirm });
  }

  restore(sid: string, document: HierarchyDoc): Promise<HierarchyDoc> {
    return this.request("POST", `/session/${sid}/restore`, { document });
  }

  nodeInfo(sid: string, nodeId: number): Promise<NodeInfo> {
    return this.request("GET", `/session/${sid}/node/${nodeId}`);
  }

  getSelection(sid: string): Promise<{ locked: number[] }> {
    return this.request("GET", `/session/${sid}/selection`);
  }

  putSelection(sid: string, locked: number[]): Promise<{ locked: number[] }> {
    return this.request("PUT", `/session/${sid}/selection`, { locked });
  }

  expand(sid: string, nodeId: number, threshold: number): Promise<DeltaDoc> {
    return this.request("POST", `/session/${sid}/expand`, {
      node_id: nodeId,
      threshold,
    });
  }

  merge(sid: string, targetId: number, sourceId: number): Promise<DeltaDoc> {
    return this.request("POST", `/session/${sid}/merge`, {
      target_id: targetId,
      source_id: sourceId,
    });
  }

  collapse(sid: string, nodeId: number): Promise<DeltaDoc> {
    return this.request("POST", `/session/${sid}/collapse`, { node_id: nodeId });
  }

  fc(sid: string, lo: number, hi: number): Promise<FcPayload> {
    return this.request("GET", `/session/${sid}/fc?lo=${lo}&hi=${hi}`);
  }

  slice(
    sid: string,
    plane: PlaneName,
    index: number,
    highlight?: number,
  ): Promise<SlicePayload> {
    const query = highlight === undefined ? "" : `?highlight=${highlight}`;
    return this.request("GET", `/session/${sid}/slice/${plane}/${index}${query}`);
  }

  export(sid: string): Promise<ExportPayload> {
    return this.request("GET", `/session/${sid}/export`);
  }
}
