import { Api } from "../src/api.js";
import { createApp, type AppController } from "../src/app.js";
import type { HierarchyDoc, NodeDoc, NodeKind } from "../src/types.js";
import { FakeServer } from "./fake_server.js";
import meta from "./fixtures/meta.json";

export interface Booted {
  app: AppController;
  fake: FakeServer;
  root: HTMLElement;
}

/** Stand up the app against the fixture server; init builds the tree too. */
export async function boot(init = true): Promise<Booted> {
  const fake = new FakeServer();
  fake.install();
  document.body.innerHTML = '<div id="app"></div>';
  const root = document.getElementById("app") as HTMLElement;
  const app = createApp(root, new Api(""));
  await app.start();
  if (init) {
    await app.init(meta.init_threshold);
    await app.idle();
  }
  return { app, fake, root };
}

export function q<T extends Element = Element>(
  selector: string,
  scope: ParentNode = document,
): T {
  const el = scope.querySelector(selector);
  if (!el) throw new Error(`no element matches ${selector}`);
  return el as T;
}

export function qa<T extends Element = Element>(
  selector: string,
  scope: ParentNode = document,
): T[] {
  return [...scope.querySelectorAll(selector)] as T[];
}

export function click(el: Element): void {
  el.dispatchEvent(new MouseEvent("click", { bubbles: true }));
}

export function dblclick(el: Element): void {
  el.dispatchEvent(new MouseEvent("dblclick", { bubbles: true }));
}

// ----------------------------------------------------------------------
// synthetic tree documents for pure-renderer tests

export function node(id: number, kind: NodeKind, over: Partial<NodeDoc> = {}): NodeDoc {
  return {
    node_id: id,
    kind,
    parent: null,
    children: [],
    network_id: null,
    hemisphere: null,
    homogeneity: 1,
    formation_threshold: 0.6,
    n_svs: 1,
    ...over,
  };
}

export function makeDoc(nodes: NodeDoc[], revision = 1): HierarchyDoc {
  return {
    schema_version: 1,
    init_threshold: 0.6,
    root_id: 0,
    next_node_id: Math.max(...nodes.map((n) => n.node_id)) + 1,
    revision,
    leaf_count: nodes.filter((n) => n.kind === "leaf").length,
    nodes,
    op_log: [],
  };
}

/** Two-network tree: leaves 4 and 5 on the left, singleton leaf 7 on the right. */
export function syntheticTree(h1 = 0.4, h2 = 0.8): HierarchyDoc {
  return makeDoc([
    node(0, "root", { children: [1, 2], n_svs: 6 }),
    node(1, "hemisphere", { parent: 0, children: [3], hemisphere: "L", n_svs: 5 }),
    node(2, "hemisphere", { parent: 0, children: [6], hemisphere: "R", n_svs: 1 }),
    node(3, "network", {
      parent: 1,
      children: [4, 5],
      network_id: 1,
      hemisphere: "L",
      n_svs: 5,
    }),
    node(4, "leaf", {
      parent: 3,
      network_id: 1,
      hemisphere: "L",
      homogeneity: h1,
      n_svs: 3,
      sv_members: [1, 2, 3],
      degenerate: false,
    }),
    node(5, "leaf", {
      parent: 3,
      network_id: 1,
      hemisphere: "L",
      homogeneity: h2,
      n_svs: 2,
      sv_members: [4, 5],
      degenerate: false,
    }),
    node(6, "network", {
      parent: 2,
      children: [7],
      network_id: 2,
      hemisphere: "R",
      n_svs: 1,
    }),
    node(7, "leaf", {
      parent: 6,
      network_id: 2,
      hemisphere: "R",
      homogeneity: 0.95,
      n_svs: 1,
      sv_members: [6],
      degenerate: false,
    }),
  ]);
}

/** Same shape with leaf 4 expanded into a cluster over new leaves 8 and 9. */
export function clusteredTree(): HierarchyDoc {
  const doc = syntheticTree();
  const nodes = doc.nodes.map((n) =>
    n.node_id === 4
      ? {
          ...n,
          kind: "cluster" as NodeKind,
          children: [8, 9],
          sv_members: undefined,
          degenerate: undefined,
        }
      : n,
  );
  nodes.push(
    node(8, "leaf", {
      parent: 4,
      network_id: 1,
      hemisphere: "L",
      homogeneity: 0.7,
      n_svs: 2,
      sv_members: [1, 2],
      formation_threshold: 0.3,
      degenerate: false,
    }),
    node(9, "leaf", {
      parent: 4,
      network_id: 1,
      hemisphere: "L",
      homogeneity: 0.8,
      n_svs: 1,
      sv_members: [3],
      formation_threshold: 0.3,
      degenerate: false,
    }),
  );
  return makeDoc(nodes, 2);
}
