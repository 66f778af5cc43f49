/**
 * Application shell: builds the page skeleton, owns the view state, and
 * coordinates fetching so every panel renders from one tree revision.
 *
 * Steering requests are serialized: while one expand, merge or collapse is
 * awaiting the server, the buttons are disabled and further attempts are
 * ignored. A successful delta patches the mirrored tree document; the
 * panels are then refreshed together, and the connectivity payload's
 * revision is checked against the mirror before anything is drawn. If they
 * disagree (another writer moved the session), the client adopts the
 * server's exported tree and refreshes once more.
 *
 * Server rejections surface as toasts carrying the error kind; the local
 * state is never mutated on a rejected request.
 */
import { Api, ApiFault } from "./api.js";
import { renderChords } from "./chords.js";
import { clear, htmlEl } from "./dom.js";
import { networkColor } from "./palette.js";
import { renderSlices, clickTargets } from "./slices.js";
import {
  Store,
  applyDelta,
  canCollapse,
  canExpand,
  canMerge,
  expandThresholdError,
  nodeById,
  pruneSelection,
  toggleLock,
} from "./state.js";
import { renderTimecourse, type SeriesSpec } from "./timecourse.js";
import { showToast } from "./toast.js";
import { renderTree } from "./tree.js";
import type {
  DeltaDoc,
  FcPayload,
  NodeInfo,
  PlaneName,
  SessionInfo,
  SlicePayload,
} from "./types.js";
import { PLANES } from "./types.js";

export interface AppController {
  store: Store;
  start(): Promise<void>;
  init(threshold: number): Promise<void>;
  idle(): Promise<void>;
}

export function createApp(root: HTMLElement, api: Api): AppController {
  const store = new Store();
  let sid: string | null = null;
  let session: SessionInfo | null = null;
  let inFlight = false;
  let confirmArmed = false;
  let lastFc: FcPayload | null = null;
  const lastSlices: Record<PlaneName, SlicePayload | null> = {
    sagittal: null,
    coronal: null,
    axial: null,
  };
  let cacheRevision = -1;
  const nodeInfoCache = new Map<number, NodeInfo>();

  // ------------------------------------------------------------------
  // page skeleton

  clear(root);
  const topbar = htmlEl("div", { class: "topbar" });
  topbar.appendChild(htmlEl("span", { class: "app-title" }, "parcelsteer"));
  const infoEl = htmlEl("span", { "data-role": "dataset-info", class: "dataset-info" });
  topbar.appendChild(infoEl);
  const initInput = htmlEl("input", {
    id: "init-threshold",
    type: "number",
    min: 0,
    max: 2,
    step: 0.05,
    value: 0.6,
  });
  const initLabel = htmlEl("label", {}, "init threshold ");
  initLabel.appendChild(initInput);
  topbar.appendChild(initLabel);
  const btnInit = htmlEl("button", { id: "btn-init" }, "init");
  topbar.appendChild(btnInit);

  const toolbar = htmlEl("span", { class: "toolbar" });
  const btnExpand = htmlEl("button", { id: "btn-expand", disabled: "" }, "expand");
  const expandInput = htmlEl("input", {
    id: "expand-threshold",
    type: "number",
    min: 0,
    max: 2,
    step: 0.05,
    placeholder: "tighter threshold",
  });
  const btnMerge = htmlEl("button", { id: "btn-merge", disabled: "" }, "merge");
  const btnCollapse = htmlEl("button", { id: "btn-collapse", disabled: "" }, "collapse");
  toolbar.append(btnExpand, expandInput, btnMerge, btnCollapse);
  topbar.appendChild(toolbar);
  root.appendChild(topbar);

  const toasts = htmlEl("div", { class: "toasts", "data-role": "toasts" });
  root.appendChild(toasts);

  const panels = htmlEl("div", { class: "panels" });
  const makePanel = (id: string, title: string): HTMLElement => {
    const section = htmlEl("section", { id, class: "panel" });
    section.appendChild(htmlEl("h2", {}, title));
    const view = htmlEl("div", { "data-role": "view" });
    section.appendChild(view);
    panels.appendChild(section);
    return view;
  };
  const treeView = makePanel("tree-panel", "hierarchy");
  const tcView = makePanel("timecourse-panel", "time-course");

  const chordSection = htmlEl("section", { id: "chord-panel", class: "panel" });
  chordSection.appendChild(htmlEl("h2", {}, "connectivity"));
  const fcControls = htmlEl("div", { class: "fc-controls" });
  fcControls.appendChild(htmlEl("span", {}, "|r| from "));
  const fcLo = htmlEl("input", {
    id: "fc-lo",
    type: "number",
    min: 0,
    max: 1,
    step: 0.05,
    value: 0,
  });
  fcControls.appendChild(fcLo);
  fcControls.appendChild(htmlEl("span", {}, " to "));
  const fcHi = htmlEl("input", {
    id: "fc-hi",
    type: "number",
    min: 0,
    max: 1,
    step: 0.05,
    value: 1,
  });
  fcControls.appendChild(fcHi);
  chordSection.appendChild(fcControls);
  const chordView = htmlEl("div", { "data-role": "view" });
  chordSection.appendChild(chordView);
  panels.appendChild(chordSection);

  const sliceView = makePanel("slice-panel", "slices");
  root.appendChild(panels);

  // ------------------------------------------------------------------
  // async bookkeeping: every event-driven entry point is tracked so tests
  // (and callers) can await quiescence with idle()

  const pendingWork = new Set<Promise<unknown>>();

  function track<T>(fn: () => Promise<T>): Promise<T> {
    const p = fn();
    pendingWork.add(p);
    void p.catch(() => undefined).then(() => pendingWork.delete(p));
    return p;
  }

  async function idle(): Promise<void> {
    while (pendingWork.size > 0) {
      await Promise.allSettled([...pendingWork]);
    }
  }

  function run(fn: () => Promise<void>): void {
    void track(async () => {
      try {
        await fn();
      } catch (err) {
        if (err instanceof ApiFault) showToast(toasts, err.kind, err.message);
        else showToast(toasts, "Error", String(err));
      }
    });
  }

  // ------------------------------------------------------------------
  // data access

  async function nodeInfo(id: number): Promise<NodeInfo> {
    const doc = store.get().doc;
    if (!doc || sid === null) throw new Error("no hierarchy");
    if (cacheRevision !== doc.revision) {
      nodeInfoCache.clear();
      cacheRevision = doc.revision;
    }
    const hit = nodeInfoCache.get(id);
    if (hit) return hit;
    const info = await api.nodeInfo(sid, id);
    nodeInfoCache.set(id, info);
    return info;
  }

  function highlightLeaf(): number | undefined {
    const { doc, selected } = store.get();
    const node = nodeById(doc, selected);
    return node !== null && node.kind === "leaf" ? node.node_id : undefined;
  }

  async function fetchSlice(plane: PlaneName): Promise<void> {
    if (sid === null) return;
    const index = store.get().sliceIndex[plane];
    lastSlices[plane] = await api.slice(sid, plane, index, highlightLeaf());
  }

  /** Node ids whose mean time-courses the plot shows. */
  function seriesIds(): number[] {
    const { selected, locked } = store.get();
    if (locked.length > 0) return [...locked];
    return selected !== null ? [selected] : [];
  }

  function seriesSpecs(): SeriesSpec[] {
    const { doc } = store.get();
    const specs: SeriesSpec[] = [];
    for (const id of seriesIds()) {
      const info = nodeInfoCache.get(id);
      const node = nodeById(doc, id);
      if (!info || !node || cacheRevision !== doc?.revision) continue;
      specs.push({
        label: `${node.kind} ${id}`,
        color: networkColor(node.network_id, node.hemisphere),
        banded: info.banded,
      });
    }
    return specs;
  }

  // ------------------------------------------------------------------
  // rendering

  function updateButtons(): void {
    const { doc, selected, locked } = store.get();
    btnInit.disabled = inFlight || sid === null;
    btnMerge.disabled = inFlight || !canMerge(doc, locked);
    btnCollapse.disabled = inFlight || !canCollapse(doc, selected);
    btnExpand.disabled = inFlight || !canExpand(doc, selected);
  }

  function renderTreePanel(): void {
    const { doc, selected, locked } = store.get();
    renderTree(treeView, doc, { selected, locked }, { onSelect, onToggleLock });
  }

  function renderTimecoursePanel(): void {
    const { doc, brush } = store.get();
    renderTimecourse(tcView, seriesSpecs(), brush, { onBrush });
    if (doc) tcView.dataset.revision = String(doc.revision);
    else delete tcView.dataset.revision;
  }

  function renderChordPanel(): void {
    renderChords(chordView, lastFc, store.get().fcRange, { onSelect });
  }

  function renderSlicePanel(): void {
    const { doc, sliceIndex } = store.get();
    renderSlices(sliceView, lastSlices, doc, session?.dims ?? [1, 1, 1], sliceIndex, {
      onIndexChange,
      onVoxelClick,
    });
  }

  function renderAll(): void {
    renderTreePanel();
    renderTimecoursePanel();
    renderChordPanel();
    renderSlicePanel();
    updateButtons();
  }

  /**
   * Fetch everything the current state needs, then draw all panels in one
   * pass. The connectivity payload carries the revision it was computed
   * at; when it does not match the mirror, the mirror is resynced from the
   * server's export and the refresh runs once more.
   */
  async function refreshAll(): Promise<void> {
    if (sid === null || store.get().doc === null) {
      lastFc = null;
      for (const plane of PLANES) lastSlices[plane] = null;
      renderAll();
      return;
    }
    for (let attempt = 0; attempt < 2; attempt++) {
      const doc = store.get().doc;
      if (!doc) break;
      const [fc] = await Promise.all([
        api.fc(sid, 0, 1),
        Promise.all(PLANES.map(fetchSlice)),
        Promise.all(seriesIds().map(nodeInfo)),
      ]);
      if (fc.revision === doc.revision) {
        lastFc = fc;
        renderAll();
        return;
      }
      const exported = await api.export(sid);
      const fresh = exported.hierarchy;
      const { selected, locked } = store.get();
      store.set({ doc: fresh, ...pruneSelection(fresh, selected, locked) });
      nodeInfoCache.clear();
      cacheRevision = fresh.revision;
    }
    showToast(toasts, "RevisionSkew", "views could not settle on one revision; retry");
  }

  // ------------------------------------------------------------------
  // interactions

  function onSelect(id: number): void {
    run(async () => {
      const before = highlightLeaf();
      store.set({ selected: id });
      renderTreePanel();
      updateButtons();
      await Promise.all(seriesIds().map(nodeInfo));
      renderTimecoursePanel();
      if (highlightLeaf() !== before) {
        await Promise.all(PLANES.map(fetchSlice));
        renderSlicePanel();
      }
    });
  }

  function onToggleLock(id: number): void {
    run(async () => {
      const { doc, locked } = store.get();
      const outcome = toggleLock(doc, locked, id);
      if (!outcome.changed) {
        if (outcome.reason) showToast(toasts, "LockLimit", outcome.reason);
        return;
      }
      store.set({ locked: outcome.locked });
      renderTreePanel();
      updateButtons();
      if (sid !== null) {
        const resp = await api.putSelection(sid, outcome.locked);
        store.set({ locked: resp.locked });
      }
      // the overlay appears as soon as the second parcel is locked
      await Promise.all(seriesIds().map(nodeInfo));
      renderTimecoursePanel();
    });
  }

  function onBrush(range: [number, number] | null): void {
    store.set({ brush: range });
    renderTimecoursePanel();
  }

  function onIndexChange(plane: PlaneName, index: number): void {
    run(async () => {
      store.set({ sliceIndex: { ...store.get().sliceIndex, [plane]: index } });
      await fetchSlice(plane);
      renderSlicePanel();
    });
  }

  function onVoxelClick(plane: PlaneName, row: number, col: number): void {
    run(async () => {
      const targets = clickTargets(plane, row, col);
      const sliceIndex = { ...store.get().sliceIndex };
      for (const [target, index] of targets) sliceIndex[target] = index;
      store.set({ sliceIndex });
      await Promise.all(targets.map(([target]) => fetchSlice(target)));
      renderSlicePanel();
    });
  }

  async function steer(fn: () => Promise<DeltaDoc>): Promise<void> {
    if (inFlight) return;
    inFlight = true;
    updateButtons();
    try {
      const delta = await fn();
      if (delta.no_split) {
        showToast(toasts, "NoSplit", "still one cluster at that threshold; nothing changed");
      } else {
        const doc = store.get().doc;
        if (doc) {
          const next = applyDelta(doc, delta);
          const { selected, locked } = store.get();
          store.set({ doc: next, ...pruneSelection(next, selected, locked) });
        }
      }
      await refreshAll();
    } catch (err) {
      if (err instanceof ApiFault) showToast(toasts, err.kind, err.message);
      else showToast(toasts, "Error", String(err));
    } finally {
      inFlight = false;
      updateButtons();
    }
  }

  btnMerge.addEventListener("click", () => {
    const { doc, locked } = store.get();
    if (sid === null || !canMerge(doc, locked)) return;
    const [target, source] = locked;
    run(() => steer(() => api.merge(sid as string, target, source)));
  });

  btnCollapse.addEventListener("click", () => {
    const { doc, selected } = store.get();
    if (sid === null || selected === null || !canCollapse(doc, selected)) return;
    run(() => steer(() => api.collapse(sid as string, selected)));
  });

  btnExpand.addEventListener("click", () => {
    const { doc, selected } = store.get();
    const node = nodeById(doc, selected);
    if (sid === null || node === null || !canExpand(doc, selected)) return;
    const tNew = parseFloat(expandInput.value);
    const problem = expandThresholdError(node, tNew);
    if (problem !== null) {
      showToast(toasts, "NotSent", problem);
      return;
    }
    run(() => steer(() => api.expand(sid as string, node.node_id, tNew)));
  });

  btnInit.addEventListener("click", () => {
    run(() => initImpl(parseFloat(initInput.value)));
  });

  const onFcRange = (): void => {
    const lo = parseFloat(fcLo.value);
    const hi = parseFloat(fcHi.value);
    if (!Number.isFinite(lo) || !Number.isFinite(hi) || lo > hi) {
      showToast(toasts, "InvalidRange", `|r| filter needs lo <= hi, got [${lo}, ${hi}]`);
      return;
    }
    store.set({ fcRange: { lo, hi } });
    renderChordPanel();
  };
  fcLo.addEventListener("input", onFcRange);
  fcHi.addEventListener("input", onFcRange);

  // ------------------------------------------------------------------
  // lifecycle

  async function startImpl(): Promise<void> {
    session = await api.createSession();
    sid = session.session_id;
    const [nx, ny, nz] = session.dims;
    store.set({
      sliceIndex: {
        sagittal: Math.floor(nx / 2),
        coronal: Math.floor(ny / 2),
        axial: Math.floor(nz / 2),
      },
    });
    infoEl.textContent =
      `${session.n_supervoxels} super-voxels, ${session.nt} timepoints, ` +
      `${nx}x${ny}x${nz} grid`;
    renderAll();
  }

  async function initImpl(threshold: number): Promise<void> {
    if (sid === null) return;
    const { doc } = store.get();
    const hasEdits = doc !== null && doc.revision > 1;
    if (hasEdits && !confirmArmed) {
      confirmArmed = true;
      showToast(
        toasts,
        "ConfirmRequired",
        "re-initializing discards this session's edits; press init again to confirm",
      );
      return;
    }
    try {
      const fresh = await api.initHierarchy(sid, threshold, confirmArmed);
      confirmArmed = false;
      store.set({ doc: fresh, selected: null, locked: [], brush: null });
      nodeInfoCache.clear();
      cacheRevision = fresh.revision;
      await refreshAll();
    } catch (err) {
      confirmArmed = false;
      throw err;
    }
  }

  renderAll();

  return {
    store,
    start: () => track(startImpl),
    init: (threshold: number) => track(() => initImpl(threshold)),
    idle,
  };
}
