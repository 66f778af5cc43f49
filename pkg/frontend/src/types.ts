/**
 * JSON payload shapes of the parcelsteer HTTP API, as the server emits them.
 * Field names match the wire format exactly; the client never reshapes
 * responses before storing them.
 */

export type NodeKind = "root" | "hemisphere" | "network" | "cluster" | "leaf";
export type Hemisphere = "L" | "R";
export type PlaneName = "sagittal" | "coronal" | "axial";

export const PLANES: PlaneName[] = ["sagittal", "coronal", "axial"];

/** Volume axis sliced by each plane; the other two axes stay in row, col order. */
export const PLANE_AXIS: Record<PlaneName, number> = {
  sagittal: 0,
  coronal: 1,
  axial: 2,
};

export interface NodeDoc {
  node_id: number;
  kind: NodeKind;
  parent: number | null;
  children: number[];
  network_id: number | null;
  hemisphere: Hemisphere | null;
  homogeneity: number;
  formation_threshold: number;
  n_svs: number;
  sv_members?: number[];
  degenerate?: boolean;
}

export interface OpRecordDoc {
  kind: string;
  args: Record<string, number>;
  timestamp: number;
  leaf_count: number;
}

export interface HierarchyDoc {
  schema_version: number;
  init_threshold: number;
  root_id: number;
  next_node_id: number;
  revision: number;
  leaf_count: number;
  nodes: NodeDoc[];
  op_log: OpRecordDoc[];
}

export interface DeltaDoc {
  op: string;
  removed: number[];
  added: NodeDoc[];
  updated: NodeDoc[];
  leaf_count: number;
  revision: number;
  no_split: boolean;
}

export interface SessionInfo {
  session_id: string;
  n_supervoxels: number;
  nt: number;
  dims: number[];
}

export interface BandedSeries {
  mean: number[];
  se: number[];
  n_members: number;
}

export interface FcRowEntry {
  leaf_id: number;
  r: number;
  degenerate: boolean;
}

export interface NodeInfo {
  node: NodeDoc;
  homogeneity: number;
  banded: BandedSeries;
  fc_row: FcRowEntry[];
  member_svs: { sv_id: number; degenerate: boolean }[];
}

export interface FcParcel {
  leaf_id: number;
  network_id: number;
  hemisphere: Hemisphere;
  n_svs: number;
  homogeneity: number;
}

export interface FcChord {
  a: number;
  b: number;
  r: number;
}

export interface FcPayload {
  parcel_order: number[];
  parcels: FcParcel[];
  matrix: number[][];
  degenerate: boolean[];
  chords: FcChord[];
  bars: number[][];
  revision: number;
}

export interface SliceContour {
  leaf_id: number;
  network_id: number;
  points: [number, number][];
  highlighted: boolean;
}

export interface SlicePayload {
  plane: PlaneName;
  index: number;
  shape: [number, number];
  label_image: number[][];
  underlay: number[][];
  contours: SliceContour[];
  highlight: number | null;
}

export interface ApiErrorBody {
  error_kind: string;
  message: string;
  detail: unknown;
}

export interface ExportPayload {
  hierarchy: HierarchyDoc;
  label_volume: {
    filename: string;
    media_type: string;
    encoding: string;
    base64: string;
  };
}
