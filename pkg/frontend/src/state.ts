// Query state: the single source of truth for the what-if panel. It
// serializes to exactly the POST /api/v1/advise body and round-trips
// through the URL so any exploration state is shareable.

export interface QueryState {
  modality: string;
  smallScale: boolean; // small vs large foreground
  irregularShape: boolean; // irregular vs regular
  blurBoundary: boolean; // blur vs clear
  storage: string | null; // cap: largest acceptable storage bin
  compute: string | null; // cap: largest acceptable compute bin
  speed: string | null; // floor: slowest acceptable speed bin
  k: number;
  labelKind: "iou" | "uscore";
}

export const DEFAULT_STATE: QueryState = {
  modality: "Ultrasound",
  smallScale: false,
  irregularShape: false,
  blurBoundary: false,
  storage: null,
  compute: null,
  speed: null,
  k: 10,
  labelKind: "uscore",
};

export interface AdviseBody {
  modality: string;
  scale: string;
  shape: string;
  boundary: string;
  constraints: { storage?: string; compute?: string; speed?: string };
  k: number;
  label_kind: string;
}

export function toAdviseBody(state: QueryState): AdviseBody {
  const constraints: AdviseBody["constraints"] = {};
  if (state.storage) constraints.storage = state.storage;
  if (state.compute) constraints.compute = state.compute;
  if (state.speed) constraints.speed = state.speed;
  return {
    modality: state.modality,
    scale: state.smallScale ? "small" : "large",
    shape: state.irregularShape ? "irregular" : "regular",
    boundary: state.blurBoundary ? "blur" : "clear",
    constraints,
    k: state.k,
    label_kind: state.labelKind,
  };
}

export function encodeState(state: QueryState): string {
  const params = new URLSearchParams();
  params.set("modality", state.modality);
  params.set("scale", state.smallScale ? "small" : "large");
  params.set("shape", state.irregularShape ? "irregular" : "regular");
  params.set("boundary", state.blurBoundary ? "blur" : "clear");
  if (state.storage) params.set("storage", state.storage);
  if (state.compute) params.set("compute", state.compute);
  if (state.speed) params.set("speed", state.speed);
  params.set("k", String(state.k));
  params.set("label_kind", state.labelKind);
  return params.toString();
}

export function decodeState(query: string): QueryState {
  const params = new URLSearchParams(query);
  const k = Number.parseInt(params.get("k") ?? "", 10);
  const labelKind = params.get("label_kind");
  return {
    modality: params.get("modality") ?? DEFAULT_STATE.modality,
    smallScale: params.get("scale") === "small",
    irregularShape: params.get("shape") === "irregular",
    blurBoundary: params.get("boundary") === "blur",
    storage: params.get("storage"),
    compute: params.get("compute"),
    speed: params.get("speed"),
    k: Number.isFinite(k) && k >= 1 ? k : DEFAULT_STATE.k,
    labelKind: labelKind === "iou" ? "iou" : "uscore",
  };
}
