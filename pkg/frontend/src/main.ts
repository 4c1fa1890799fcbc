import { ApiClient } from "./api.js";
import { AdvisorPanel } from "./advisor.js";
import { LeaderboardView } from "./leaderboard.js";
import { DEFAULT_STATE, QueryState, decodeState, encodeState } from "./state.js";
import { COMPUTE_CAPS, MODALITIES, SPEED_FLOORS, STORAGE_CAPS } from "./types.js";

const api = new ApiClient(new URLSearchParams(location.search).get("api") ?? "");

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function fillSelect(select: HTMLSelectElement, options: readonly string[], withNone: boolean): void {
  if (withNone) {
    const none = document.createElement("option");
    none.value = "";
    none.textContent = "(none)";
    select.appendChild(none);
  }
  for (const value of options) {
    const option = document.createElement("option");
    option.value = value;
    option.textContent = value;
    select.appendChild(option);
  }
}

function readState(): QueryState {
  return {
    modality: el<HTMLSelectElement>("modality").value,
    smallScale: el<HTMLInputElement>("scale").checked,
    irregularShape: el<HTMLInputElement>("shape").checked,
    blurBoundary: el<HTMLInputElement>("boundary").checked,
    storage: el<HTMLSelectElement>("storage").value || null,
    compute: el<HTMLSelectElement>("compute").value || null,
    speed: el<HTMLSelectElement>("speed").value || null,
    k: Math.max(1, Number.parseInt(el<HTMLInputElement>("k").value, 10) || DEFAULT_STATE.k),
    labelKind: el<HTMLSelectElement>("label-kind").value === "iou" ? "iou" : "uscore",
  };
}

function writeState(state: QueryState): void {
  el<HTMLSelectElement>("modality").value = state.modality;
  el<HTMLInputElement>("scale").checked = state.smallScale;
  el<HTMLInputElement>("shape").checked = state.irregularShape;
  el<HTMLInputElement>("boundary").checked = state.blurBoundary;
  el<HTMLSelectElement>("storage").value = state.storage ?? "";
  el<HTMLSelectElement>("compute").value = state.compute ?? "";
  el<HTMLSelectElement>("speed").value = state.speed ?? "";
  el<HTMLInputElement>("k").value = String(state.k);
  el<HTMLSelectElement>("label-kind").value = state.labelKind;
}

async function refreshLeaderboard(view: LeaderboardView, state: QueryState, scope: string): Promise<void> {
  try {
    const envelope = await api.leaderboard(state.labelKind, scope);
    view.setPayload(envelope.payload);
    el("digest").textContent = `registry ${envelope.registry_digest.slice(0, 12)}`;
  } catch (error) {
    view.setError(String(error instanceof Error ? error.message : error));
  }
}

async function bootstrap(): Promise<void> {
  fillSelect(el<HTMLSelectElement>("modality"), MODALITIES, false);
  fillSelect(el<HTMLSelectElement>("storage"), STORAGE_CAPS, true);
  fillSelect(el<HTMLSelectElement>("compute"), COMPUTE_CAPS, true);
  fillSelect(el<HTMLSelectElement>("speed"), SPEED_FLOORS, true);

  const panel = new AdvisorPanel(
    api,
    el("current-result"),
    el("previous-result"),
    el("scatter"),
    el("advise-error"),
  );
  const leaderboard = new LeaderboardView(el("leaderboard"));

  const hash = location.hash.replace(/^#/, "");
  writeState(hash ? decodeState(hash) : DEFAULT_STATE);

  const scopeSelect = el<HTMLSelectElement>("scope");

  async function submit(): Promise<void> {
    const state = readState();
    location.hash = encodeState(state);
    await Promise.all([panel.submit(state), refreshLeaderboard(leaderboard, state, scopeSelect.value)]);
  }

  el<HTMLButtonElement>("submit").addEventListener("click", () => void submit());
  el<HTMLSelectElement>("label-kind").addEventListener("change", () => void submit());
  scopeSelect.addEventListener("change", () => void refreshLeaderboard(leaderboard, readState(), scopeSelect.value));

  await submit();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void bootstrap();
}
