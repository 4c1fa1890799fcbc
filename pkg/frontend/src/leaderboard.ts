import type { LeaderboardEntry, LeaderboardPayload } from "./types.js";

// Column sorting is a pure client-side reordering of the rows the
// server sent; "reset" restores the server order exactly.

export interface SortSpec {
  column: string | null; // null = server order; "value" or a dataset key
  descending: boolean;
}

export function sortedEntries(entries: LeaderboardEntry[], sort: SortSpec): LeaderboardEntry[] {
  if (sort.column === null) return entries.slice();
  const key = sort.column;
  const value = (e: LeaderboardEntry) => (key === "value" ? e.value : e.per_dataset[key] ?? Number.NEGATIVE_INFINITY);
  return entries
    .slice()
    .sort((a, b) => (sort.descending ? value(b) - value(a) : value(a) - value(b)) || a.model.localeCompare(b.model));
}

export class LeaderboardView {
  sort: SortSpec = { column: null, descending: true };
  private payload: LeaderboardPayload | null = null;

  constructor(private readonly root: HTMLElement) {}

  setPayload(payload: LeaderboardPayload): void {
    this.payload = payload;
    this.sort = { column: null, descending: true };
    this.render();
  }

  setError(message: string): void {
    this.root.innerHTML = "";
    const div = document.createElement("div");
    div.className = "error";
    div.textContent = `leaderboard unavailable: ${message}`;
    this.root.appendChild(div);
  }

  toggleSort(column: string): void {
    if (this.sort.column === column) {
      this.sort = { column, descending: !this.sort.descending };
    } else {
      this.sort = { column, descending: true };
    }
    this.render();
  }

  resetSort(): void {
    this.sort = { column: null, descending: true };
    this.render();
  }

  rows(): LeaderboardEntry[] {
    if (!this.payload) return [];
    return sortedEntries(this.payload.entries, this.sort);
  }

  render(): void {
    this.root.innerHTML = "";
    if (!this.payload) return;
    const { entries, metric, scope, value_source } = this.payload;
    if (entries.length === 0) {
      const empty = document.createElement("div");
      empty.className = "empty";
      empty.textContent = "no models in this registry";
      this.root.appendChild(empty);
      return;
    }
    const caption = document.createElement("div");
    caption.className = "caption";
    caption.textContent = `${metric} / ${scope}${value_source ? ` (${value_source})` : ""}`;
    this.root.appendChild(caption);

    const table = document.createElement("table");
    table.className = "leaderboard";
    const head = table.createTHead().insertRow();
    for (const column of ["rank", "model", "value", "sig"]) {
      const th = document.createElement("th");
      th.textContent = column;
      if (column === "value") {
        th.classList.add("sortable");
        th.addEventListener("click", () => this.toggleSort("value"));
      }
      head.appendChild(th);
    }
    const reset = document.createElement("th");
    const button = document.createElement("button");
    button.textContent = "server order";
    button.className = "reset-sort";
    button.addEventListener("click", () => this.resetSort());
    reset.appendChild(button);
    head.appendChild(reset);

    const body = table.createTBody();
    for (const entry of this.rows()) {
      const row = body.insertRow();
      row.insertCell().textContent = String(entry.rank);
      row.insertCell().textContent = entry.model;
      row.insertCell().textContent = entry.value.toFixed(2);
      const sig = row.insertCell();
      sig.textContent = entry.tier ? entry.tier.glyph : "";
      if (entry.tier) sig.title = `${entry.tier.tier} (${entry.tier.direction})`;
      row.insertCell();
    }
    this.root.appendChild(table);
  }
}
