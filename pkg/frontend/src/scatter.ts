import type { Recommendation } from "./types.js";

// Efficiency-vs-accuracy scatter of the current recommendations: x is
// the server's efficiency subscore, y its accuracy component. Pure SVG,
// no scales beyond the fixed [0, 1] x [0, 1] domain.

const SIZE = 220;
const PAD = 26;

function coord(v: number): number {
  return PAD + v * (SIZE - 2 * PAD);
}

export function renderScatter(root: HTMLElement, entries: Recommendation[]): void {
  root.innerHTML = "";
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", `0 0 ${SIZE} ${SIZE}`);
  svg.setAttribute("class", "scatter");

  const axes = document.createElementNS("http://www.w3.org/2000/svg", "path");
  axes.setAttribute("d", `M ${PAD} ${PAD} L ${PAD} ${SIZE - PAD} L ${SIZE - PAD} ${SIZE - PAD}`);
  axes.setAttribute("class", "axes");
  svg.appendChild(axes);

  const xLabel = document.createElementNS("http://www.w3.org/2000/svg", "text");
  xLabel.textContent = "efficiency";
  xLabel.setAttribute("x", String(SIZE / 2));
  xLabel.setAttribute("y", String(SIZE - 6));
  xLabel.setAttribute("class", "axis-label");
  svg.appendChild(xLabel);
  const yLabel = document.createElementNS("http://www.w3.org/2000/svg", "text");
  yLabel.textContent = "accuracy";
  yLabel.setAttribute("x", "8");
  yLabel.setAttribute("y", String(SIZE / 2));
  yLabel.setAttribute("class", "axis-label vertical");
  svg.appendChild(yLabel);

  for (const entry of entries) {
    if (!entry.breakdown) continue;
    const dot = document.createElementNS("http://www.w3.org/2000/svg", "circle");
    dot.setAttribute("cx", String(coord(entry.breakdown.eff)));
    dot.setAttribute("cy", String(SIZE - coord(entry.breakdown.a)));
    dot.setAttribute("r", entry.rank === 1 ? "5" : "3");
    dot.setAttribute("class", entry.rank === 1 ? "dot top" : "dot");
    const title = document.createElementNS("http://www.w3.org/2000/svg", "title");
    title.textContent = `${entry.model} (eff ${entry.breakdown.eff.toFixed(3)}, acc ${entry.breakdown.a.toFixed(3)})`;
    dot.appendChild(title);
    svg.appendChild(dot);
  }
  root.appendChild(svg);
}
