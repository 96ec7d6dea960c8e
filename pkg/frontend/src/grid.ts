// SVG patch-grid overlay: one clickable, keyboard-focusable rect per
// patch, with the entered size rendered inside labeled patches.

import { labeledEntries, patchKey, type ViewState } from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface GridCallbacks {
  onSelect(row: number, col: number): void;
}

export function renderGrid(
  container: HTMLElement,
  state: ViewState,
  callbacks: GridCallbacks,
): void {
  container.textContent = "";
  const info = state.info;
  if (!info) return;

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${info.working.width} ${info.working.height}`);
  svg.setAttribute("preserveAspectRatio", "none");
  svg.classList.add("grid-overlay");

  const sizes = new Map(labeledEntries(state).map((e) => [patchKey(e.row, e.col), e.size]));

  for (const patch of info.patches) {
    const key = patchKey(patch.row, patch.col);
    const group = document.createElementNS(SVG_NS, "g");

    const rect = document.createElementNS(SVG_NS, "rect");
    rect.setAttribute("x", String(patch.x0));
    rect.setAttribute("y", String(patch.y0));
    rect.setAttribute("width", String(patch.x1 - patch.x0));
    rect.setAttribute("height", String(patch.y1 - patch.y0));
    rect.setAttribute("data-patch", key);
    rect.setAttribute("tabindex", "0");
    rect.setAttribute("role", "button");
    rect.setAttribute(
      "aria-label",
      `patch row ${patch.row} column ${patch.col}` +
        (sizes.has(key) ? `, size ${sizes.get(key)} meters` : ", unlabeled"),
    );
    rect.classList.add("patch");
    rect.classList.add(sizes.has(key) ? "labeled" : "unlabeled");
    if (state.selected && patchKey(state.selected.row, state.selected.col) === key) {
      rect.classList.add("selected");
    }

    const select = () => callbacks.onSelect(patch.row, patch.col);
    rect.addEventListener("click", select);
    rect.addEventListener("keydown", (event) => {
      if (event.key === "Enter" || event.key === " ") {
        event.preventDefault();
        select();
      }
    });
    group.appendChild(rect);

    if (sizes.has(key)) {
      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String((patch.x0 + patch.x1) / 2));
      label.setAttribute("y", String((patch.y0 + patch.y1) / 2));
      label.setAttribute("text-anchor", "middle");
      label.setAttribute("dominant-baseline", "central");
      label.classList.add("patch-size");
      label.textContent = `${sizes.get(key)}`;
      group.appendChild(label);
    }
    svg.appendChild(group);
  }
  container.appendChild(svg);
}
