/**
 * DOM rendering for the three screens: annotation grid, review, and the
 * consistency queue. Rendering is plain DOM, re-run from state on every
 * change; the grid's bordered display zone re-renders synchronously on
 * each checkbox toggle.
 */

import type { ReviewItemView } from "./api.js";
import type { ConsistencyQueue } from "./consistency.js";
import { GridState } from "./grid.js";
import { ReviewState } from "./review.js";

export interface GridScreenOptions {
  /** Tokens per visual line before wrapping (the grid's pre-set limit). */
  tokensPerLine?: number;
  onSubmit?: (grid: GridState) => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** Render the checkbox grid plus its marked-MWE display zone. */
export function renderGrid(
  container: HTMLElement,
  grid: GridState,
  options: GridScreenOptions = {},
): void {
  const doc = container.ownerDocument;
  const tokensPerLine = options.tokensPerLine ?? 12;
  container.textContent = "";

  const zone = el(doc, "div", "mwe-display");
  zone.setAttribute("data-role", "marked-mwes");
  container.appendChild(zone);

  const table = el(doc, "div", "grid");
  for (let start = 0; start < grid.tokens.length; start += tokensPerLine) {
    const lineTokens = grid.tokens.slice(start, start + tokensPerLine);
    const line = el(doc, "table", "grid-line");
    const head = el(doc, "tr");
    head.appendChild(el(doc, "th", "", ""));
    lineTokens.forEach((surface) => head.appendChild(el(doc, "th", "token", surface)));
    line.appendChild(head);

    for (let row = 0; row < grid.rowCount; row += 1) {
      const tr = el(doc, "tr");
      tr.appendChild(el(doc, "th", "row-label", String(row + 1)));
      lineTokens.forEach((_, offset) => {
        const position = start + offset + 1;
        const td = el(doc, "td");
        const box = el(doc, "input") as HTMLInputElement;
        box.type = "checkbox";
        box.checked = grid.isChecked(row, position);
        box.setAttribute("data-row", String(row));
        box.setAttribute("data-position", String(position));
        box.addEventListener("change", () => {
          grid.toggle(row, position);
          refresh();
        });
        td.appendChild(box);
        tr.appendChild(td);
      });
      line.appendChild(tr);
    }
    table.appendChild(line);
  }
  container.appendChild(table);

  const warning = el(doc, "div", "warning");
  warning.setAttribute("data-role", "warnings");
  container.appendChild(warning);

  const addRow = el(doc, "button", "add-row", "add row");
  addRow.addEventListener("click", () => {
    grid.addRow();
    renderGrid(container, grid, options);
  });
  container.appendChild(addRow);

  const submit = el(doc, "button", "submit", "submit");
  submit.setAttribute("data-role", "submit");
  submit.addEventListener("click", () => {
    if (grid.canSubmit() && options.onSubmit) options.onSubmit(grid);
  });
  container.appendChild(submit);

  function refresh(): void {
    const marked = grid.markedMwes();
    zone.textContent = marked.length
      ? marked.map((m) => `${m.row + 1}: ${m.display}`).join("\n")
      : "(no MWEs marked)";
    const invalid = grid.invalidRows();
    warning.textContent = invalid.length
      ? `rows with a single check: ${invalid.map((r) => r + 1).join(", ")}`
      : "";
    (submit as HTMLButtonElement).disabled = !grid.canSubmit();
  }
  refresh();
}

/** Render the review screen: union items, verdict buttons, finalize gate. */
export function renderReview(
  container: HTMLElement,
  state: ReviewState,
  onFinalize?: (state: ReviewState) => void,
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  const tokens = state.review.tokens.map((t) => t.surface);

  const list = el(doc, "ul", "review-items");
  state.items.forEach((item: ReviewItemView) => {
    const li = el(doc, "li", item.highlight ? "item highlight" : "item");
    const span = item.token_indices
      .map((position) => tokens[position - 1] ?? `#${position}`)
      .join(" ");
    li.appendChild(el(doc, "span", "span-text", span));
    li.appendChild(el(doc, "span", "who", item.annotators.join("+")));
    if (item.highlight) {
      for (const verdict of ["keep", "delete"] as const) {
        const button = el(doc, "button", `verdict-${verdict}`, verdict);
        button.addEventListener("click", () => {
          state.setVerdict(item.token_indices, verdict);
          renderReview(container, state, onFinalize);
        });
        li.appendChild(button);
      }
      const chosen = state.verdictFor(item.token_indices);
      if (chosen) li.appendChild(el(doc, "em", "chosen", chosen));
    }
    list.appendChild(li);
  });
  container.appendChild(list);

  const finalize = el(doc, "button", "finalize", "finalize") as HTMLButtonElement;
  finalize.setAttribute("data-role", "finalize");
  finalize.disabled = !state.canFinalize();
  finalize.addEventListener("click", () => {
    if (state.canFinalize() && onFinalize) onFinalize(state);
  });
  container.appendChild(finalize);
}

/** Render the consistency queue: candidate next to exemplar, accept/reject. */
export function renderQueue(container: HTMLElement, queue: ConsistencyQueue): void {
  const doc = container.ownerDocument;
  container.textContent = "";

  const badge = el(doc, "span", "badge", String(queue.pendingCount()));
  badge.setAttribute("data-role", "pending-count");
  container.appendChild(badge);

  const list = el(doc, "ul", "queue");
  for (const item of queue.items) {
    const li = el(doc, "li", `candidate ${item.status}`);
    li.setAttribute("data-id", item.candidate.id);
    li.appendChild(el(
      doc, "span", "where",
      `${item.candidate.sentence_id} [${item.candidate.token_indices.join(",")}]`,
    ));
    li.appendChild(el(doc, "span", "entry", item.candidate.matched_entry));
    li.appendChild(el(
      doc, "span", "exemplar",
      `exemplar: ${item.candidate.exemplar.sentence_id} `
      + `[${item.candidate.exemplar.token_indices.join(",")}]`,
    ));
    if (item.status === "pending") {
      for (const decision of ["accept", "reject"] as const) {
        const button = el(doc, "button", decision, decision);
        button.addEventListener("click", () => {
          void queue.decide(item.candidate.id, decision)
            .then(() => renderQueue(container, queue))
            .catch(() => renderQueue(container, queue));
        });
        li.appendChild(button);
      }
    }
    list.appendChild(li);
  }
  container.appendChild(list);
}
