/** DOM rendering: judgment-colored sentence tokens with gold-span underlines,
 * the five dependency-aware controls, diagnostics, and the conflict view. */

import { DraftState } from "./state.js";
import {
  CATEGORIES,
  CATEGORY_LABELS,
  Category,
  Conflict,
  FieldError,
  Item,
} from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function goldTokenIndices(item: Item): { inSpan: Set<number>; key: Set<number> } {
  const inSpan = new Set<number>();
  const key = new Set<number>();
  for (const span of item.lj_metaphors) {
    for (let i = span.token_range[0]; i <= span.token_range[1]; i++) inSpan.add(i);
    for (const k of span.key_indices) key.add(k);
  }
  return { inSpan, key };
}

/** The sentence as judgment-colored token spans; gold L&J spans underlined
 * independently so model misses stay visible. */
export function renderSentence(item: Item): HTMLElement {
  const container = el("p", "sentence");
  const gold = goldTokenIndices(item);
  item.tokens.forEach((token, ix) => {
    if (ix > 0) {
      container.append(document.createTextNode(" "));
    }
    const judgment = item.token_labels[ix]?.judgment ?? "unmarked";
    const span = el("span", `token judgment-${judgment}`, token.surface);
    span.dataset.index = String(ix);
    if (gold.inSpan.has(ix)) span.classList.add("lj-gold");
    if (gold.key.has(ix)) span.classList.add("lj-key");
    const provenance = item.token_labels[ix]?.provenance;
    if (provenance) span.title = `${judgment} (${provenance})`;
    container.append(span);
  });
  return container;
}

export function renderMeta(item: Item): HTMLElement {
  const box = el("div", "meta");
  if (item.conceptual_metaphor) {
    box.append(el("div", "conceptual", item.conceptual_metaphor));
  }
  const coverage = el("div", "coverage", `parser coverage: ${(item.coverage * 100).toFixed(0)}%`);
  box.append(coverage);
  if (item.diagnostics.length > 0) {
    const list = el("ul", "diagnostics");
    for (const diag of item.diagnostics) {
      list.append(el("li", `diag-${diag.kind}`, `${diag.kind}: ${diag.message}`));
    }
    box.append(list);
  }
  return box;
}

export function renderRawResponse(item: Item): HTMLElement {
  const details = el("details", "raw-response");
  details.append(el("summary", undefined, "raw model response"));
  const pre = el("pre");
  pre.textContent = item.raw_response;
  details.append(pre);
  return details;
}

export interface ControlRefs {
  root: HTMLElement;
  checkboxes: Record<Category, HTMLInputElement>;
  note: HTMLTextAreaElement;
  submit: HTMLButtonElement;
  errors: HTMLElement;
}

export function buildControls(): ControlRefs {
  const root = el("form", "controls");
  root.addEventListener("submit", (event) => event.preventDefault());
  const checkboxes = {} as Record<Category, HTMLInputElement>;
  CATEGORIES.forEach((category, ix) => {
    const row = el("label", `category-row row-${category}`);
    const box = el("input") as HTMLInputElement;
    box.type = "checkbox";
    box.id = `cat-${category}`;
    checkboxes[category] = box;
    row.append(box, el("span", "key-hint", `${ix + 1}`), el("span", undefined, CATEGORY_LABELS[category]));
    root.append(row);
  });
  const note = el("textarea", "note") as HTMLTextAreaElement;
  note.id = "note";
  note.placeholder = "note (optional)";
  const submit = el("button", "submit") as HTMLButtonElement;
  submit.id = "submit";
  submit.type = "submit";
  submit.textContent = "Submit (Enter)";
  const errors = el("div", "field-errors");
  errors.id = "field-errors";
  root.append(note, submit, errors);
  return { root, checkboxes, note, submit, errors };
}

/** Reflect the draft into the controls: checked state plus the dependency
 * gating (disabled until prerequisites are set). */
export function syncControls(refs: ControlRefs, draft: DraftState): void {
  for (const category of CATEGORIES) {
    const box = refs.checkboxes[category];
    box.checked = draft.values[category];
    box.disabled = !draft.enabled(category);
  }
  refs.note.value = draft.note;
}

export function renderFieldErrors(refs: ControlRefs, errors: FieldError[]): void {
  refs.errors.replaceChildren();
  for (const error of errors) {
    refs.errors.append(el("div", "field-error", `${error.field}: ${error.message}`));
  }
}

/** Two annotators' records side by side for consensus discussion. */
export function renderConflict(conflict: Conflict): HTMLElement {
  const box = el("div", "conflict");
  box.append(el("h3", undefined, `disagreement on ${conflict.sentence_id}`));
  const table = el("table", "conflict-table");
  const header = el("tr");
  header.append(el("th", undefined, "category"));
  for (const record of conflict.records) {
    header.append(el("th", undefined, record.annotator_id));
  }
  table.append(header);
  for (const category of CATEGORIES) {
    const row = el("tr");
    row.append(el("td", undefined, CATEGORY_LABELS[category]));
    for (const record of conflict.records) {
      const value = (record as unknown as Record<string, boolean | null>)[category];
      row.append(el("td", "conflict-value", value === null ? "-" : value ? "yes" : "no"));
    }
    table.append(row);
  }
  box.append(table);
  return box;
}
