/** Queue ordering, filtering, and progress for the annotation loop. */

import { Item } from "./types.js";

export type StatusFilter = "all" | "incomplete" | "complete";

export function orderItems(items: Item[]): Item[] {
  return [...items].sort((a, b) => (a.id < b.id ? -1 : a.id > b.id ? 1 : 0));
}

export function isComplete(item: Item, annotator: string): boolean {
  return item.completed_by.includes(annotator);
}

export function filterQueue(
  items: Item[],
  annotator: string,
  status: StatusFilter,
): Item[] {
  const ordered = orderItems(items);
  if (status === "all") return ordered;
  return ordered.filter((item) => isComplete(item, annotator) === (status === "complete"));
}

export function progressLabel(items: Item[], annotator: string): string {
  const done = items.filter((item) => isComplete(item, annotator)).length;
  return `${done} / ${items.length}`;
}

/** Next incomplete item after the given one, wrapping around; null when done. */
export function nextIncomplete(
  items: Item[],
  annotator: string,
  afterId: string | null,
): Item | null {
  const ordered = orderItems(items);
  if (ordered.length === 0) return null;
  const start = afterId === null ? 0 : ordered.findIndex((i) => i.id === afterId) + 1;
  for (let step = 0; step < ordered.length; step++) {
    const item = ordered[(start + step) % ordered.length];
    if (!isComplete(item, annotator)) return item;
  }
  return null;
}
