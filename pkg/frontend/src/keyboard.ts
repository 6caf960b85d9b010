/** Keyboard shortcuts: digits 1-5 toggle the categories, Enter submits,
 * n/p (or arrows) move through the queue. Shortcuts stay inert while the
 * focus is in a text field, except Enter-with-Ctrl which always submits. */

import { CATEGORIES, Category } from "./types.js";

export type KeyAction =
  | { kind: "toggle"; category: Category }
  | { kind: "submit" }
  | { kind: "next" }
  | { kind: "prev" };

export interface KeyContext {
  typing: boolean; // focus is inside a text input or textarea
  ctrl: boolean;
}

export function actionForKey(key: string, context: KeyContext): KeyAction | null {
  if (key === "Enter" && (context.ctrl || !context.typing)) {
    return { kind: "submit" };
  }
  if (context.typing) {
    return null;
  }
  const digit = Number.parseInt(key, 10);
  if (digit >= 1 && digit <= CATEGORIES.length) {
    return { kind: "toggle", category: CATEGORIES[digit - 1] };
  }
  if (key === "n" || key === "ArrowRight") return { kind: "next" };
  if (key === "p" || key === "ArrowLeft") return { kind: "prev" };
  return null;
}

export function isTypingTarget(target: EventTarget | null): boolean {
  if (!(target instanceof HTMLElement)) return false;
  if (target instanceof HTMLTextAreaElement) return true;
  return target instanceof HTMLInputElement && target.type === "text";
}
