/** Draft state for one item's five-category judgment.
 *
 * Dependencies are enforced at the state level, so no interaction sequence
 * can produce a payload the backend would reject:
 *  - lj_basic_correct can only be set while lj_identified is set;
 *  - additional_metaphorical / additional_basic_correct only while
 *    additional is set;
 *  - clearing a prerequisite clears its dependents.
 */

import { CATEGORIES, Category, RecordPayload } from "./types.js";

export type CategoryValues = Record<Category, boolean>;

const PREREQUISITE: Partial<Record<Category, Category>> = {
  lj_basic_correct: "lj_identified",
  additional_metaphorical: "additional",
  additional_basic_correct: "additional",
};

const DEPENDENTS: Partial<Record<Category, Category[]>> = {
  lj_identified: ["lj_basic_correct"],
  additional: ["additional_metaphorical", "additional_basic_correct"],
};

export function emptyValues(): CategoryValues {
  return {
    lj_identified: false,
    lj_basic_correct: false,
    additional: false,
    additional_metaphorical: false,
    additional_basic_correct: false,
  };
}

/** True when the value combination satisfies the backend invariants. */
export function isLegal(values: CategoryValues): boolean {
  if (values.lj_basic_correct && !values.lj_identified) return false;
  if (!values.additional && (values.additional_metaphorical || values.additional_basic_correct)) {
    return false;
  }
  return true;
}

export class DraftState {
  values: CategoryValues = emptyValues();
  note = "";

  /** Whether the control for this category should be interactable. */
  enabled(category: Category): boolean {
    const prerequisite = PREREQUISITE[category];
    return prerequisite === undefined || this.values[prerequisite];
  }

  /** Toggle a category; returns false when the control is disabled. */
  toggle(category: Category): boolean {
    if (!this.values[category] && !this.enabled(category)) {
      return false;
    }
    this.values[category] = !this.values[category];
    if (!this.values[category]) {
      for (const dependent of DEPENDENTS[category] ?? []) {
        this.values[dependent] = false;
      }
    }
    return true;
  }

  /** Payload for POST; dependent fields are omitted unless additional is set. */
  toPayload(annotatorId: string): RecordPayload {
    const payload: RecordPayload = {
      annotator_id: annotatorId,
      lj_identified: this.values.lj_identified,
      lj_basic_correct: this.values.lj_basic_correct,
      additional: this.values.additional,
    };
    if (this.values.additional) {
      payload.additional_metaphorical = this.values.additional_metaphorical;
      payload.additional_basic_correct = this.values.additional_basic_correct;
    }
    if (this.note.trim()) {
      payload.note = this.note.trim();
    }
    return payload;
  }

  reset(): void {
    this.values = emptyValues();
    this.note = "";
  }

  serialize(): string {
    return JSON.stringify({ values: this.values, note: this.note });
  }

  static deserialize(raw: string): DraftState {
    const draft = new DraftState();
    try {
      const data = JSON.parse(raw);
      for (const category of CATEGORIES) {
        if (typeof data?.values?.[category] === "boolean") {
          draft.values[category] = data.values[category];
        }
      }
      if (typeof data?.note === "string") {
        draft.note = data.note;
      }
    } catch {
      // a damaged stored draft degrades to an empty one
    }
    if (!isLegal(draft.values)) {
      draft.values = emptyValues();
    }
    return draft;
  }
}

/** Per-item draft persistence so a reload never loses work in progress. */
export class DraftStore {
  constructor(
    private storage: Pick<Storage, "getItem" | "setItem" | "removeItem">,
    private prefix = "mipw-draft",
  ) {}

  key(itemId: string): string {
    return `${this.prefix}:${itemId}`;
  }

  load(itemId: string): DraftState {
    const raw = this.storage.getItem(this.key(itemId));
    return raw === null ? new DraftState() : DraftState.deserialize(raw);
  }

  save(itemId: string, draft: DraftState): void {
    this.storage.setItem(this.key(itemId), draft.serialize());
  }

  clear(itemId: string): void {
    this.storage.removeItem(this.key(itemId));
  }
}
