/** Shared types mirroring the workbench JSON API. */

export type Judgment = "yes" | "no" | "unmarked";

export interface TokenView {
  surface: string;
  start: number;
  end: number;
}

export interface TokenLabelView {
  judgment: Judgment;
  provenance: string;
}

export interface MetaphorSpanView {
  token_range: [number, number];
  key_indices: number[];
}

export interface UnitView {
  surface: string;
  kind: "word" | "phrase";
  pos: string | null;
  judgment: Judgment;
  gloss: string | null;
}

export interface DiagnosticView {
  kind: string;
  location: number;
  message: string;
}

export interface Item {
  id: string;
  model_id: string;
  sentence: string;
  tokens: TokenView[];
  token_labels: TokenLabelView[];
  lj_metaphors: MetaphorSpanView[];
  conceptual_metaphor: string | null;
  units: UnitView[];
  diagnostics: DiagnosticView[];
  coverage: number;
  raw_response: string;
  completed_by: string[];
}

/** The five binary judgment categories, in display and shortcut order. */
export const CATEGORIES = [
  "lj_identified",
  "lj_basic_correct",
  "additional",
  "additional_metaphorical",
  "additional_basic_correct",
] as const;

export type Category = (typeof CATEGORIES)[number];

export const CATEGORY_LABELS: Record<Category, string> = {
  lj_identified: "L&J metaphor(s) identified",
  lj_basic_correct: "L&J basic meanings correct",
  additional: "Additional annotations",
  additional_metaphorical: "Additional: plausibly metaphorical",
  additional_basic_correct: "Additional: basic meanings correct",
};

export interface RecordPayload {
  annotator_id: string;
  lj_identified: boolean;
  lj_basic_correct: boolean;
  additional: boolean;
  additional_metaphorical?: boolean;
  additional_basic_correct?: boolean;
  note?: string;
}

export interface ExportedRecord {
  sentence_id: string;
  model_id: string;
  annotator_id: string;
  lj_identified: boolean;
  lj_basic_correct: boolean;
  additional: boolean;
  additional_metaphorical: boolean | null;
  additional_basic_correct: boolean | null;
  note: string | null;
}

export interface Conflict {
  sentence_id: string;
  model_id: string;
  records: ExportedRecord[];
}

export interface FieldError {
  field: string;
  message: string;
}
