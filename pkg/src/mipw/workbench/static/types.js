/** Shared types mirroring the workbench JSON API. */
/** The five binary judgment categories, in display and shortcut order. */
export const CATEGORIES = [
    "lj_identified",
    "lj_basic_correct",
    "additional",
    "additional_metaphorical",
    "additional_basic_correct",
];
export const CATEGORY_LABELS = {
    lj_identified: "L&J metaphor(s) identified",
    lj_basic_correct: "L&J basic meanings correct",
    additional: "Additional annotations",
    additional_metaphorical: "Additional: plausibly metaphorical",
    additional_basic_correct: "Additional: basic meanings correct",
};
