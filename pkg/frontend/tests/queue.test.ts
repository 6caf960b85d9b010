import { describe, expect, it } from "vitest";

import { filterQueue, nextIncomplete, orderItems, progressLabel } from "../src/queue.js";
import { Item } from "../src/types.js";

function item(id: string, completedBy: string[] = []): Item {
  return {
    id,
    model_id: "m",
    sentence: "s",
    tokens: [],
    token_labels: [],
    lj_metaphors: [],
    conceptual_metaphor: null,
    units: [],
    diagnostics: [],
    coverage: 1,
    raw_response: "",
    completed_by: completedBy,
  };
}

describe("queue", () => {
  it("orders deterministically by id", () => {
    const items = [item("b"), item("a"), item("c")];
    expect(orderItems(items).map((i) => i.id)).toEqual(["a", "b", "c"]);
    expect(items.map((i) => i.id)).toEqual(["b", "a", "c"]); // input untouched
  });

  it("progress counts only this annotator's completions", () => {
    const items = [item("a", ["alice"]), item("b", ["bob"]), item("c")];
    expect(progressLabel(items, "alice")).toBe("1 / 3");
    expect(progressLabel(items, "carol")).toBe("0 / 3");
  });

  it("fresh queue of 100 reads 0 / 100", () => {
    const items = Array.from({ length: 100 }, (_, i) =>
      item(`item-${String(i).padStart(3, "0")}`),
    );
    expect(progressLabel(items, "alice")).toBe("0 / 100");
  });

  it("incomplete filter after 40 submissions lists 60", () => {
    const items = Array.from({ length: 100 }, (_, i) =>
      item(`item-${String(i).padStart(3, "0")}`, i < 40 ? ["alice"] : []),
    );
    expect(filterQueue(items, "alice", "incomplete")).toHaveLength(60);
    expect(filterQueue(items, "alice", "complete")).toHaveLength(40);
    expect(filterQueue(items, "alice", "all")).toHaveLength(100);
  });

  it("nextIncomplete wraps and returns null when everything is done", () => {
    const items = [item("a", ["x"]), item("b"), item("c", ["x"])];
    expect(nextIncomplete(items, "x", null)?.id).toBe("b");
    expect(nextIncomplete(items, "x", "b")?.id).toBe("b"); // wraps around
    const done = [item("a", ["x"]), item("b", ["x"])];
    expect(nextIncomplete(done, "x", null)).toBeNull();
    expect(nextIncomplete([], "x", null)).toBeNull();
  });
});
