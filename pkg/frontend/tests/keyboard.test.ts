import { describe, expect, it } from "vitest";

import { actionForKey } from "../src/keyboard.js";
import { CATEGORIES } from "../src/types.js";

const idle = { typing: false, ctrl: false };
const typing = { typing: true, ctrl: false };

describe("keyboard mapping", () => {
  it("digits 1-5 toggle the categories in order", () => {
    CATEGORIES.forEach((category, ix) => {
      expect(actionForKey(String(ix + 1), idle)).toEqual({ kind: "toggle", category });
    });
  });

  it("enter submits", () => {
    expect(actionForKey("Enter", idle)).toEqual({ kind: "submit" });
  });

  it("navigation keys", () => {
    expect(actionForKey("n", idle)).toEqual({ kind: "next" });
    expect(actionForKey("ArrowRight", idle)).toEqual({ kind: "next" });
    expect(actionForKey("p", idle)).toEqual({ kind: "prev" });
    expect(actionForKey("ArrowLeft", idle)).toEqual({ kind: "prev" });
  });

  it("stays inert while typing, except ctrl+enter", () => {
    expect(actionForKey("1", typing)).toBeNull();
    expect(actionForKey("n", typing)).toBeNull();
    expect(actionForKey("Enter", typing)).toBeNull();
    expect(actionForKey("Enter", { typing: true, ctrl: true })).toEqual({ kind: "submit" });
  });

  it("unknown keys do nothing", () => {
    expect(actionForKey("x", idle)).toBeNull();
    expect(actionForKey("6", idle)).toBeNull();
    expect(actionForKey("0", idle)).toBeNull();
  });
});
