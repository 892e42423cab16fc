import { describe, expect, it } from "vitest";

import { parseServerMsg } from "../src/protocol.js";
import {
  chatSuggestions,
  initialClientView,
  recordOwnChat,
  reduce,
  visibleObjectIds,
} from "../src/view.js";
import { sampleView } from "./fixtures.js";

describe("reducer", () => {
  it("applies a state_update and clears the in-flight lock", () => {
    let s = initialClientView();
    s = { ...s, actionPending: true };
    s = reduce(s, { kind: "state_update", view: sampleView() });
    expect(s.view?.clock).toBe(3);
    expect(s.phase).toBe("running");
    expect(s.actionPending).toBe(false);
    expect(s.lastError).toBeNull();
  });

  it("appends assistant chat to the transcript exactly once", () => {
    let s = initialClientView();
    s = reduce(s, {
      kind: "assistant_chat",
      from: "assistant",
      text: "I found fork.323 in cabinet.132.",
      clock: 4,
    });
    expect(s.transcript).toHaveLength(1);
    expect(s.transcript[0].from).toBe("assistant");
    expect(s.transcript[0].text).toContain("fork.323");
  });

  it("reject clears the lock and records the reason", () => {
    let s = { ...initialClientView(), actionPending: true };
    s = reduce(s, { kind: "reject", reason: "illegal action" });
    expect(s.actionPending).toBe(false);
    expect(s.lastError).toBe("illegal action");
  });

  it("trial_done moves the phase to done", () => {
    let s = initialClientView();
    s = reduce(s, { kind: "trial_done", session: "s0000" });
    expect(s.phase).toBe("done");
    expect(s.done).toBe(true);
  });

  it("records the user's own chat lines", () => {
    let s = initialClientView();
    s = recordOwnChat(s, "where is plate.7?");
    expect(s.transcript[0]).toEqual({
      from: "you",
      text: "where is plate.7?",
    });
  });
});

describe("parseServerMsg", () => {
  it("rejects non-JSON and unknown kinds", () => {
    expect(parseServerMsg("not json")).toBeNull();
    expect(parseServerMsg('{"kind":"telepathy"}')).toBeNull();
    expect(parseServerMsg('"just a string"')).toBeNull();
  });

  it("accepts every protocol kind", () => {
    for (const kind of [
      "session_info",
      "state_update",
      "assistant_chat",
      "reject",
      "trial_done",
    ]) {
      expect(parseServerMsg(JSON.stringify({ kind }))).not.toBeNull();
    }
  });
});

describe("view helpers", () => {
  it("lists only objects present in the update", () => {
    expect(visibleObjectIds(sampleView())).toEqual(["apple.3", "plate.7"]);
  });

  it("suggests grammar-shaped chat lines", () => {
    const suggestions = chatSuggestions(sampleView());
    expect(suggestions).toContain("where is plate.7?");
    expect(suggestions).toContain("apple.3 is in fridge.10");
  });
});
