import type { View } from "../src/protocol.js";

export function sampleView(overrides: Partial<View> = {}): View {
  return {
    clock: 3,
    room: "kitchen",
    rooms: ["kitchen", "livingroom"],
    held: null,
    objects: {
      "plate.7": { location: "table.1", status: "raw" },
      "apple.3": { location: "cabinet.11", status: "raw" },
    },
    containers: [
      { id: "fridge.10", open: false, contents: null },
      { id: "cabinet.11", open: true, contents: ["apple.3"] },
    ],
    surfaces: [
      { id: "table.1", serving: false, contents: ["plate.7"] },
      { id: "counter.2", serving: true, contents: [] },
    ],
    agents: { human: { room: "kitchen", held: null } },
    legal_actions: ["wait", "open:fridge.10", "grab:plate.7"],
    phase: "running",
    ...overrides,
  };
}
