/** HTML renderer for the client view.
 *
 * Renders only what the latest state_update contains: closed containers
 * draw opaque with no contents, other rooms never render their objects.
 * Pure string output so it is testable without a browser. */

import type { View } from "./protocol.js";
import type { ClientView } from "./view.js";

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function tile(cls: string, label: string, body: string): string {
  return `<div class="tile ${cls}"><span class="label">${esc(
    label
  )}</span>${body}</div>`;
}

function objectChips(view: View, location: string): string {
  const chips = Object.entries(view.objects)
    .filter(([, o]) => o.location === location)
    .sort(([a], [b]) => (a < b ? -1 : 1))
    .map(
      ([oid, o]) =>
        `<span class="obj" data-oid="${esc(oid)}">${esc(oid)} (${esc(
          o.status
        )})</span>`
    );
  return chips.join("");
}

export function renderGrid(view: View): string {
  const parts: string[] = [];
  parts.push(
    `<div class="room-header">room: ${esc(view.room)} | clock ${
      view.clock
    }</div>`
  );
  for (const c of view.containers) {
    if (!c.open) {
      // occluded: never draw contents of a closed container
      parts.push(tile("container closed", c.id, `<span class="opaque">closed</span>`));
    } else {
      parts.push(tile("container open", c.id, objectChips(view, c.id)));
    }
  }
  for (const s of view.surfaces) {
    const cls = s.serving ? "surface serving" : "surface";
    parts.push(tile(cls, s.id, objectChips(view, s.id)));
  }
  const held = view.held === null ? "nothing" : view.held;
  parts.push(`<div class="held">holding: ${esc(held)}</div>`);
  const others = Object.entries(view.agents)
    .map(([aid, a]) => `${esc(aid)} in ${esc(a.room)}`)
    .join(", ");
  parts.push(`<div class="agents">${others}</div>`);
  return `<div class="grid">${parts.join("")}</div>`;
}

export function renderActions(state: ClientView): string {
  const view = state.view;
  if (view === null || view.phase !== "running") return "";
  const disabled = state.actionPending ? " disabled" : "";
  const buttons = view.legal_actions
    .map(
      (a) =>
        `<button class="act" data-action="${esc(a)}"${disabled}>${esc(
          a
        )}</button>`
    )
    .join("");
  return `<div class="actions">${buttons}</div>`;
}

export function renderChat(state: ClientView): string {
  const lines = state.transcript
    .map(
      (l) =>
        `<div class="chat-line ${l.from}"><span class="badge">${esc(
          l.from
        )}</span>${esc(l.text)}</div>`
    )
    .join("");
  return `<div class="chat">${lines}</div>`;
}

const CRITERIA: Array<[string, string]> = [
  ["helpful", "The assistant was helpful"],
  ["understands_goal", "The assistant understood my goal"],
  ["useful_communication", "The assistant's messages were useful"],
  ["over_communication", "The assistant communicated too much"],
];

export function renderRatingForm(): string {
  const rows = CRITERIA.map(([key, label]) => {
    const radios = [1, 2, 3, 4, 5, 6, 7]
      .map(
        (v) =>
          `<label><input type="radio" name="${key}" value="${v}">${v}</label>`
      )
      .join("");
    return `<div class="criterion" data-criterion="${key}"><span>${esc(
      label
    )}</span>${radios}</div>`;
  }).join("");
  return `<form class="rating">${rows}<button type="submit">submit</button></form>`;
}

export function renderBanner(state: ClientView, connected: boolean): string {
  if (!connected) {
    return `<div class="banner error">connection lost, reconnecting...</div>`;
  }
  if (state.lastError !== null) {
    return `<div class="banner warn">${esc(state.lastError)}</div>`;
  }
  if (state.phase === "done") {
    return `<div class="banner">trial complete, thank you</div>`;
  }
  return "";
}

export function render(state: ClientView, connected: boolean): string {
  const pieces = [renderBanner(state, connected)];
  if (state.view !== null) {
    pieces.push(renderGrid(state.view));
    pieces.push(renderActions(state));
  }
  pieces.push(renderChat(state));
  if (state.phase === "rating") {
    pieces.push(renderRatingForm());
  }
  return pieces.join("");
}
