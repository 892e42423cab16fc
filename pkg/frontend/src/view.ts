/** Client-side session state: a pure reducer over server events. */

import type { Phase, ServerMsg, SessionInfo, View } from "./protocol.js";

export interface ChatLine {
  from: "you" | "assistant" | "system";
  text: string;
}

export interface ClientView {
  info: SessionInfo | null;
  view: View | null;
  transcript: ChatLine[];
  /** true between sending an act and receiving its state_update/reject */
  actionPending: boolean;
  lastError: string | null;
  phase: Phase;
  done: boolean;
}

export function initialClientView(): ClientView {
  return {
    info: null,
    view: null,
    transcript: [],
    actionPending: false,
    lastError: null,
    phase: "lobby",
    done: false,
  };
}

export function reduce(state: ClientView, msg: ServerMsg): ClientView {
  switch (msg.kind) {
    case "session_info":
      return { ...state, info: msg };
    case "state_update":
      return {
        ...state,
        view: msg.view,
        phase: msg.view.phase,
        actionPending: false,
        lastError: null,
      };
    case "assistant_chat":
      return {
        ...state,
        transcript: [
          ...state.transcript,
          { from: "assistant", text: msg.text },
        ],
      };
    case "reject":
      return {
        ...state,
        actionPending: false,
        lastError: msg.reason,
        transcript: [
          ...state.transcript,
          { from: "system", text: `rejected: ${msg.reason}` },
        ],
      };
    case "trial_done":
      return { ...state, phase: "done", done: true };
  }
}

export function recordOwnChat(state: ClientView, text: string): ClientView {
  return {
    ...state,
    transcript: [...state.transcript, { from: "you", text }],
  };
}

/** Every object id the client is allowed to draw. Anything not in the
 * latest state_update simply does not exist for the renderer. */
export function visibleObjectIds(view: View): string[] {
  return Object.keys(view.objects).sort();
}

/** Chat autocomplete suggestions matching the server's template grammar. */
export function chatSuggestions(view: View): string[] {
  const out: string[] = [];
  const locations = [
    ...view.containers.map((c) => c.id),
    ...view.surfaces.map((s) => s.id),
  ];
  for (const oid of visibleObjectIds(view)) {
    out.push(`where is ${oid}?`);
    for (const loc of locations) {
      out.push(`${oid} is in ${loc}`);
    }
  }
  return out;
}
