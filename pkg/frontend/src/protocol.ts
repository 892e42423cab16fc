/** Wire protocol for the goma session server (newline-delimited JSON
 * over one WebSocket per session). */

export type ActionSpec =
  | string
  | { type: string; target?: string | null; dest?: string | null };

export interface JoinMsg {
  kind: "join";
  scenario?: string;
  condition?: string;
}

export interface ActMsg {
  kind: "act";
  action: ActionSpec;
}

export interface ChatMsg {
  kind: "chat";
  text: string;
}

export interface Ratings {
  helpful: number;
  understands_goal: number;
  useful_communication: number;
  over_communication: number;
}

export interface RateMsg {
  kind: "rate";
  ratings: Ratings;
}

export type ClientMsg = JoinMsg | ActMsg | ChatMsg | RateMsg;

export interface SessionInfo {
  kind: "session_info";
  session: string;
  scenario: string;
  family: string;
  condition: string;
  goal: unknown;
  rating_criteria: string[];
  t_max: number;
}

export interface ContainerView {
  id: string;
  open: boolean;
  /** null while the container is closed: contents are occluded. */
  contents: string[] | null;
}

export interface SurfaceView {
  id: string;
  serving: boolean;
  contents: string[];
}

export interface ObjectView {
  location: string;
  status: string;
}

export type Phase = "lobby" | "running" | "rating" | "done";

export interface View {
  clock: number;
  room: string;
  rooms: string[];
  held: string | null;
  objects: Record<string, ObjectView>;
  containers: ContainerView[];
  surfaces: SurfaceView[];
  agents: Record<string, { room: string; held: string | null }>;
  legal_actions: string[];
  phase: Phase;
}

export interface StateUpdate {
  kind: "state_update";
  view: View;
}

export interface AssistantChat {
  kind: "assistant_chat";
  from: string;
  text: string;
  clock: number;
}

export interface Reject {
  kind: "reject";
  reason: string;
  legal?: string[];
}

export interface TrialDone {
  kind: "trial_done";
  session: string;
}

export type ServerMsg =
  | SessionInfo
  | StateUpdate
  | AssistantChat
  | Reject
  | TrialDone;

export function parseServerMsg(raw: string): ServerMsg | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const kind = (data as { kind?: unknown }).kind;
  if (
    kind === "session_info" ||
    kind === "state_update" ||
    kind === "assistant_chat" ||
    kind === "reject" ||
    kind === "trial_done"
  ) {
    return data as ServerMsg;
  }
  return null;
}
