/** WebSocket wiring: one protocol message per user input, controls locked
 * while an act is in flight. */

import type { ActionSpec, ClientMsg, Ratings, ServerMsg } from "./protocol.js";
import { parseServerMsg } from "./protocol.js";
import type { ClientView } from "./view.js";
import { initialClientView, recordOwnChat, reduce } from "./view.js";

/** The slice of WebSocket the client needs; lets tests inject a fake. */
export interface Socket {
  send(data: string): void;
  close(): void;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: (() => void) | null;
  onopen: (() => void) | null;
}

export class SessionClient {
  state: ClientView = initialClientView();
  connected = false;
  private listeners: Array<(s: ClientView) => void> = [];

  constructor(private socket: Socket) {
    socket.onopen = () => {
      this.connected = true;
      this.emit();
    };
    socket.onmessage = (ev) => {
      const msg = parseServerMsg(ev.data);
      if (msg !== null) this.apply(msg);
    };
    socket.onclose = () => {
      this.connected = false;
      this.emit();
    };
  }

  onChange(fn: (s: ClientView) => void): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    for (const fn of this.listeners) fn(this.state);
  }

  private apply(msg: ServerMsg): void {
    this.state = reduce(this.state, msg);
    this.emit();
  }

  private send(msg: ClientMsg): void {
    this.socket.send(JSON.stringify(msg));
  }

  join(scenario?: string, condition?: string): void {
    this.send({ kind: "join", scenario, condition });
  }

  /** Returns false if the input was refused locally (phase or in-flight
   * lock); exactly one act message goes out otherwise. */
  act(action: ActionSpec): boolean {
    if (this.state.phase !== "running" || this.state.actionPending) {
      return false;
    }
    this.state = { ...this.state, actionPending: true };
    this.send({ kind: "act", action });
    this.emit();
    return true;
  }

  chat(text: string): boolean {
    if (this.state.phase !== "running" || text.trim() === "") return false;
    this.state = recordOwnChat(this.state, text);
    this.send({ kind: "chat", text });
    this.emit();
    return true;
  }

  rate(ratings: Ratings): boolean {
    if (this.state.phase !== "rating") return false;
    this.send({ kind: "rate", ratings });
    return true;
  }
}
