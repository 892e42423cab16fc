/** Browser entry point: wires the session client to the page. */

import { SessionClient, type Socket } from "./client.js";
import { render } from "./render.js";
import { validateRatings } from "./rating.js";
import { chatSuggestions } from "./view.js";

function serverUrl(): string {
  const params = new URLSearchParams(window.location.search);
  const given = params.get("server");
  if (given !== null) return given;
  const proto = window.location.protocol === "https:" ? "wss" : "ws";
  return `${proto}://${window.location.host}/ws`;
}

function start(): void {
  const root = document.getElementById("app");
  const input = document.getElementById("chat-input") as HTMLInputElement;
  const datalist = document.getElementById("chat-suggestions");
  if (root === null || input === null) return;

  const ws = new WebSocket(serverUrl());
  // Narrow the browser socket to the slice SessionClient needs; the client
  // installs its handlers on this adapter, so the raw ws handlers stay ours.
  const socket: Socket = {
    send: (data) => ws.send(data),
    close: () => ws.close(),
    onmessage: null,
    onclose: null,
    onopen: null,
  };
  ws.onmessage = (ev) => socket.onmessage?.({ data: String(ev.data) });
  ws.onclose = () => socket.onclose?.();
  const client = new SessionClient(socket);

  const redraw = () => {
    root.innerHTML = render(client.state, client.connected);
    if (datalist !== null && client.state.view !== null) {
      datalist.innerHTML = chatSuggestions(client.state.view)
        .slice(0, 50)
        .map((s) => `<option value="${s}"></option>`)
        .join("");
    }
  };
  client.onChange(redraw);

  ws.onopen = () => {
    socket.onopen?.();
    const params = new URLSearchParams(window.location.search);
    client.join(
      params.get("scenario") ?? undefined,
      params.get("condition") ?? undefined
    );
    redraw();
  };

  root.addEventListener("click", (ev) => {
    const el = ev.target as HTMLElement;
    if (el.matches("button.act")) {
      client.act(el.dataset.action ?? "wait");
    }
  });

  root.addEventListener("submit", (ev) => {
    const form = ev.target as HTMLFormElement;
    if (!form.matches("form.rating")) return;
    ev.preventDefault();
    const values: Record<string, number> = {};
    for (const el of Array.from(form.querySelectorAll("input:checked"))) {
      const radio = el as HTMLInputElement;
      values[radio.name] = parseInt(radio.value, 10);
    }
    const ratings = validateRatings(values);
    if (ratings !== null) client.rate(ratings);
  });

  input.addEventListener("keydown", (ev) => {
    if (ev.key === "Enter") {
      if (client.chat(input.value)) input.value = "";
    }
  });
}

window.addEventListener("DOMContentLoaded", start);
