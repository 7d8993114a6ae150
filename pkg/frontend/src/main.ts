/**
 * DOM wiring for the knob console.  All intensity math lives server-side;
 * this file shuttles values between the /v1 service and the widgets.
 */

import { ApiClient, ApiError } from "./api.js";
import { chartGeometry } from "./chart.js";
import { SseParser } from "./sse.js";
import {
  KnobViewState,
  TrialPoint,
  commitFailed,
  commitResolved,
  commitStarted,
  contextChanged,
  controlsEnabled,
  initialState,
  knobMoved,
  sessionOpened,
  streamLost,
  trialArrived,
} from "./state.js";

const api = new ApiClient(window.location.origin);

let state: KnobViewState = initialState();
let token: string | null = null;

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

function render(): void {
  const readout = $("readout");
  readout.textContent = state.suggestion === null ? "—" : state.suggestion.toFixed(1);
  const swatch = $("swatch");
  const level = state.suggestion ?? 0;
  swatch.style.background = `rgba(255, 214, 102, ${level / 100})`;
  const knob = $<HTMLInputElement>("knob");
  knob.value = String(state.knob);
  knob.disabled = !controlsEnabled(state);
  $("banner").hidden = state.connected;
  $("error").textContent = state.error ?? "";
  const geom = chartGeometry(state.trace, 600, 200);
  $("series-suggested").setAttribute("points", geom.suggested);
  $("series-target").setAttribute("points", geom.target);
  $("trial-count").textContent = `${geom.pointCount} trials`;
}

function update(next: KnobViewState): void {
  state = next;
  render();
}

async function openSession(): Promise<void> {
  const form = state.profileForm;
  const { profile_id } = await api.createProfile(form.age, form.chronotype);
  const opened = await api.openSession(profile_id, {
    dgi: form.dgi,
    age: form.age,
    activity: form.activity,
    chronotype: form.chronotype,
  });
  token = opened.token;
  update(sessionOpened(state, opened.suggestion));
  void followStream(opened.token);
}

async function followStream(streamToken: string): Promise<void> {
  const parser = new SseParser();
  try {
    const resp = await fetch(api.streamUrl(streamToken));
    if (!resp.ok || !resp.body) throw new Error(`stream HTTP ${resp.status}`);
    const reader = resp.body.getReader();
    const decoder = new TextDecoder();
    for (;;) {
      const { done, value } = await reader.read();
      if (done) break;
      for (const ev of parser.feed(decoder.decode(value, { stream: true }))) {
        if (ev.event === "trial") {
          const d = ev.data as Record<string, number>;
          const point: TrialPoint = {
            trial: d.trial,
            suggested: d.suggested,
            target: d.target,
            reward: d.reward,
            tdError: d.td_error,
          };
          update(trialArrived(state, point));
        } else if (ev.event === "end") {
          return;
        }
        // heartbeats confirm liveness; nothing to render
      }
    }
  } finally {
    update(streamLost(state));
  }
}

async function commit(): Promise<void> {
  const before = state;
  const started = commitStarted(state);
  if (started === before || token === null) return; // double-submit guard
  update(started);
  try {
    const result = await api.sendFeedback(token, state.knob);
    update(commitResolved(state, result.next_suggestion));
  } catch (err) {
    const message = err instanceof ApiError ? err.message : "connection lost";
    update(commitFailed(state, message));
  }
}

async function applyContext(): Promise<void> {
  if (token === null) return;
  const form = {
    dgi: Number($<HTMLInputElement>("ctx-dgi").value),
    age: Number($<HTMLInputElement>("ctx-age").value),
    activity: $<HTMLSelectElement>("ctx-activity").value,
    chronotype: $<HTMLSelectElement>("ctx-chronotype").value,
  };
  try {
    const result = await api.changeContext(token, form);
    update(contextChanged({ ...state, profileForm: form }, result.suggestion));
  } catch (err) {
    const message = err instanceof ApiError ? err.message : "connection lost";
    update(commitFailed(state, message));
  }
}

function wire(): void {
  const knob = $<HTMLInputElement>("knob");
  knob.addEventListener("input", () => update(knobMoved(state, Number(knob.value))));
  // commit on release so one physical adjustment is one learning trial
  knob.addEventListener("change", () => void commit());
  $("open").addEventListener("click", () => void openSession());
  $("apply-context").addEventListener("click", () => void applyContext());
  render();
}

wire();
