/**
 * Pure view-state for the correction knob console.
 *
 * Every number on screen originated in a server response; the reducers
 * here only move values around.  The trace is append-only and grows
 * exclusively from stream events — a feedback POST does not touch it
 * until the server echoes the trial back.
 */

export interface TrialPoint {
  trial: number;
  suggested: number;
  target: number;
  reward: number;
  tdError: number;
}

export interface ProfileForm {
  age: number;
  chronotype: string;
  activity: string;
  dgi: number;
}

export interface KnobViewState {
  /** Latest server suggestion; null before a session is open. */
  suggestion: number | null;
  /** Knob position, always within [0, 100]. */
  knob: number;
  /** A feedback POST is in flight; commits are blocked. */
  pending: boolean;
  /** Event stream believed healthy. */
  connected: boolean;
  /** Append-only, ordered by trial number. */
  trace: readonly TrialPoint[];
  profileForm: ProfileForm;
  error: string | null;
}

export const clampIntensity = (value: number): number =>
  Math.min(100, Math.max(0, value));

export function initialState(form?: Partial<ProfileForm>): KnobViewState {
  return {
    suggestion: null,
    knob: 50,
    pending: false,
    connected: false,
    trace: [],
    profileForm: {
      age: 30,
      chronotype: "intermediate",
      activity: "entertainment",
      dgi: 22,
      ...form,
    },
    error: null,
  };
}

/** Session opened (or reconnected): adopt the server's suggestion. */
export function sessionOpened(state: KnobViewState, suggestion: number): KnobViewState {
  return { ...state, suggestion, knob: clampIntensity(suggestion), connected: true, error: null };
}

/** Knob dragged; position saturates at the intensity range. */
export function knobMoved(state: KnobViewState, value: number): KnobViewState {
  return { ...state, knob: clampIntensity(value) };
}

/**
 * Knob released: start a commit unless one is already pending.
 * Returns the unchanged state for a double-submit, which callers use
 * to skip the network round trip entirely.
 */
export function commitStarted(state: KnobViewState): KnobViewState {
  if (state.pending || state.suggestion === null) return state;
  return { ...state, pending: true, error: null };
}

/** Feedback accepted: show the recomputed suggestion. */
export function commitResolved(state: KnobViewState, nextSuggestion: number): KnobViewState {
  return { ...state, pending: false, suggestion: nextSuggestion };
}

/** Feedback rejected (e.g. out-of-range): surface inline, unblock. */
export function commitFailed(state: KnobViewState, message: string): KnobViewState {
  return { ...state, pending: false, error: message };
}

/**
 * Trial echoed on the event stream — the only way the trace grows.
 * Out-of-order or duplicate trials are dropped so the trace stays
 * strictly ordered and append-only.
 */
export function trialArrived(state: KnobViewState, point: TrialPoint): KnobViewState {
  const last = state.trace[state.trace.length - 1];
  const expected = (last ? last.trial : 0) + 1;
  if (point.trial !== expected) return state;
  return { ...state, trace: [...state.trace, point] };
}

/** Context switched server-side: new suggestion, no trace point. */
export function contextChanged(state: KnobViewState, suggestion: number): KnobViewState {
  return { ...state, suggestion, knob: clampIntensity(suggestion) };
}

/** Stream dropped: show the reconnect banner, disable controls. */
export function streamLost(state: KnobViewState): KnobViewState {
  return { ...state, connected: false };
}

export function streamRestored(state: KnobViewState): KnobViewState {
  return { ...state, connected: true };
}

/** Controls are usable only with a live session and no commit in flight. */
export function controlsEnabled(state: KnobViewState): boolean {
  return state.connected && !state.pending && state.suggestion !== null;
}
