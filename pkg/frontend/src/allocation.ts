// Credit-allocation view state and its reducer.
//
// Invariant the tests enforce: no sequence of interactions can reach a
// submittable state whose credits do not sum to exactly 100. Drags conserve
// the total by rebalancing against one designated remainder bin; direct
// numeric input may break the total, which disables submission until fixed.

import type { GamePayload, SubmissionPayload } from "./types";

export type EventKey = string; // "temp_max:q50", "temp_max:bins", ...

export interface AllocationState {
  gameId: string;
  gameState: string;
  events: Record<EventKey, number[]>;
  remainder: Record<EventKey, number>;
}

export type AllocationAction =
  | { type: "drag"; event: EventKey; index: number; value: number }
  | { type: "type"; event: EventKey; index: number; value: number }
  | { type: "all_in"; event: EventKey; index: number }
  | { type: "set_remainder"; event: EventKey; index: number }
  | { type: "reset"; event: EventKey };

const CREDIT_TOTAL = 100;

function clampCredit(value: number): number {
  if (!Number.isFinite(value)) return 0;
  return Math.min(Math.max(Math.round(value), 0), CREDIT_TOTAL);
}

export function largestRemainder(weights: number[]): number[] {
  const total = weights.reduce((a, b) => a + b, 0);
  const scaled = weights.map((w) => (total > 0 ? (CREDIT_TOTAL * w) / total : 0));
  const floors = scaled.map(Math.floor);
  let short = CREDIT_TOTAL - floors.reduce((a, b) => a + b, 0);
  const order = scaled
    .map((s, i) => ({ frac: s - floors[i], i }))
    .sort((a, b) => b.frac - a.frac || a.i - b.i);
  for (const { i } of order) {
    if (short <= 0) break;
    floors[i] += 1;
    short -= 1;
  }
  return floors;
}

/** Initial draft: every allocation starts at the baseline probabilities. */
export function initialState(game: GamePayload): AllocationState {
  const events: Record<EventKey, number[]> = {};
  const remainder: Record<EventKey, number> = {};
  for (const [kind, spec] of Object.entries(game.baseline ?? {})) {
    for (const t of spec.thresholds) {
      const q = `q${Math.round(parseFloat(t.q) * 100)}`;
      const key = `${kind}:${q}`;
      const over = parseFloat(t.b_over);
      events[key] = largestRemainder([over, 1 - over]);
      remainder[key] = 1;
    }
    const key = `${kind}:bins`;
    events[key] = largestRemainder(spec.bins.map((b) => parseFloat(b.mass)));
    remainder[key] = spec.bins.length - 1;
  }
  return { gameId: game.id, gameState: game.state, events, remainder };
}

function partnerFor(state: AllocationState, event: EventKey, index: number): number {
  const arity = state.events[event].length;
  const designated = state.remainder[event] ?? arity - 1;
  if (designated !== index) return designated;
  return (designated + 1) % arity;
}

export function reduce(state: AllocationState, action: AllocationAction): AllocationState {
  const credits = state.events[action.event];
  if (!credits) return state;
  const next = credits.slice();
  const remainder = { ...state.remainder };
  switch (action.type) {
    case "drag": {
      // move credits between the dragged slider and the remainder bin only;
      // the drag is capped by what the remainder bin can absorb
      const want = clampCredit(action.value);
      const partner = partnerFor(state, action.event, action.index);
      const delta = want - next[action.index];
      const applied = Math.max(Math.min(delta, next[partner]), next[partner] - CREDIT_TOTAL);
      next[action.index] += applied;
      next[partner] -= applied;
      break;
    }
    case "type": {
      // free-form numeric entry may unbalance the total; submission stays
      // disabled until the counter reads zero again
      next[action.index] = clampCredit(action.value);
      break;
    }
    case "all_in": {
      next.fill(0);
      next[action.index] = CREDIT_TOTAL;
      break;
    }
    case "set_remainder": {
      if (action.index >= 0 && action.index < next.length) {
        remainder[action.event] = action.index;
      }
      break;
    }
    case "reset": {
      const arity = next.length;
      const even = Math.floor(CREDIT_TOTAL / arity);
      next.fill(even);
      next[arity - 1] += CREDIT_TOTAL - even * arity;
      break;
    }
  }
  return {
    ...state,
    remainder,
    events: { ...state.events, [action.event]: next },
  };
}

export function eventTotal(state: AllocationState, event: EventKey): number {
  return state.events[event].reduce((a, b) => a + b, 0);
}

export function remainingCredits(state: AllocationState, event: EventKey): number {
  return CREDIT_TOTAL - eventTotal(state, event);
}

export function isSubmittable(state: AllocationState): boolean {
  if (state.gameState !== "open") return false;
  return Object.keys(state.events).every((key) => eventTotal(state, key) === CREDIT_TOTAL);
}

/** The PUT body, or null while the state would be rejected by the API. */
export function buildSubmission(state: AllocationState): SubmissionPayload | null {
  if (!isSubmittable(state)) return null;
  const game1: Record<string, Record<string, number[]>> = {};
  const game2: Record<string, number[]> = {};
  for (const [key, credits] of Object.entries(state.events)) {
    const [kind, label] = key.split(":");
    if (label === "bins") {
      game2[kind] = credits.slice();
    } else {
      (game1[kind] ??= {})[label] = credits.slice();
    }
  }
  return { game1, game2 };
}
