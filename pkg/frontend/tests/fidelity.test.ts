// Score fidelity: every bit count the view displays is byte-identical to
// the scores endpoint's payload. The client never rescores.

import { describe, expect, it } from "vitest";

import { renderResultsView } from "../src/render";
import type {
  DiagnosticsPayload,
  LeaderboardPayload,
  ScoresPayload,
} from "../src/types";
import diagnosticsFixture from "./fixtures/diagnostics.json";
import leaderboardFixture from "./fixtures/leaderboard.json";
import scoresFixture from "./fixtures/scores.json";

const scores = scoresFixture as unknown as ScoresPayload;
const leaderboard = leaderboardFixture as unknown as LeaderboardPayload;
const diagnostics = diagnosticsFixture as unknown as DiagnosticsPayload;

function displayedBits(html: string): string[] {
  // the text content of every score cell, exactly as rendered
  return [...html.matchAll(/<td class="bits" data-bits="([^"]*)">([^<]*)<\/td>/g)].map(
    (m) => {
      expect(m[1]).toBe(m[2]); // attribute and visible text agree
      return m[2];
    }
  );
}

describe("score fidelity against the golden verified game", () => {
  it("displays per-event bits byte-identical to the scores payload", () => {
    for (const player of Object.keys(scores.players)) {
      const html = renderResultsView(scores, null, leaderboard, player);
      const shown = displayedBits(html);
      const expected = scores.records
        .filter((r) => r.player_id === player)
        .map((r) => r.bits);
      expect(shown).toEqual(expected);
    }
  });

  it("displays means byte-identical to the API-reported means", () => {
    const html = renderResultsView(scores, diagnostics, leaderboard, "alice");
    const means = scores.players["alice"];
    expect(html).toContain(`<dd class="mean-bits">${means.mean_bits}</dd>`);
    expect(html).toContain(`<dd class="mean-bits-game1">${means.mean_bits_game1}</dd>`);
    expect(html).toContain(`<dd class="mean-bits-game2">${means.mean_bits_game2}</dd>`);
    expect(html).toContain(`<dd class="n-events">${means.n_events}</dd>`);
  });

  it("leaderboard rows carry the endpoint's mean strings verbatim", () => {
    const html = renderResultsView(scores, diagnostics, leaderboard, "alice");
    for (const row of leaderboard.rows) {
      expect(html).toContain(`data-bits="${row.mean_bits}">${row.mean_bits}</td>`);
    }
  });

  it("pushed events render grey and the displayed mean is the API's (push-excluded)", () => {
    const html = renderResultsView(scores, diagnostics, leaderboard, "alice");
    const pushed = scores.records.filter((r) => r.player_id === "alice" && r.pushed);
    expect(pushed.length).toBeGreaterThan(0);
    for (const r of pushed) {
      expect(html).toContain(`<tr class="push" data-event="${r.event_id}">`);
    }
    // the rendered mean comes from players{}, which the engine computes
    // excluding pushes; recompute here as the oracle
    const alive = scores.records.filter((r) => r.player_id === "alice" && !r.pushed);
    const mean = alive.reduce((a, r) => a + parseFloat(r.bits), 0) / alive.length;
    expect(parseFloat(scores.players["alice"].mean_bits ?? "NaN")).toBeCloseTo(mean, 12);
    expect(scores.players["alice"].n_events).toBe(alive.length);
  });

  it("gain rows are green-toned and loss rows red-toned by sign", () => {
    const html = renderResultsView(scores, diagnostics, leaderboard, "alice");
    for (const r of scores.records.filter((x) => x.player_id === "alice" && !x.pushed)) {
      const bits = parseFloat(r.bits);
      const tone = bits > 0 ? "gain" : bits < 0 ? "loss" : "zero";
      expect(html).toContain(`<tr class="${tone}" data-event="${r.event_id}">`);
    }
  });
});
