// HTML renderers. Pure string-producing functions so they are testable
// without a browser; main.ts wires them to the DOM.

import {
  AllocationState,
  eventTotal,
  isSubmittable,
  remainingCredits,
} from "./allocation";
import { binLabel, bitsTone, escapeHtml, valueWithUnit } from "./format";
import type {
  DiagnosticsPayload,
  GameDiagnostics,
  GamePayload,
  LeaderboardPayload,
  ReliabilityPointPayload,
  ScoresPayload,
} from "./types";

const VARIABLE_LABEL: Record<string, string> = {
  temp_max: "High temperature",
  temp_min: "Low temperature",
  wind_max: "Max sustained wind",
  precip_accum: "Precipitation",
};

function slider(event: string, index: number, value: number, readOnly: boolean): string {
  const ro = readOnly ? " disabled" : "";
  return (
    `<input type="range" min="0" max="100" step="1" value="${value}"` +
    ` data-event="${escapeHtml(event)}" data-index="${index}"${ro}>` +
    `<input type="number" min="0" max="100" step="1" value="${value}"` +
    ` data-event="${escapeHtml(event)}" data-index="${index}"${ro}>`
  );
}

/** The interactive allocation form for one game payload. Read-only with a
 * lock notice whenever the game is not open. */
export function renderAllocationView(game: GamePayload, state: AllocationState): string {
  const readOnly = game.state !== "open";
  const parts: string[] = [];
  parts.push(`<section class="allocation" data-game="${escapeHtml(game.id)}">`);
  parts.push(
    `<header><h2>${escapeHtml(game.site)} – ${escapeHtml(game.forecast_day)}</h2>` +
      `<span class="deadline" data-deadline="${escapeHtml(game.deadline)}"></span></header>`
  );
  if (readOnly) {
    parts.push(
      `<p class="lock-notice">Submissions are closed (game is ${escapeHtml(game.state)}).</p>`
    );
  }
  for (const [kind, spec] of Object.entries(game.baseline ?? {})) {
    const unit = spec.variable.unit;
    parts.push(`<fieldset class="variable" data-variable="${escapeHtml(kind)}">`);
    parts.push(`<legend>${escapeHtml(VARIABLE_LABEL[kind] ?? kind)}</legend>`);
    for (const t of spec.thresholds) {
      const q = `q${Math.round(parseFloat(t.q) * 100)}`;
      const key = `${kind}:${q}`;
      const credits = state.events[key] ?? [50, 50];
      parts.push(
        `<div class="over-under" data-event="${escapeHtml(key)}">` +
          `<span class="line">Over/under ${valueWithUnit(t.value, unit)} (${q})</span>` +
          `<label>over ${slider(key, 0, credits[0], readOnly)}</label>` +
          `<label>under ${slider(key, 1, credits[1], readOnly)}</label>` +
          `<span class="total" data-total="${eventTotal(state, key)}"></span>` +
          `</div>`
      );
    }
    const binsKey = `${kind}:bins`;
    const bins = state.events[binsKey] ?? [];
    parts.push(`<div class="bins" data-event="${escapeHtml(binsKey)}">`);
    spec.bins.forEach((b, i) => {
      parts.push(
        `<label>${escapeHtml(binLabel(b.low, b.high, unit))} ` +
          slider(binsKey, i, bins[i] ?? 0, readOnly) +
          `</label>`
      );
    });
    const remaining = remainingCredits(state, binsKey);
    parts.push(
      `<span class="remaining" data-remaining="${remaining}">` +
        `${remaining} credits remaining</span>`
    );
    parts.push(`</div></fieldset>`);
  }
  const disabled = isSubmittable(state) ? "" : " disabled";
  parts.push(`<button class="submit" type="submit"${disabled}>Submit allocation</button>`);
  parts.push(`</section>`);
  return parts.join("\n");
}

/** SVG path through the reliability points (issued probability vs observed
 * frequency on the unit square). */
export function reliabilityPath(
  points: ReliabilityPointPayload[],
  width = 220,
  height = 220,
  pad = 10
): string {
  const inner = { w: width - 2 * pad, h: height - 2 * pad };
  return points
    .map((p, i) => {
      const x = pad + parseFloat(p.f) * inner.w;
      const y = height - pad - parseFloat(p.obs_freq) * inner.h;
      return `${i === 0 ? "M" : "L"} ${x.toFixed(2)} ${y.toFixed(2)}`;
    })
    .join(" ");
}

export function diagonalPath(width = 220, height = 220, pad = 10): string {
  return `M ${pad} ${height - pad} L ${width - pad} ${pad}`;
}

/** Over/under-confidence reading of the reliability curve, shown once the
 * reliability term is material. Confident forecasts verifying less often
 * than issued (points under the diagonal at high f, over it at low f) mean
 * overconfidence; the reverse means under-confidence. */
export function calibrationHint(diag: GameDiagnostics | null): string {
  if (diag === null || diag.decomposition.n_events < 10) {
    return "not enough verified events to judge calibration yet";
  }
  const rel = parseFloat(diag.decomposition.rel_bits);
  if (rel < 0.02) {
    return "well calibrated: issued probabilities track observed frequencies";
  }
  let excess = 0; // weighted sharpness of forecasts beyond what verified
  for (const p of diag.reliability_curve) {
    const f = parseFloat(p.f);
    const o = parseFloat(p.obs_freq);
    excess += p.n * (f >= 0.5 ? f - o : o - f);
  }
  if (excess > 0) {
    return "overconfident: tails are sharper than outcomes support; spread credits";
  }
  return "under-confident: forecasts hug the baseline; commit more credits to your belief";
}

function meansCell(value: string | null): string {
  return value === null ? "—" : value;
}

/** Post-verification view: per-event bits (verbatim from the API), season
 * means, leaderboard, reliability curve, and the calibration hint. */
export function renderResultsView(
  scores: ScoresPayload,
  diagnostics: DiagnosticsPayload | null,
  leaderboard: LeaderboardPayload,
  playerId: string
): string {
  const parts: string[] = [];
  parts.push(`<section class="results" data-game="${escapeHtml(scores.game_id)}">`);
  if (scores.state !== "verified") {
    parts.push(`<p class="empty-state">No verified games yet.</p></section>`);
    return parts.join("\n");
  }

  parts.push(`<table class="score-table"><thead><tr>` +
    `<th>event</th><th>bits</th><th></th></tr></thead><tbody>`);
  for (const r of scores.records) {
    if (r.player_id !== playerId) continue;
    const tone = bitsTone(r.bits, r.pushed);
    const note = r.pushed ? "push" : "";
    parts.push(
      `<tr class="${tone}" data-event="${escapeHtml(r.event_id)}">` +
        `<td>${escapeHtml(r.event_id)}</td>` +
        `<td class="bits" data-bits="${escapeHtml(r.bits)}">${escapeHtml(r.bits)}</td>` +
        `<td>${note}</td></tr>`
    );
  }
  parts.push(`</tbody></table>`);

  const means = scores.players[playerId];
  if (means) {
    parts.push(
      `<dl class="means">` +
        `<dt>mean bits</dt><dd class="mean-bits">${escapeHtml(meansCell(means.mean_bits))}</dd>` +
        `<dt>over/under</dt><dd class="mean-bits-game1">${escapeHtml(
          meansCell(means.mean_bits_game1)
        )}</dd>` +
        `<dt>bin game</dt><dd class="mean-bits-game2">${escapeHtml(
          meansCell(means.mean_bits_game2)
        )}</dd>` +
        `<dt>events</dt><dd class="n-events">${means.n_events}</dd>` +
        `</dl>`
    );
  }

  parts.push(`<table class="leaderboard"><thead><tr>` +
    `<th>#</th><th>player</th><th>mean bits</th><th>n</th></tr></thead><tbody>`);
  leaderboard.rows.forEach((row, i) => {
    const self = row.player_id === playerId ? ` class="self"` : "";
    parts.push(
      `<tr${self}><td>${i + 1}</td><td>${escapeHtml(row.player_id)}</td>` +
        `<td data-bits="${escapeHtml(row.mean_bits)}">${escapeHtml(row.mean_bits)}</td>` +
        `<td>${row.n_events}</td></tr>`
    );
  });
  parts.push(`</tbody></table>`);

  const game1 = diagnostics?.game1 ?? null;
  if (game1) {
    parts.push(
      `<svg class="reliability" viewBox="0 0 220 220">` +
        `<path class="diagonal" d="${diagonalPath()}"></path>` +
        `<path class="curve" d="${reliabilityPath(game1.reliability_curve)}"></path>` +
        `</svg>`
    );
    parts.push(
      `<dl class="decomposition">` +
        `<dt>REL</dt><dd>${escapeHtml(game1.decomposition.rel_bits)}</dd>` +
        `<dt>DSC</dt><dd>${escapeHtml(game1.decomposition.dsc_bits)}</dd>` +
        `</dl>`
    );
  }
  parts.push(`<p class="hint">${escapeHtml(calibrationHint(game1))}</p>`);
  parts.push(`</section>`);
  return parts.join("\n");
}
