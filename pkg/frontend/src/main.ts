// Browser bootstrap: fetch the game, render, wire slider events to the
// reducer, and re-render on every action. Submission goes through the
// client-side schema mirror, so an invalid payload can never leave the page.

import { buildSubmission, initialState, reduce } from "./allocation";
import { getDiagnostics, getGame, getLeaderboard, getScores, putSubmission } from "./client";
import { deadlineCountdown, formatCountdown } from "./format";
import { renderAllocationView, renderResultsView } from "./render";
import { isValidSubmission } from "./schema";
import type { GamePayload } from "./types";

interface AppConfig {
  apiBase: string;
  gameId: string;
  playerId: string;
}

function readConfig(): AppConfig {
  const el = document.getElementById("app");
  return {
    apiBase: el?.dataset.apiBase ?? "",
    gameId: el?.dataset.gameId ?? "",
    playerId: el?.dataset.playerId ?? "anonymous",
  };
}

export async function boot(): Promise<void> {
  const config = readConfig();
  const root = document.getElementById("app");
  if (!root) return;

  const { payload: game, serverTime } = await getGame(config.apiBase, config.gameId);
  if (game.state === "verified") {
    await showResults(root, config, game);
    return;
  }
  let state = initialState(game);
  const rerender = () => {
    root.innerHTML = renderAllocationView(game, state);
    tickCountdown(root, game, serverTime);
    wire(root, game);
  };

  const wire = (container: HTMLElement, g: GamePayload) => {
    container.querySelectorAll<HTMLInputElement>("input[data-event]").forEach((input) => {
      input.addEventListener("change", () => {
        const kind = input.type === "range" ? "drag" : "type";
        state = reduce(state, {
          type: kind,
          event: input.dataset.event ?? "",
          index: Number(input.dataset.index ?? 0),
          value: Number(input.value),
        });
        rerender();
      });
    });
    container.querySelector<HTMLButtonElement>("button.submit")?.addEventListener("click", async () => {
      const body = buildSubmission(state);
      if (body === null || !isValidSubmission(body)) return;
      await putSubmission(config.apiBase, g.id, config.playerId, body);
    });
  };
  rerender();
}

async function showResults(root: HTMLElement, config: AppConfig, game: GamePayload): Promise<void> {
  const [scores, leaderboard] = await Promise.all([
    getScores(config.apiBase, game.id),
    getLeaderboard(config.apiBase),
  ]);
  let diagnostics = null;
  try {
    diagnostics = (await getDiagnostics(config.apiBase, config.playerId)).payload;
  } catch {
    // no scored history yet: the view shows its empty hint
  }
  root.innerHTML = renderResultsView(scores.payload, diagnostics, leaderboard.payload, config.playerId);
}

function tickCountdown(root: HTMLElement, game: GamePayload, serverTime: string): void {
  const target = root.querySelector<HTMLElement>(".deadline");
  if (!target) return;
  const receivedAt = Date.now();
  const update = () => {
    const elapsed = Date.now() - receivedAt;
    const serverNow = new Date(Date.parse(serverTime) + elapsed).toISOString();
    target.textContent = formatCountdown(deadlineCountdown(game.deadline, serverNow));
  };
  update();
  window.setInterval(update, 1000);
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void boot();
}
