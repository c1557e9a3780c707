// Thin /v1 API client. Every response carries the server clock in the
// X-Server-Time header, which drives the deadline countdown.

import type {
  DiagnosticsPayload,
  GamePayload,
  LeaderboardPayload,
  ScoresPayload,
  SubmissionPayload,
} from "./types";

export interface ApiResult<T> {
  payload: T;
  serverTime: string;
  status: number;
}

export interface ApiErrorBody {
  code: string;
  message: string;
}

export class ApiError extends Error {
  constructor(readonly status: number, readonly body: ApiErrorBody) {
    super(`${body.code}: ${body.message}`);
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<ApiResult<T>> {
  const response = await fetch(`${base}/v1${path}`, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  const serverTime = response.headers.get("X-Server-Time") ?? new Date().toISOString();
  const payload = await response.json();
  if (!response.ok) {
    throw new ApiError(response.status, payload as ApiErrorBody);
  }
  return { payload: payload as T, serverTime, status: response.status };
}

export function getGame(base: string, gameId: string) {
  return request<GamePayload>(base, `/games/${encodeURIComponent(gameId)}`);
}

export function putSubmission(
  base: string,
  gameId: string,
  playerId: string,
  body: SubmissionPayload
) {
  return request<SubmissionPayload>(
    base,
    `/games/${encodeURIComponent(gameId)}/submissions/${encodeURIComponent(playerId)}`,
    { method: "PUT", body: JSON.stringify(body) }
  );
}

export function getScores(base: string, gameId: string) {
  return request<ScoresPayload>(base, `/games/${encodeURIComponent(gameId)}/scores`);
}

export function getLeaderboard(base: string) {
  return request<LeaderboardPayload>(base, `/leaderboard`);
}

export function getDiagnostics(base: string, playerId: string) {
  return request<DiagnosticsPayload>(base, `/players/${encodeURIComponent(playerId)}/diagnostics`);
}
