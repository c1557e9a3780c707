// Payload shapes mirroring the JSON Schema files published by the API.
// All decimals and bit counts arrive as strings and are displayed verbatim;
// the client never rescores.

export type GameState = "draft" | "baseline_published" | "open" | "locked" | "verified";

export interface ClampPayload {
  p_min: string;
  p_max: string;
}

export interface ThresholdPayload {
  q: string;
  value: string;
  b_over: string;
}

export interface BinPayload {
  low: string | null;
  high: string | null;
  mass: string;
}

export interface VariablePayload {
  kind: string;
  unit: string;
  resolution: string;
  open_ended_high: boolean;
}

export interface BaselineSpecPayload {
  variable: VariablePayload;
  n_members: number;
  thresholds: ThresholdPayload[];
  bins: BinPayload[];
  clamp: ClampPayload;
  published_at: string;
}

export interface GamePayload {
  id: string;
  site: string;
  forecast_day: string;
  deadline: string;
  state: GameState;
  baseline: Record<string, BaselineSpecPayload> | null;
}

export interface ScoreRecord {
  player_id: string;
  variable: string;
  game: "game1" | "game2";
  event_id: string;
  bits: string;
  pushed: boolean;
  f?: string | null;
  b?: string | null;
  verified_over?: boolean | null;
  observed_bin?: number;
  per_bin_bits?: string[];
  f_bins?: string[];
}

export interface LegacyRecord {
  player_id: string;
  kind: string;
  forecast: string;
  observed: string;
  error_points: string;
  trace: boolean;
}

export interface PlayerMeans {
  mean_bits: string | null;
  mean_bits_game1: string | null;
  mean_bits_game2: string | null;
  n_events: number;
}

export interface ScoresPayload {
  game_id: string;
  state: GameState;
  records: ScoreRecord[];
  legacy: LegacyRecord[];
  players: Record<string, PlayerMeans>;
}

export interface LeaderboardRow extends PlayerMeans {
  player_id: string;
  mean_bits: string;
}

export interface LeaderboardPayload {
  rows: LeaderboardRow[];
}

export interface DecompositionPayload {
  rel_bits: string;
  dsc_bits: string;
  unc_bits: string;
  mean_ign_bits: string;
  n_events: number;
}

export interface ReliabilityPointPayload {
  f: string;
  obs_freq: string;
  n: number;
}

export interface GameDiagnostics {
  decomposition: DecompositionPayload;
  reliability_curve: ReliabilityPointPayload[];
}

export interface DiagnosticsPayload {
  player_id: string;
  game1: GameDiagnostics | null;
  game2: GameDiagnostics | null;
}

export interface SubmissionPayload {
  player_id?: string;
  game1?: Record<string, Record<string, number[]>>;
  game2?: Record<string, number[]>;
  deterministic?: Record<string, string>;
  opted_out?: { game1?: boolean; game2?: boolean };
}
