// Display helpers. Bits arrive as canonical strings from the API and are
// shown verbatim so the view always byte-matches the scores endpoint.

export type BitsTone = "gain" | "loss" | "push" | "zero";

export function bitsTone(bits: string, pushed: boolean): BitsTone {
  if (pushed) return "push";
  const x = parseFloat(bits);
  if (x > 0) return "gain";
  if (x < 0) return "loss";
  return "zero";
}

export interface Countdown {
  expired: boolean;
  days: number;
  hours: number;
  minutes: number;
  seconds: number;
}

/** Remaining time until the deadline, measured against the server clock
 * (X-Server-Time response header), never the client's. */
export function deadlineCountdown(deadlineIso: string, serverNowIso: string): Countdown {
  const remaining = Date.parse(deadlineIso) - Date.parse(serverNowIso);
  if (!Number.isFinite(remaining) || remaining <= 0) {
    return { expired: true, days: 0, hours: 0, minutes: 0, seconds: 0 };
  }
  const seconds = Math.floor(remaining / 1000);
  return {
    expired: false,
    days: Math.floor(seconds / 86400),
    hours: Math.floor((seconds % 86400) / 3600),
    minutes: Math.floor((seconds % 3600) / 60),
    seconds: seconds % 60,
  };
}

export function formatCountdown(c: Countdown): string {
  if (c.expired) return "deadline passed";
  const pad = (n: number) => String(n).padStart(2, "0");
  return `${c.days}d ${pad(c.hours)}:${pad(c.minutes)}:${pad(c.seconds)}`;
}

const UNIT_LABEL: Record<string, string> = {
  degF: "°F",
  knot: "kt",
  inch: "in",
};

export function valueWithUnit(value: string | null, unit: string): string {
  if (value === null) return "—";
  return `${value} ${UNIT_LABEL[unit] ?? unit}`;
}

export function binLabel(low: string | null, high: string | null, unit: string): string {
  const u = UNIT_LABEL[unit] ?? unit;
  if (low === null && high === null) return "all values";
  if (low === null) return `< ${high} ${u}`;
  if (high === null) return `≥ ${low} ${u}`;
  return `${low}–${high} ${u}`;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
