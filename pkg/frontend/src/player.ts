// Plan-player model: turns a trace document into step frames with container
// levels and cumulative durations for the bar view.

import type { TraceDoc } from "./types.js";

export interface PlayerFrame {
  index: number; // 0 = initial state, 1..n = after step i
  label: string;
  levels: Record<string, number>;
  stepDuration: number;
  elapsed: number;
}

export interface PlayerModel {
  frames: PlayerFrame[];
  totalDuration: number;
  containers: string[];
  verdict: string | null;
}

export function buildPlayer(trace: TraceDoc): PlayerModel {
  const initial = trace.initial_levels ?? {};
  const frames: PlayerFrame[] = [
    { index: 0, label: "initial", levels: initial, stepDuration: 0, elapsed: 0 },
  ];
  let elapsed = 0;
  trace.entries.forEach((entry, i) => {
    elapsed += entry.duration;
    const bindings = entry.skill.bindings;
    frames.push({
      index: i + 1,
      label: `${entry.skill.template} ${bindings["source"] ?? ""} -> ${bindings["dest"] ?? ""} (${fmt(
        Number(bindings["amount"] ?? 0),
      )} L)`,
      levels: entry.levels ?? frames[i].levels,
      stepDuration: entry.duration,
      elapsed,
    });
  });
  const containers = Object.keys(
    frames.reduce<Record<string, true>>((acc, f) => {
      for (const key of Object.keys(f.levels)) acc[key] = true;
      return acc;
    }, {}),
  ).sort();
  return {
    frames,
    totalDuration: cumulativeDuration(trace),
    containers,
    verdict: trace.verdict ? trace.verdict.status : null,
  };
}

/** Sum of step durations; must equal the trace's recorded total. */
export function cumulativeDuration(trace: TraceDoc): number {
  return trace.entries.reduce((sum, entry) => sum + entry.duration, 0);
}

export function fmt(x: number): string {
  return (Math.round(x * 1e6) / 1e6).toString();
}
