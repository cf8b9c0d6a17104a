// Mood timeline geometry: map (tick, mood) samples into an SVG path over a
// fixed tick window, with branch marks where a restore rewound the engine.

import type { MoodSample } from "./store";

export interface SparklineGeometry {
  path: string;
  /** x pixel positions of branch marks inside the window */
  marks: number[];
}

export function sparklinePath(
  samples: MoodSample[],
  width: number,
  height: number,
  moodBound: number,
  tickWindow: number,
  lastTick: number,
  branchMarks: number[] = [],
): SparklineGeometry {
  const t0 = Math.max(0, lastTick - tickWindow);
  const xOf = (tick: number) => ((tick - t0) / Math.max(1, tickWindow)) * width;
  const yOf = (mood: number) => {
    const clamped = Math.max(-moodBound, Math.min(moodBound, mood));
    return height / 2 - (clamped / moodBound) * (height / 2);
  };
  const visible = samples.filter((s) => s.tick >= t0 && s.tick <= lastTick);
  let path = "";
  for (const [i, s] of visible.entries()) {
    const cmd = i === 0 ? "M" : "L";
    path += `${cmd}${xOf(s.tick).toFixed(2)},${yOf(s.mood).toFixed(2)}`;
  }
  const marks = branchMarks
    .filter((t) => t >= t0 && t <= lastTick)
    .map((t) => xOf(t));
  return { path, marks };
}
