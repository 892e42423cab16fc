/** Rating form model: four 7-point Likert items. */

import type { Ratings } from "./protocol.js";

export const RATING_KEYS = [
  "helpful",
  "understands_goal",
  "useful_communication",
  "over_communication",
] as const;

export function validateRatings(
  values: Partial<Record<string, number>>
): Ratings | null {
  const out: Record<string, number> = {};
  for (const key of RATING_KEYS) {
    const v = values[key];
    if (v === undefined || !Number.isInteger(v) || v < 1 || v > 7) {
      return null;
    }
    out[key] = v;
  }
  return out as unknown as Ratings;
}
