/** Red-to-green color scale for similarity values.
 *
 *  A value at or below the interval's lower bound renders pure red,
 *  the upper bound (1.0 in the shipped intervals) pure green, and the
 *  gradient in between is linear. The mapping is a pure function of
 *  (value, interval), so equal inputs always paint equal pixels.
 */

export type Interval = readonly [number, number];

function clamp01(x: number): number {
  if (x < 0) return 0;
  if (x > 1) return 1;
  return x;
}

/** Normalized position of a value inside its interval, clamped to [0, 1]. */
export function intervalPosition(value: number, interval: Interval): number {
  const [lower, upper] = interval;
  return clamp01((value - lower) / (upper - lower));
}

/** CSS color for one heatmap cell or gauge fill. */
export function heatColor(value: number, interval: Interval): string {
  const t = intervalPosition(value, interval);
  const red = Math.round(255 * (1 - t));
  const green = Math.round(255 * t);
  return `rgb(${red},${green},0)`;
}

/** Neutral color for absent values (skipped entities, missing measures). */
export const ABSENT_COLOR = "rgb(128,128,128)";

export function colorOrAbsent(
  value: number | null | undefined,
  interval: Interval,
): string {
  return value === null || value === undefined
    ? ABSENT_COLOR
    : heatColor(value, interval);
}
