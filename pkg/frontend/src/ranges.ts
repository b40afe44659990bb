/**
 * Surrogate training ranges. Values outside these are still legal in a
 * graph — the estimator clamps them server-side — but the editor shows a
 * warning badge so the planner knows the estimate is extrapolated.
 */

export interface Range {
  min: number;
  max: number;
}

export const TRAINING_RANGES: Record<string, Range> = {
  width: { min: 2, max: 20 },
  length: { min: 2, max: 20 },
  exit_size: { min: 0.9, max: 5 },
  initial_population: { min: 0, max: 99 },
};

export interface RangeWarning {
  field: string;
  value: number;
  range: Range;
}

export function rangeWarnings(room: {
  width: number;
  length: number;
  exit_size: number;
  initial_population: number;
}): RangeWarning[] {
  const warnings: RangeWarning[] = [];
  for (const [field, range] of Object.entries(TRAINING_RANGES)) {
    const value = (room as Record<string, number>)[field];
    if (value < range.min || value > range.max) {
      warnings.push({ field, value, range });
    }
  }
  return warnings;
}
