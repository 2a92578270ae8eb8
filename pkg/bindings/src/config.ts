import { z } from "zod";

/**
 * Run configuration, matching the engine's JSON config-file schema key for
 * key; every field is optional and engine defaults (the validation-study
 * setup) apply to whatever is omitted.
 */
export const configSchema = z
  .object({
    uo_mode: z.enum(["strict-consecutive", "trailing-mean"]),
    anuria_threshold: z.union([z.string(), z.number()]),
    rel_baseline: z.string(),
    abs_baseline: z.string(),
    baseline_stat: z.enum(["min", "mean", "first"]),
    window_hours: z.number().int().min(1),
    assumed_gfr: z.union([z.string(), z.number()]),
    max_gap_hours: z.number().int().min(0),
    impute: z.boolean(),
    creatinine_unit: z.enum(["mg/dL", "umol/L"]),
  })
  .partial()
  .strict();

export type EngineConfig = z.infer<typeof configSchema>;

/** Validate a config mapping, throwing on unknown keys or bad types. */
export function validateConfig(config: unknown): EngineConfig {
  return configSchema.parse(config);
}
