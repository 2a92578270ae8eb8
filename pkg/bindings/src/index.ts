/**
 * Node bindings for the akistage staging engine.
 *
 * All staging logic lives in the engine; these bindings convert between
 * in-memory tables (arrays of column-keyed records) and the engine's file
 * formats, drive its command-line interface in a scratch directory, and
 * parse the results back.  Callers never touch files themselves.
 */

import { mkdtemp, readFile, rm, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { parseCsv, serializeCsv } from "./csv.js";
import { EngineConfig, configSchema, validateConfig } from "./config.js";
import { EngineError, runEngine } from "./engine.js";

export { EngineError } from "./engine.js";
export { configSchema, validateConfig } from "./config.js";
export type { EngineConfig } from "./config.js";

export const URINE_OUTPUT_COLUMNS = ["subject_id", "timestamp", "urineoutput_ml"] as const;
export const CREATININE_COLUMNS = ["subject_id", "timestamp", "creatinine"] as const;
export const DIALYSIS_COLUMNS = ["subject_id", "timestamp", "dialysis_active"] as const;
export const PATIENT_COLUMNS = ["subject_id", "weight_kg", "height_cm", "age_years", "sex"] as const;
export const STAGE_COLUMNS = [
  "subject_id",
  "timestamp",
  "uo_stage",
  "abs_scr_stage",
  "rel_scr_stage",
  "dialysis_stage",
  "overall_stage",
  "baseline_rel",
  "baseline_abs",
] as const;

/** Raw input rows; values may be strings or numbers, missing fields empty. */
export type InputRow = Record<string, string | number | boolean | null | undefined>;

export interface DatasetTables {
  urineOutput: InputRow[];
  creatinine: InputRow[];
  dialysis: InputRow[];
  patients: InputRow[];
}

/** A KDIGO stage; null is the engine's UNKNOWN (unevaluable hour). */
export type Stage = 0 | 1 | 2 | 3 | null;

export interface StageRecordRow {
  subject_id: string;
  timestamp: string;
  uo_stage: Stage;
  abs_scr_stage: Stage;
  rel_scr_stage: Stage;
  dialysis_stage: Stage;
  overall_stage: Stage;
  /** Canonical decimal text; kept as strings so micro-unit exactness survives. */
  baseline_rel: string | null;
  baseline_abs: string | null;
}

export interface PatientSummaryRow extends Record<string, string> {
  subject_id: string;
  hours_observed: string;
}

export interface AnnotateResult {
  records: StageRecordRow[];
  summaries: PatientSummaryRow[];
  /** The stage-record file exactly as the engine wrote it. */
  raw: string;
  /** The engine's run report (effective config and warnings), from stderr. */
  report: string;
}

export interface ScoreRow {
  category: string;
  /** "overall" or a stage digit "0".."3". */
  label: string;
  support: number;
  matches: number;
  accuracy: number;
}

export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

function checkColumns(name: string, rows: InputRow[], columns: readonly string[]): void {
  for (const row of rows) {
    for (const column of columns) {
      if (!(column in row)) {
        throw new SchemaError(`${name}: missing column ${column}`);
      }
    }
    for (const key of Object.keys(row)) {
      if (!columns.includes(key)) {
        throw new SchemaError(`${name}: unexpected column ${key}`);
      }
    }
  }
}

function fieldText(value: string | number | boolean | null | undefined): string {
  if (value === null || value === undefined) {
    return "";
  }
  if (typeof value === "boolean") {
    return value ? "1" : "0";
  }
  return String(value);
}

function tableCsv(rows: InputRow[], columns: readonly string[]): string {
  return serializeCsv(
    columns,
    rows.map((row) => columns.map((column) => fieldText(row[column]))),
  );
}

function parseStage(text: string): Stage {
  if (text === "") {
    return null;
  }
  const value = Number(text);
  if (![0, 1, 2, 3].includes(value)) {
    throw new SchemaError(`not a stage label: ${text}`);
  }
  return value as Stage;
}

function parseStageRecords(text: string): StageRecordRow[] {
  return parseCsv(text).map((row) => ({
    subject_id: row.subject_id,
    timestamp: row.timestamp,
    uo_stage: parseStage(row.uo_stage),
    abs_scr_stage: parseStage(row.abs_scr_stage),
    rel_scr_stage: parseStage(row.rel_scr_stage),
    dialysis_stage: parseStage(row.dialysis_stage),
    overall_stage: parseStage(row.overall_stage),
    baseline_rel: row.baseline_rel === "" ? null : row.baseline_rel,
    baseline_abs: row.baseline_abs === "" ? null : row.baseline_abs,
  }));
}

/** Re-emit stage records in the engine's canonical file form. */
export function serializeStageRecords(records: readonly StageRecordRow[]): string {
  return serializeCsv(
    STAGE_COLUMNS,
    records.map((r) => [
      r.subject_id,
      r.timestamp,
      r.uo_stage === null ? "" : String(r.uo_stage),
      r.abs_scr_stage === null ? "" : String(r.abs_scr_stage),
      r.rel_scr_stage === null ? "" : String(r.rel_scr_stage),
      r.dialysis_stage === null ? "" : String(r.dialysis_stage),
      r.overall_stage === null ? "" : String(r.overall_stage),
      r.baseline_rel ?? "",
      r.baseline_abs ?? "",
    ]),
  );
}

async function withScratchDir<T>(work: (dir: string) => Promise<T>): Promise<T> {
  const dir = await mkdtemp(join(tmpdir(), "akistage-"));
  try {
    return await work(dir);
  } finally {
    await rm(dir, { recursive: true, force: true });
  }
}

async function writeConfig(dir: string, config: EngineConfig | undefined): Promise<string[]> {
  if (config === undefined || Object.keys(config).length === 0) {
    return [];
  }
  const path = join(dir, "config.json");
  await writeFile(path, JSON.stringify(validateConfig(config)));
  return ["--config", path];
}

/**
 * Stage a dataset given as in-memory tables.  Row for row identical to
 * running the CLI on files with the same contents and configuration.
 */
export async function annotate(
  tables: DatasetTables,
  config?: EngineConfig,
  options: { jobs?: number } = {},
): Promise<AnnotateResult> {
  checkColumns("urine_output", tables.urineOutput, URINE_OUTPUT_COLUMNS);
  checkColumns("creatinine", tables.creatinine, CREATININE_COLUMNS);
  checkColumns("dialysis", tables.dialysis, DIALYSIS_COLUMNS);
  checkColumns("patients", tables.patients, PATIENT_COLUMNS);
  return withScratchDir(async (dir) => {
    const paths = {
      uo: join(dir, "urine_output.csv"),
      scr: join(dir, "creatinine.csv"),
      dialysis: join(dir, "dialysis.csv"),
      patients: join(dir, "patients.csv"),
      output: join(dir, "stages.csv"),
      summary: join(dir, "summaries.csv"),
    };
    await writeFile(paths.uo, tableCsv(tables.urineOutput, URINE_OUTPUT_COLUMNS));
    await writeFile(paths.scr, tableCsv(tables.creatinine, CREATININE_COLUMNS));
    await writeFile(paths.dialysis, tableCsv(tables.dialysis, DIALYSIS_COLUMNS));
    await writeFile(paths.patients, tableCsv(tables.patients, PATIENT_COLUMNS));
    const configFlags = await writeConfig(dir, config);
    const args = [
      "annotate",
      "--urine-output", paths.uo,
      "--creatinine", paths.scr,
      "--dialysis", paths.dialysis,
      "--patients", paths.patients,
      "--output", paths.output,
      "--summary", paths.summary,
      ...configFlags,
    ];
    if (options.jobs !== undefined) {
      args.push("--jobs", String(options.jobs));
    }
    const run = await runEngine(args);
    const raw = await readFile(paths.output, "utf8");
    const rawSummary = await readFile(paths.summary, "utf8");
    return {
      records: parseStageRecords(raw),
      summaries: parseCsv(rawSummary) as PatientSummaryRow[],
      raw,
      report: run.stderr,
    };
  });
}

/** Read the four dataset files into in-memory tables (header check only). */
export async function loadDataset(paths: {
  urineOutputFile: string;
  creatinineFile: string;
  dialysisFile: string;
  patientsFile: string;
}): Promise<DatasetTables> {
  const read = async (path: string, name: string, columns: readonly string[]) => {
    const rows = parseCsv(await readFile(path, "utf8"));
    checkColumns(name, rows, columns);
    return rows as InputRow[];
  };
  return {
    urineOutput: await read(paths.urineOutputFile, "urine_output", URINE_OUTPUT_COLUMNS),
    creatinine: await read(paths.creatinineFile, "creatinine", CREATININE_COLUMNS),
    dialysis: await read(paths.dialysisFile, "dialysis", DIALYSIS_COLUMNS),
    patients: await read(paths.patientsFile, "patients", PATIENT_COLUMNS),
  };
}

function asLabelCsv(labels: readonly StageRecordRow[] | string): string {
  return typeof labels === "string" ? labels : serializeStageRecords(labels);
}

/**
 * Score predictions against gold labels through the engine's validate
 * command.  Accepts stage-record rows or raw file text for either side.
 */
export async function score(
  pred: readonly StageRecordRow[] | string,
  gold: readonly StageRecordRow[] | string,
): Promise<ScoreRow[]> {
  return withScratchDir(async (dir) => {
    const predPath = join(dir, "pred.csv");
    const goldPath = join(dir, "gold.csv");
    const reportPath = join(dir, "report.csv");
    await writeFile(predPath, asLabelCsv(pred));
    await writeFile(goldPath, asLabelCsv(gold));
    await runEngine([
      "validate",
      "--pred", predPath,
      "--gold", goldPath,
      "--report-file", reportPath,
    ]);
    return parseCsv(await readFile(reportPath, "utf8")).map((row) => ({
      category: row.category,
      label: row.label,
      support: Number(row.support),
      matches: Number(row.matches),
      accuracy: Number(row.accuracy),
    }));
  });
}

/** The engine's effective configuration for a given (partial) config. */
export async function effectiveConfig(config?: EngineConfig): Promise<Record<string, unknown>> {
  return withScratchDir(async (dir) => {
    const configFlags = await writeConfig(dir, config);
    const run = await runEngine(["config", ...configFlags]);
    return JSON.parse(run.stdout) as Record<string, unknown>;
  });
}
