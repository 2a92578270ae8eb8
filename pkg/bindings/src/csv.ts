import Papa from "papaparse";

/** Parse delimited text into header-keyed string records. */
export function parseCsv(text: string): Record<string, string>[] {
  const result = Papa.parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: true,
  });
  if (result.errors.length > 0) {
    const first = result.errors[0];
    throw new Error(`csv parse error at row ${first.row}: ${first.message}`);
  }
  return result.data;
}

function quoteMinimal(field: string): string {
  if (/[",\r\n]/.test(field)) {
    return `"${field.replace(/"/g, '""')}"`;
  }
  return field;
}

/**
 * Serialize rows in the engine's own writer format: comma-delimited,
 * minimally quoted, LF line endings, trailing newline.  Byte-compatible
 * with the files the CLI writes, which is what the parity tests assert.
 */
export function serializeCsv(columns: readonly string[], rows: readonly string[][]): string {
  const lines = [columns.map(quoteMinimal).join(",")];
  for (const row of rows) {
    lines.push(row.map(quoteMinimal).join(","));
  }
  return lines.join("\n") + "\n";
}
