/** Minimal CSV reading for the toolkit's output schemas (no quoting, LF rows). */

export class SchemaError extends Error {}

export interface Table {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty CSV");
  }
  const header = lines[0]!.split(",");
  const rows = lines.slice(1).map((line) => line.split(","));
  for (const [i, row] of rows.entries()) {
    if (row.length !== header.length) {
      throw new SchemaError(
        `row ${i + 1} has ${row.length} fields, header has ${header.length}`,
      );
    }
  }
  return { header, rows };
}

/** Numeric column accessor; throws SchemaError when the column is missing. */
export function column(table: Table, name: string): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(
      `missing column '${name}' (have: ${table.header.join(", ")})`,
    );
  }
  return table.rows.map((row, i) => {
    const value = Number(row[idx]);
    if (Number.isNaN(value)) {
      throw new SchemaError(`row ${i + 1}, column '${name}': not a number`);
    }
    return value;
  });
}

export function stringColumn(table: Table, name: string): string[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(
      `missing column '${name}' (have: ${table.header.join(", ")})`,
    );
  }
  return table.rows.map((row) => row[idx]!);
}
