/**
 * Checkbox-grid state for one sentence.
 *
 * The grid is a rows-by-tokens boolean matrix; each row encodes at most
 * one MWE as its set of checked token positions (1-based, to match the
 * service). The marked-MWE display is derived from the matrix on every
 * read, so it is always in sync with the checkboxes. Toggling never
 * fails; validity (a non-empty row needs two checks) is enforced when
 * building the submission payload.
 */

import type { SubmitBody } from "./api.js";
import { SCHEMA_VERSION } from "./api.js";

export interface MarkedMwe {
  row: number;
  positions: number[];
  display: string;
}

export class GridState {
  readonly tokens: string[];
  unclear = false;
  private matrix: boolean[][];

  constructor(tokens: string[], rows = 9) {
    if (rows < 1) throw new Error(`a grid needs at least one row, got ${rows}`);
    this.tokens = [...tokens];
    this.matrix = Array.from({ length: rows }, () => this.tokens.map(() => false));
  }

  /** Rebuild a grid from previously submitted rows (one MWE per row). */
  static fromRows(tokens: string[], rows: number[][], rowCount = 9): GridState {
    const grid = new GridState(tokens, Math.max(rowCount, rows.length));
    rows.forEach((positions, row) => {
      for (const position of positions) grid.setChecked(row, position, true);
    });
    return grid;
  }

  get rowCount(): number {
    return this.matrix.length;
  }

  addRow(): void {
    this.matrix.push(this.tokens.map(() => false));
  }

  isChecked(row: number, position: number): boolean {
    this.assertCell(row, position);
    return this.matrix[row]![position - 1]!;
  }

  setChecked(row: number, position: number, value: boolean): void {
    this.assertCell(row, position);
    this.matrix[row]![position - 1] = value;
  }

  toggle(row: number, position: number): void {
    this.setChecked(row, position, !this.isChecked(row, position));
  }

  toggleUnclear(): void {
    this.unclear = !this.unclear;
  }

  private assertCell(row: number, position: number): void {
    if (row < 0 || row >= this.matrix.length) {
      throw new Error(`row ${row} out of range (0..${this.matrix.length - 1})`);
    }
    if (position < 1 || position > this.tokens.length) {
      throw new Error(`token position ${position} out of range (1..${this.tokens.length})`);
    }
  }

  /** Checked positions per row, 1-based and ascending; empty rows included. */
  checkedRows(): number[][] {
    return this.matrix.map((row) =>
      row.flatMap((checked, i) => (checked ? [i + 1] : [])),
    );
  }

  /** Rows currently encoding an MWE (two or more checks), with display text. */
  markedMwes(): MarkedMwe[] {
    const marked: MarkedMwe[] = [];
    this.checkedRows().forEach((positions, row) => {
      if (positions.length >= 2) {
        marked.push({ row, positions, display: this.describe(positions) });
      }
    });
    return marked;
  }

  /** Surface forms of a span; a gap shows as an ellipsis: "pick … up". */
  describe(positions: number[]): string {
    const parts: string[] = [];
    positions.forEach((position, i) => {
      if (i > 0 && position > positions[i - 1]! + 1) parts.push("…");
      parts.push(this.tokens[position - 1]!);
    });
    return parts.join(" ");
  }

  /** Rows with exactly one check; they block submission. */
  invalidRows(): number[] {
    return this.checkedRows().flatMap((positions, row) =>
      positions.length === 1 ? [row] : [],
    );
  }

  canSubmit(): boolean {
    return this.invalidRows().length === 0;
  }

  /** The PUT body; throws if a row has a single check. */
  payload(baseRevision: number): SubmitBody {
    const invalid = this.invalidRows();
    if (invalid.length > 0) {
      throw new Error(`rows with a single check: ${invalid.join(", ")}`);
    }
    return {
      schema_version: SCHEMA_VERSION,
      rows: this.checkedRows().filter((positions) => positions.length > 0),
      unclear: this.unclear,
      base_revision: baseRevision,
    };
  }
}
