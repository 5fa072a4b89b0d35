/**
 * Review-screen state: the union of both annotators' MWEs with agreement
 * flags. Single-annotator items are highlighted and each needs an explicit
 * keep/delete verdict before finalize unlocks; the reviewer can also add
 * MWEs the annotators missed.
 */

import type { FinalizeBody, ReviewItemView, ReviewView } from "./api.js";
import { SCHEMA_VERSION } from "./api.js";

export type Verdict = "keep" | "delete";

function keyOf(positions: number[]): string {
  return [...positions].sort((a, b) => a - b).join("-");
}

export class ReviewState {
  readonly review: ReviewView;
  private verdicts = new Map<string, Verdict>();
  private addedMwes: number[][] = [];

  constructor(review: ReviewView) {
    this.review = review;
  }

  get items(): ReviewItemView[] {
    return this.review.items;
  }

  verdictFor(positions: number[]): Verdict | undefined {
    return this.verdicts.get(keyOf(positions));
  }

  setVerdict(positions: number[], verdict: Verdict): void {
    const key = keyOf(positions);
    if (!this.review.items.some((item) => keyOf(item.token_indices) === key)) {
      throw new Error(`no reviewable MWE at ${positions.join(",")}`);
    }
    this.verdicts.set(key, verdict);
  }

  /** Highlighted items still waiting for a keep/delete decision. */
  pendingHighlights(): ReviewItemView[] {
    return this.review.items.filter(
      (item) => item.highlight && !this.verdicts.has(keyOf(item.token_indices)),
    );
  }

  canFinalize(): boolean {
    return this.pendingHighlights().length === 0;
  }

  /** Register a reviewer-added MWE (at least two distinct positions). */
  addMwe(positions: number[]): void {
    const unique = [...new Set(positions)].sort((a, b) => a - b);
    if (unique.length < 2) {
      throw new Error("an MWE needs at least two tokens");
    }
    const max = this.review.tokens.length;
    if (unique[0]! < 1 || unique[unique.length - 1]! > max) {
      throw new Error(`positions out of range (1..${max})`);
    }
    if (!this.addedMwes.some((existing) => keyOf(existing) === keyOf(unique))) {
      this.addedMwes.push(unique);
    }
  }

  removeAdded(positions: number[]): void {
    const key = keyOf(positions);
    this.addedMwes = this.addedMwes.filter((existing) => keyOf(existing) !== key);
  }

  get added(): readonly number[][] {
    return this.addedMwes;
  }

  /** Client-side preview of the finalize outcome: union - deleted + added. */
  goldPreview(): number[][] {
    const kept = this.review.items
      .filter((item) => this.verdicts.get(keyOf(item.token_indices)) !== "delete")
      .map((item) => [...item.token_indices]);
    for (const extra of this.addedMwes) {
      if (!kept.some((existing) => keyOf(existing) === keyOf(extra))) {
        kept.push([...extra]);
      }
    }
    kept.sort((a, b) => keyOf(a).localeCompare(keyOf(b), undefined, { numeric: true }));
    return kept;
  }

  /** The POST body; throws while a highlighted item lacks a verdict. */
  payload(): FinalizeBody {
    const pending = this.pendingHighlights();
    if (pending.length > 0) {
      const spans = pending.map((item) => item.token_indices.join(",")).join("; ");
      throw new Error(`highlighted MWEs still need a verdict: ${spans}`);
    }
    return {
      schema_version: SCHEMA_VERSION,
      verdicts: [...this.verdicts.entries()].map(([key, verdict]) => ({
        token_indices: key.split("-").map(Number),
        verdict,
      })),
      added: this.addedMwes.map((positions) => [...positions]),
    };
  }
}
