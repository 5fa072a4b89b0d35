/**
 * Consistency-adjudication queue state. Candidates are shown next to their
 * labeled exemplar; each accept/reject POSTs immediately. A candidate that
 * went stale on the server (410) greys out instead of erroring.
 */

import type { AnnotationApi, CandidateView } from "./api.js";
import { ApiError } from "./api.js";

export type QueueItemStatus = "pending" | "posting" | "accepted" | "rejected" | "stale";

export interface QueueItem {
  candidate: CandidateView;
  status: QueueItemStatus;
}

export class ConsistencyQueue {
  items: QueueItem[] = [];
  corpusRevision = 0;

  constructor(private readonly api: AnnotationApi) {}

  async load(): Promise<void> {
    const view = await this.api.consistencyQueue();
    this.corpusRevision = view.corpus_revision;
    this.items = view.candidates.map((candidate) => ({
      candidate,
      status: "pending" as QueueItemStatus,
    }));
  }

  pendingCount(): number {
    return this.items.filter((item) => item.status === "pending").length;
  }

  item(candidateId: string): QueueItem {
    const found = this.items.find((item) => item.candidate.id === candidateId);
    if (!found) throw new Error(`no queued candidate ${candidateId}`);
    return found;
  }

  async decide(candidateId: string, decision: "accept" | "reject"): Promise<void> {
    const item = this.item(candidateId);
    if (item.status !== "pending") return;
    item.status = "posting";
    try {
      const result = await this.api.decideConsistency(candidateId, decision);
      this.corpusRevision = result.corpus_revision;
      item.status = decision === "accept" ? "accepted" : "rejected";
    } catch (error) {
      if (error instanceof ApiError && error.status === 410) {
        item.status = "stale";
        return;
      }
      item.status = "pending"; // still retryable by the user
      throw error;
    }
  }
}
