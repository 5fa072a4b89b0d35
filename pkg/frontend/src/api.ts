/**
 * Typed client for the annotation service JSON API.
 *
 * Every payload carries schema_version so the UI can detect incompatible
 * servers. Consistency decisions retry on network failure with an
 * idempotency key; the server treats a repeated decision as a no-op, so
 * retries are safe.
 */

export const SCHEMA_VERSION = 1;

export interface TokenView {
  index: number;
  surface: string;
}

export interface TaskSummary {
  id: string;
  n_tokens: number;
  annotators: string[];
  status: Record<string, "pending" | "submitted">;
  finalized: boolean;
}

export interface MySubmission {
  rows: number[][];
  unclear: boolean;
  revision: number;
}

export interface TaskDetail {
  id: string;
  tokens: TokenView[];
  rows_per_sentence: number;
  annotators: string[];
  finalized: boolean;
  mine?: MySubmission | null;
}

export interface SubmitBody {
  schema_version: number;
  rows: number[][];
  unclear: boolean;
  base_revision: number;
}

export interface ReviewItemView {
  token_indices: number[];
  annotators: string[];
  agreement: "both" | "single";
  highlight: boolean;
}

export interface ReviewView {
  id: string;
  tokens: TokenView[];
  items: ReviewItemView[];
  unclear: boolean;
  finalized: boolean;
}

export interface VerdictBody {
  token_indices: number[];
  verdict: "keep" | "delete";
}

export interface FinalizeBody {
  schema_version: number;
  verdicts: VerdictBody[];
  added: number[][];
}

export interface CandidateView {
  id: string;
  sentence_id: string;
  token_indices: number[];
  matched_entry: string;
  exemplar: { sentence_id: string; token_indices: number[] };
  status: string;
}

export interface ConsistencyQueueView {
  corpus_revision: number;
  candidates: CandidateView[];
}

export interface DecisionResult {
  id: string;
  decision: "accept" | "reject";
  corpus_revision: number;
  applied: boolean;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface RetryOptions {
  attempts?: number;
  delayMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export class AnnotationApi {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string,
    private readonly fetchImpl: FetchLike = (input, init) => globalThis.fetch(input, init),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    extraHeaders?: Record<string, string>,
  ): Promise<T> {
    const headers: Record<string, string> = {
      Authorization: `Bearer ${this.token}`,
      ...extraHeaders,
    };
    if (body !== undefined) {
      headers["Content-Type"] = "application/json";
    }
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const payload = (await response.json()) as { detail?: unknown };
        if (typeof payload.detail === "string") detail = payload.detail;
        else if (payload.detail !== undefined) detail = JSON.stringify(payload.detail);
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  listTasks(): Promise<{ schema_version: number; tasks: TaskSummary[] }> {
    return this.request("GET", "/tasks");
  }

  getTask(taskId: string): Promise<TaskDetail> {
    return this.request("GET", `/tasks/${encodeURIComponent(taskId)}`);
  }

  submitAnnotation(
    taskId: string,
    annotator: string,
    body: SubmitBody,
  ): Promise<{ revision: number }> {
    const path = `/tasks/${encodeURIComponent(taskId)}/annotations/${encodeURIComponent(annotator)}`;
    return this.request("PUT", path, body);
  }

  review(taskId: string): Promise<ReviewView> {
    return this.request("GET", `/tasks/${encodeURIComponent(taskId)}/review`);
  }

  finalize(taskId: string, body: FinalizeBody): Promise<{ gold: number[][]; corpus_revision: number }> {
    return this.request("POST", `/tasks/${encodeURIComponent(taskId)}/finalize`, body);
  }

  consistencyQueue(): Promise<ConsistencyQueueView> {
    return this.request("GET", "/consistency");
  }

  /**
   * POST one accept/reject decision, retrying on network faults.
   *
   * The idempotency key is derived from the candidate and decision and
   * sent on every attempt; the server already treats a repeated decision
   * as a no-op, so a retried request can never apply twice.
   */
  async decideConsistency(
    candidateId: string,
    decision: "accept" | "reject",
    options: RetryOptions = {},
  ): Promise<DecisionResult> {
    const attempts = options.attempts ?? 3;
    const delayMs = options.delayMs ?? 250;
    const sleep = options.sleep ?? defaultSleep;
    const idempotencyKey = `${candidateId}:${decision}`;
    let lastError: unknown;
    for (let attempt = 0; attempt < attempts; attempt += 1) {
      try {
        return await this.request<DecisionResult>(
          "POST",
          "/consistency",
          { schema_version: SCHEMA_VERSION, id: candidateId, decision },
          { "Idempotency-Key": idempotencyKey },
        );
      } catch (error) {
        if (error instanceof ApiError) throw error; // the server answered
        lastError = error; // network fault: retry
        if (attempt + 1 < attempts) await sleep(delayMs * (attempt + 1));
      }
    }
    throw lastError;
  }
}
