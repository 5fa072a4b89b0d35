/**
 * Entry point: connect to the service, list tasks, and open the three
 * screens. Connection settings come from the form at the top of the page.
 */

import { AnnotationApi, ApiError } from "./api.js";
import { ConsistencyQueue } from "./consistency.js";
import { renderGrid, renderQueue, renderReview } from "./dom.js";
import { GridState } from "./grid.js";
import { ReviewState } from "./review.js";

interface Session {
  api: AnnotationApi;
  annotator: string;
}

function statusLine(message: string): void {
  const node = document.querySelector<HTMLElement>("#status");
  if (node) node.textContent = message;
}

function describeError(error: unknown): string {
  if (error instanceof ApiError) return `${error.status}: ${error.message}`;
  return String(error);
}

async function openTask(session: Session, taskId: string, main: HTMLElement): Promise<void> {
  const detail = await session.api.getTask(taskId);
  const tokens = detail.tokens.map((t) => t.surface);
  const mine = detail.mine ?? null;
  const grid = mine
    ? GridState.fromRows(tokens, mine.rows, detail.rows_per_sentence)
    : new GridState(tokens, detail.rows_per_sentence);
  if (mine) grid.unclear = mine.unclear;
  const baseRevision = mine ? mine.revision : 0;

  renderGrid(main, grid, {
    onSubmit: (state) => {
      session.api
        .submitAnnotation(taskId, session.annotator, state.payload(baseRevision))
        .then((result) => {
          statusLine(`saved ${taskId} at revision ${result.revision}`);
          return openTask(session, taskId, main);
        })
        .catch((error) => statusLine(describeError(error)));
    },
  });
}

async function openReview(session: Session, taskId: string, main: HTMLElement): Promise<void> {
  try {
    const review = await session.api.review(taskId);
    const state = new ReviewState(review);
    renderReview(main, state, (s) => {
      session.api
        .finalize(taskId, s.payload())
        .then((result) => statusLine(`finalized ${taskId}: ${result.gold.length} MWEs`))
        .catch((error) => statusLine(describeError(error)));
    });
  } catch (error) {
    statusLine(describeError(error));
  }
}

async function openQueue(session: Session, main: HTMLElement): Promise<void> {
  const queue = new ConsistencyQueue(session.api);
  try {
    await queue.load();
    renderQueue(main, queue);
  } catch (error) {
    statusLine(describeError(error));
  }
}

async function refreshTasks(session: Session): Promise<void> {
  const listNode = document.querySelector<HTMLElement>("#tasks");
  const main = document.querySelector<HTMLElement>("#main");
  if (!listNode || !main) return;
  const { tasks } = await session.api.listTasks();
  listNode.textContent = "";
  for (const task of tasks) {
    const row = document.createElement("li");
    const mineStatus = task.status[session.annotator] ?? "n/a";
    row.textContent = `${task.id} (${task.n_tokens} tokens, me: ${mineStatus}) `;
    const annotate = document.createElement("button");
    annotate.textContent = "annotate";
    annotate.addEventListener("click", () => void openTask(session, task.id, main));
    row.appendChild(annotate);
    const review = document.createElement("button");
    review.textContent = "review";
    review.addEventListener("click", () => void openReview(session, task.id, main));
    row.appendChild(review);
    listNode.appendChild(row);
  }
}

export function boot(): void {
  const form = document.querySelector<HTMLFormElement>("#connect");
  if (!form) return;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const base = (document.querySelector<HTMLInputElement>("#base-url")?.value ?? "").replace(/\/$/, "");
    const token = document.querySelector<HTMLInputElement>("#token")?.value ?? "";
    const annotator = document.querySelector<HTMLInputElement>("#annotator")?.value ?? "";
    const session: Session = { api: new AnnotationApi(base, token), annotator };
    refreshTasks(session).catch((error) => statusLine(describeError(error)));
    const queueButton = document.querySelector<HTMLElement>("#open-queue");
    const main = document.querySelector<HTMLElement>("#main");
    if (queueButton && main) {
      queueButton.addEventListener("click", () => void openQueue(session, main));
    }
  });
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  boot();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", boot);
}
