/** DOM wiring for the judging screen.
 *
 * All behavior lives in the pure modules (state, queue, grades, api); this
 * file renders the current state and translates clicks and keystrokes into
 * events. Pending submissions are mirrored to localStorage so a reload
 * neither loses nor duplicates a grade: acknowledged events are removed
 * from the mirror before the acknowledgment is acted upon visually.
 */

import { ApiClient, ApiError } from "./api.js";
import { GRADES, gradeForKey } from "./grades.js";
import { SubmissionQueue } from "./queue.js";
import { initialState, reduce, UiEvent, UiState } from "./state.js";
import { renderFormula } from "./render.js";
import type { JudgmentEvent, Task } from "./types.js";

const QUEUE_KEY = "formulabench.pending";
const ASSESSOR_KEY = "formulabench.assessor";
const RETRY_MS = 3000;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

class App {
  private state: UiState;
  private readonly queue = new SubmissionQueue();
  private readonly api = new ApiClient();
  private retryTimer: number | null = null;
  private pumping = false;

  constructor(private readonly assessor: string) {
    this.state = initialState(assessor);
    const saved = localStorage.getItem(QUEUE_KEY);
    if (saved) {
      try {
        this.queue.restore(JSON.parse(saved) as JudgmentEvent[]);
      } catch {
        localStorage.removeItem(QUEUE_KEY);
      }
    }
  }

  start(): void {
    this.buildGradeButtons();
    document.addEventListener("keydown", (e) => {
      if (this.state.screen !== "judging" || !this.state.task) {
        return;
      }
      const grade = gradeForKey(e.key);
      if (grade) {
        this.submit(grade.code);
      }
    });
    this.render();
    void this.pump();
  }

  private dispatch(event: UiEvent): void {
    this.state = reduce(this.state, event);
    this.render();
  }

  private persistQueue(): void {
    localStorage.setItem(QUEUE_KEY, JSON.stringify(this.queue.snapshot()));
  }

  private submit(grade: number): void {
    const task = this.state.task;
    if (!task) {
      return;
    }
    this.queue.enqueue({
      topic_id: task.topic_id,
      item_id: task.item_id,
      assessor: this.assessor,
      grade,
    });
    this.persistQueue();
    this.dispatch({ kind: "graded" });
    void this.pump();
  }

  /** Deliver queued events one at a time, then refresh the task. */
  private async pump(): Promise<void> {
    if (this.pumping) {
      return;
    }
    this.pumping = true;
    try {
      for (;;) {
        const pending = this.queue.takeNext();
        if (!pending) {
          break;
        }
        try {
          const ack = await this.api.postJudgment(pending);
          this.queue.acknowledge(pending.clientId);
          this.persistQueue();
          this.dispatch({ kind: "ack", seq: ack.seq });
        } catch (err) {
          if (err instanceof ApiError && err.permanent) {
            this.queue.reject(pending.clientId);
            this.persistQueue();
            this.dispatch({ kind: "rejected", detail: err.message });
          } else {
            this.queue.fail(pending.clientId);
            this.dispatch({
              kind: "offline",
              message: "connection lost; grade saved locally, retrying",
            });
            this.scheduleRetry();
            return;
          }
        }
      }
      await this.refresh();
    } finally {
      this.pumping = false;
    }
  }

  private async refresh(): Promise<void> {
    try {
      const response = await this.api.getNext(this.assessor);
      this.dispatch({ kind: "online" });
      this.dispatch({ kind: "next", response });
    } catch {
      this.dispatch({ kind: "offline", message: "service unreachable, retrying" });
      this.scheduleRetry();
    }
  }

  private scheduleRetry(): void {
    if (this.retryTimer !== null) {
      return;
    }
    this.retryTimer = window.setTimeout(() => {
      this.retryTimer = null;
      void this.pump();
    }, RETRY_MS);
  }

  private buildGradeButtons(): void {
    const bar = el<HTMLDivElement>("grades");
    bar.innerHTML = "";
    for (const grade of GRADES) {
      const button = document.createElement("button");
      button.className = "grade";
      button.dataset.code = String(grade.code);
      button.title = grade.description;
      button.textContent = `${grade.label} (${grade.key})`;
      button.addEventListener("click", () => this.submit(grade.code));
      bar.appendChild(button);
    }
  }

  private render(): void {
    const { screen, task, judged, total, banner } = this.state;
    el("assessor-name").textContent = this.assessor;
    el("banner").textContent = banner ?? "";
    el("banner").style.display = banner ? "block" : "none";
    el("pending-count").textContent =
      this.queue.size > 0 ? `${this.queue.size} unsent` : "";
    el("progress").textContent = total > 0 ? `${judged} / ${total} judged` : "";

    el("connecting").style.display = screen === "connecting" ? "block" : "none";
    el("judging").style.display = screen === "judging" && task ? "block" : "none";
    el("done").style.display = screen === "done" ? "block" : "none";

    if (screen === "done") {
      el("done-stats").textContent = `${judged} of ${total} items judged.`;
    }
    if (task) {
      this.renderTask(task);
    }
  }

  private renderTask(task: Task): void {
    renderFormula(el("query-formula"), task.query_latex);
    renderFormula(el("item-formula"), task.item_latex);
    el("item-meta").textContent =
      `${task.topic_id} / ${task.item_id}` +
      (task.instances_in_cluster > 1
        ? ` (${task.instances_in_cluster} identical instances)`
        : "");
    const contextPanel = el("context-panel");
    if (task.context) {
      contextPanel.style.display = "block";
      el("context-text").textContent = task.context;
      el("context-doc").textContent = task.context_doc_id ?? "";
    } else if (task.context_doc_id) {
      contextPanel.style.display = "block";
      el("context-text").textContent = "";
      el("context-doc").textContent = `source document: ${task.context_doc_id}`;
    } else {
      contextPanel.style.display = "none";
    }
  }
}

function main(): void {
  let assessor = localStorage.getItem(ASSESSOR_KEY);
  if (!assessor) {
    assessor = (window.prompt("Assessor name:") ?? "").trim() || "anonymous";
    localStorage.setItem(ASSESSOR_KEY, assessor);
  }
  new App(assessor).start();
}

document.addEventListener("DOMContentLoaded", main);
