/**
 * Review-flow state machine, independent of the DOM.
 *
 * All rendering goes through the View interface so the flow can be driven
 * headlessly in tests. Invariants: a judgment is submitted only when all
 * four answers are explicitly chosen, and a failed submit keeps the form
 * state so nothing is lost across retries.
 */

import { NextTask, Progress, SubmitResult, Task } from "./api.js";

export const QUESTION_COUNT = 4;

export type Answers = (boolean | null)[];

/** The slice of the HTTP client the review flow needs (ApiClient satisfies it). */
export interface ReviewApi {
  questions(): Promise<string[]>;
  nextTask(annotator: string): Promise<NextTask | null>;
  progress(annotator: string): Promise<Progress>;
  submitJudgment(entryId: string, annotator: string, answers: boolean[]): Promise<SubmitResult>;
}

export interface View {
  showTask(task: Task, progress: Progress, questions: string[]): void;
  showAnswers(answers: Answers): void;
  showDone(progress: Progress): void;
  showValidationError(message: string): void;
  showNotice(message: string): void;
  showRetryBanner(message: string): void;
  clearBanners(): void;
}

export class ReviewController {
  answers: Answers = emptyAnswers();
  currentTask: Task | null = null;
  questions: string[] = [];

  constructor(
    private readonly api: ReviewApi,
    private readonly view: View,
    readonly annotator: string,
  ) {}

  async start(): Promise<void> {
    try {
      this.questions = await this.api.questions();
    } catch {
      this.view.showRetryBanner("Cannot reach the server. Check the connection and retry.");
      return;
    }
    await this.advance();
  }

  setAnswer(index: number, value: boolean): void {
    if (index < 0 || index >= QUESTION_COUNT) return;
    this.answers[index] = value;
    this.view.showAnswers(this.answers);
  }

  allAnswered(): boolean {
    return this.answers.every((a) => a !== null);
  }

  /** Submit the current judgment; blocks until every toggle is set. */
  async submit(): Promise<void> {
    if (this.currentTask === null) return;
    if (!this.allAnswered()) {
      this.view.showValidationError("Answer all four questions before submitting.");
      return;
    }
    this.view.clearBanners();
    let result;
    try {
      result = await this.api.submitJudgment(
        this.currentTask.entry_id,
        this.annotator,
        this.answers as boolean[],
      );
    } catch {
      // Keep the chosen answers; the annotator can retry without data loss.
      this.view.showRetryBanner("Submission failed. Your answers are kept; retry when online.");
      return;
    }
    if (result === "duplicate") {
      this.view.showNotice("Already judged on another session; moving on.");
    }
    await this.advance();
  }

  /** Fetch the next task; a 204 renders the done state. */
  async advance(): Promise<void> {
    let next: NextTask | null;
    try {
      next = await this.api.nextTask(this.annotator);
    } catch {
      this.view.showRetryBanner("Cannot fetch the next task. Retry when online.");
      return;
    }
    this.answers = emptyAnswers();
    if (next === null) {
      this.currentTask = null;
      let progress: Progress;
      try {
        progress = await this.api.progress(this.annotator);
      } catch {
        progress = { judged: 0, total: 0 };
      }
      this.view.showDone(progress);
      return;
    }
    this.currentTask = next.task;
    this.view.showTask(next.task, next.progress, this.questions);
    this.view.showAnswers(this.answers);
  }
}

function emptyAnswers(): Answers {
  return Array.from({ length: QUESTION_COUNT }, () => null);
}
