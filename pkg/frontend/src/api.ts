/** Typed client for the annotation service's JSON endpoints. */

export interface Task {
  entry_id: string;
  context_en: string;
  question_en: string;
  answer_en: string;
  alternate_answer: string;
  /** Judgments the server already holds for this task. */
  assigned_count?: number;
}

export interface Progress {
  judged: number;
  total: number;
}

export interface NextTask {
  task: Task;
  progress: Progress;
}

export type SubmitResult = "stored" | "duplicate";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(private readonly baseUrl: string = "", fetchFn?: FetchLike) {
    // Bind so a bare `fetch` keeps its global receiver in the browser.
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  /** The four review questions, in display order. */
  async questions(): Promise<string[]> {
    const response = await this.fetchFn(`${this.baseUrl}/api/questions`);
    if (!response.ok) throw new ApiError("cannot load questions", response.status);
    return (await response.json()) as string[];
  }

  /** The least-judged task still open for this annotator, or null when done. */
  async nextTask(annotator: string): Promise<NextTask | null> {
    const url = `${this.baseUrl}/api/tasks/next?annotator=${encodeURIComponent(annotator)}`;
    const response = await this.fetchFn(url);
    if (response.status === 204) return null;
    if (!response.ok) throw new ApiError("cannot fetch next task", response.status);
    return (await response.json()) as NextTask;
  }

  async progress(annotator: string): Promise<Progress> {
    const url = `${this.baseUrl}/api/progress?annotator=${encodeURIComponent(annotator)}`;
    const response = await this.fetchFn(url);
    if (!response.ok) throw new ApiError("cannot fetch progress", response.status);
    return (await response.json()) as Progress;
  }

  /**
   * Submit a complete judgment. Resolves to "duplicate" when the server
   * already has one from this annotator (HTTP 409); rejects on transport
   * or other HTTP errors.
   */
  async submitJudgment(
    entryId: string,
    annotator: string,
    answers: boolean[],
  ): Promise<SubmitResult> {
    const response = await this.fetchFn(`${this.baseUrl}/api/judgments`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ entry_id: entryId, annotator_id: annotator, answers }),
    });
    if (response.status === 201) return "stored";
    if (response.status === 409) return "duplicate";
    throw new ApiError("judgment rejected", response.status);
  }
}
