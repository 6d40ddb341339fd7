/** DOM rendering for the review flow; all state arrives via View calls. */

import { Progress, Task } from "./api.js";
import { Answers, View } from "./controller.js";

function element<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing #${id}`);
  return node as T;
}

export class DomView implements View {
  onToggle: ((index: number, value: boolean) => void) | null = null;

  showTask(task: Task, progress: Progress, questions: string[]): void {
    element("review").hidden = false;
    element("done").hidden = true;
    element("progress").textContent = `${progress.judged} / ${progress.total} reviewed`;
    element("context").textContent = task.context_en;
    element("question").textContent = task.question_en;
    element("answer").textContent = task.answer_en;
    element("alternate-answer").textContent = task.alternate_answer;

    const list = element("questions");
    list.replaceChildren();
    questions.forEach((text, index) => {
      const row = document.createElement("div");
      row.className = "question-row";
      const label = document.createElement("span");
      label.textContent = `${index + 1}. ${text}`;
      row.appendChild(label);
      for (const value of [true, false]) {
        const button = document.createElement("button");
        button.type = "button";
        button.textContent = value ? "Yes" : "No";
        button.dataset.index = String(index);
        button.dataset.value = String(value);
        button.addEventListener("click", () => this.onToggle?.(index, value));
        row.appendChild(button);
      }
      list.appendChild(row);
    });
    this.clearBanners();
  }

  showAnswers(answers: Answers): void {
    const buttons = element("questions").querySelectorAll<HTMLButtonElement>("button");
    buttons.forEach((button) => {
      const index = Number(button.dataset.index);
      const value = button.dataset.value === "true";
      button.classList.toggle("selected", answers[index] === value);
    });
  }

  showDone(progress: Progress): void {
    element("review").hidden = true;
    element("done").hidden = false;
    element("done-summary").textContent =
      `All done: ${progress.judged} of ${progress.total} tasks reviewed. Thank you!`;
  }

  showValidationError(message: string): void {
    const banner = element("validation");
    banner.textContent = message;
    banner.hidden = false;
  }

  showNotice(message: string): void {
    const banner = element("notice");
    banner.textContent = message;
    banner.hidden = false;
  }

  showRetryBanner(message: string): void {
    const banner = element("retry");
    banner.textContent = message;
    banner.hidden = false;
  }

  clearBanners(): void {
    for (const id of ["validation", "notice", "retry"]) {
      element(id).hidden = true;
    }
  }
}
