import { ApiClient } from "./api.js";
import { ReviewController } from "./controller.js";
import { DomView } from "./view.js";

function byId<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

async function beginSession(annotator: string): Promise<void> {
  sessionStorage.setItem("annotator", annotator);
  byId("login").hidden = true;
  byId("who").textContent = annotator;
  const view = new DomView();
  const controller = new ReviewController(new ApiClient(""), view, annotator);
  view.onToggle = (index, value) => controller.setAnswer(index, value);
  byId<HTMLButtonElement>("submit").addEventListener("click", () => void controller.submit());
  byId<HTMLButtonElement>("retry-button").addEventListener("click", () => {
    if (controller.currentTask === null) void controller.advance();
    else void controller.submit();
  });
  await controller.start();
}

document.addEventListener("DOMContentLoaded", () => {
  const form = byId<HTMLFormElement>("login-form");
  const input = byId<HTMLInputElement>("annotator-input");
  const remembered = sessionStorage.getItem("annotator");
  if (remembered) {
    void beginSession(remembered);
    return;
  }
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const annotator = input.value.trim();
    if (annotator) void beginSession(annotator);
  });
});
