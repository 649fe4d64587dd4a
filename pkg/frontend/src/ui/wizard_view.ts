// Wizard view: renders the pending question with exactly the service's
// options, the answered history with edit-in-place, the live question-count
// against the bound, and the completed variation tree with export.

import { flattenVariation } from "../inspector.js";
import type { Answer, QuestionDoc } from "../types.js";
import { WizardStore } from "../wizard.js";
import { clear, el } from "./dom.js";

export function renderWizard(root: HTMLElement, store: WizardStore): void {
  const container = el("div", "wizard");
  root.appendChild(container);
  const render = () => sync(container, store);
  store.subscribe(render);
  render();
}

function sync(container: HTMLElement, store: WizardStore): void {
  const state = store.get();
  clear(container);

  if (state.staleNotice) {
    container.appendChild(el("div", "banner warning", state.staleNotice));
  }
  if (state.errorMessage) {
    container.appendChild(el("div", "banner error", state.errorMessage));
  }

  if (state.phase === "asking" || state.phase === "completed") {
    const counter = el(
      "div",
      "counter",
      `questions: ${store.questionCount()} / bound ${state.bound}`,
    );
    container.appendChild(counter);
  }

  if (state.history.length) {
    const history = el("ol", "history");
    state.history.forEach((item, index) => {
      const line = el("li", "", `${item.question.prompt}  ->  ${formatAnswer(item.answer)}  `);
      const edit = el("button", "edit", "edit");
      edit.addEventListener("click", () => {
        const raw = window.prompt(item.question.prompt, String(formatAnswer(item.answer)));
        if (raw === null) return;
        void store.editAnswer(index, coerce(item.question, raw));
      });
      line.appendChild(edit);
      history.appendChild(line);
    });
    container.appendChild(history);
  }

  if (state.phase === "asking" && state.question) {
    container.appendChild(renderQuestion(state.question, (value) => void store.answer(value)));
  }

  if (state.phase === "completed" && state.result) {
    container.appendChild(el("h3", "", "Goal variation"));
    const tree = el("ul", "tree");
    for (const row of flattenVariation(state.result)) {
      const item = el("li", "", `${"  ".repeat(row.depth)}${row.label} - ${row.summary}`);
      item.style.paddingLeft = `${row.depth}em`;
      tree.appendChild(item);
    }
    container.appendChild(tree);
    const exportButton = el("button", "primary", "Export document");
    exportButton.addEventListener("click", () => {
      void store.exportDocument().then((text) => {
        const blob = new Blob([text], { type: "application/json" });
        const link = el("a");
        link.href = URL.createObjectURL(blob);
        link.download = "variation.json";
        link.click();
      });
    });
    container.appendChild(exportButton);
  }
}

function renderQuestion(question: QuestionDoc, submit: (value: Answer) => void): HTMLElement {
  const box = el("div", "question");
  box.appendChild(el("p", "prompt", question.prompt));

  if (question.free_form === "number") {
    const input = el("input");
    input.type = "number";
    input.step = "any";
    if (typeof question.default === "number") input.value = String(question.default);
    const go = el("button", "primary", "Answer");
    go.addEventListener("click", () => submit(Number(input.value)));
    const hints = el("div", "hints", question.options.map((o) => o.label).join("  |  "));
    box.append(input, go, hints);
    return box;
  }

  for (const option of question.options) {
    const button = el("button", "option", option.label);
    const defaultId =
      question.default === true ? "yes" : question.default === false ? "no" : String(question.default);
    if (option.id === defaultId) {
      button.classList.add("default");
    }
    button.addEventListener("click", () => {
      if (option.id === "yes") return submit(true);
      if (option.id === "no") return submit(false);
      submit(option.id);
    });
    box.appendChild(button);
  }
  return box;
}

function formatAnswer(value: Answer): string {
  if (value === true) return "yes";
  if (value === false) return "no";
  if (typeof value === "object") return JSON.stringify(value);
  return String(value);
}

function coerce(question: QuestionDoc, raw: string): Answer {
  if (question.free_form === "number") return Number(raw);
  if (raw === "yes" || raw === "true") return true;
  if (raw === "no" || raw === "false") return false;
  return raw;
}
