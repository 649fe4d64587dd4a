import { ApiClient } from "./api.js";
import type { EnvDoc } from "./types.js";
import { clear, el, parseJsonArea } from "./ui/dom.js";
import { renderInspector } from "./ui/inspector_view.js";
import { renderPlayer } from "./ui/player_view.js";
import { renderWizard } from "./ui/wizard_view.js";
import { WizardStore } from "./wizard.js";

const api = new ApiClient("");
const store = new WizardStore(api);

const tabs = [
  { id: "wizard", title: "Goal wizard", render: renderWizardTab },
  { id: "inspector", title: "Comparison inspector", render: (c: HTMLElement) => renderInspector(c, api) },
  { id: "player", title: "Plan player", render: (c: HTMLElement) => renderPlayer(c, api) },
];

function renderWizardTab(content: HTMLElement): void {
  const beforeArea = el("textarea");
  beforeArea.placeholder = "before snapshot";
  const afterArea = el("textarea");
  afterArea.placeholder = "after snapshot";
  const start = el("button", "primary", "Start session");
  const host = el("div");
  content.append(beforeArea, afterArea, start, host);
  start.addEventListener("click", () => {
    void store.start(parseJsonArea(beforeArea) as EnvDoc, parseJsonArea(afterArea) as EnvDoc);
  });
  renderWizard(host, store);
}

function boot(): void {
  const root = document.getElementById("app");
  if (!root) return;
  const nav = el("nav", "tabs");
  const content = el("section", "content");
  root.append(nav, content);

  let active = tabs[0].id;
  const draw = () => {
    clear(nav);
    clear(content);
    for (const tab of tabs) {
      const button = el("button", tab.id === active ? "tab active" : "tab", tab.title);
      button.addEventListener("click", () => {
        active = tab.id;
        draw();
      });
      nav.appendChild(button);
    }
    tabs.find((t) => t.id === active)?.render(content);
  };
  draw();
}

boot();
