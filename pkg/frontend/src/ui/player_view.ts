// Plan player: plan + execute a pasted environment/variation pair, then step
// through the pours with container levels as bars and cumulative duration.

import type { ServiceApi } from "../api.js";
import { buildPlayer, fmt, PlayerModel } from "../player.js";
import type { EnvDoc, VariationDoc } from "../types.js";
import { clear, el, parseJsonArea } from "./dom.js";

export function renderPlayer(root: HTMLElement, api: ServiceApi): void {
  const container = el("div", "player");
  const envArea = el("textarea");
  envArea.placeholder = "environment document";
  const variationArea = el("textarea");
  variationArea.placeholder = "variation document";
  const go = el("button", "primary", "Plan and execute");
  const output = el("div", "output");
  container.append(envArea, variationArea, go, output);
  root.appendChild(container);

  go.addEventListener("click", () => {
    clear(output);
    const env = parseJsonArea(envArea) as EnvDoc;
    const variation = parseJsonArea(variationArea) as VariationDoc;
    void api
      .plan(env, variation)
      .then((result) => {
        if (!result.satisfiable) {
          output.appendChild(el("div", "banner error", "no plan exists for this goal"));
          return;
        }
        return api.execute(env, result.plan, variation).then((trace) => {
          showPlayer(output, buildPlayer(trace));
        });
      })
      .catch((error) => output.appendChild(el("div", "banner error", String(error))));
  });
}

function showPlayer(output: HTMLElement, model: PlayerModel): void {
  let index = 0;
  const title = el("h3");
  const bars = el("div", "bars");
  const clock = el("div", "clock");
  const controls = el("div", "controls");
  const back = el("button", "", "back");
  const forward = el("button", "", "step");
  controls.append(back, forward);
  output.append(title, bars, clock, controls);
  if (model.verdict) {
    output.appendChild(
      el("p", model.verdict === "Satisfied" ? "verdict pass" : "verdict fail",
        `verdict: ${model.verdict}`),
    );
  }

  const volumes: Record<string, number> = {};
  for (const frame of model.frames) {
    for (const [id, level] of Object.entries(frame.levels)) {
      volumes[id] = Math.max(volumes[id] ?? 0, level);
    }
  }

  const draw = () => {
    const frame = model.frames[index];
    title.textContent = `step ${frame.index}/${model.frames.length - 1}: ${frame.label}`;
    clock.textContent =
      `step duration ${fmt(frame.stepDuration)} s, elapsed ${fmt(frame.elapsed)} s ` +
      `of ${fmt(model.totalDuration)} s`;
    clear(bars);
    for (const id of model.containers) {
      const level = frame.levels[id] ?? 0;
      const row = el("div", "bar-row");
      row.appendChild(el("span", "bar-label", `${id} (${fmt(level)} L)`));
      const track = el("div", "bar-track");
      const fill = el("div", "bar-fill");
      const scale = Math.max(volumes[id], 1e-9);
      fill.style.width = `${Math.min(100, (level / scale) * 100)}%`;
      track.appendChild(fill);
      row.appendChild(track);
      bars.appendChild(row);
    }
    back.disabled = index === 0;
    forward.disabled = index === model.frames.length - 1;
  };
  back.addEventListener("click", () => {
    index = Math.max(0, index - 1);
    draw();
  });
  forward.addEventListener("click", () => {
    index = Math.min(model.frames.length - 1, index + 1);
    draw();
  });
  draw();
}
