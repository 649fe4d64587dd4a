// Comparison inspector: paste an environment and a variation, see the full
// comparison tree with failing rows and their reasons highlighted.

import type { ServiceApi } from "../api.js";
import { flattenComparison } from "../inspector.js";
import type { ComparisonDoc, EnvDoc, VariationDoc } from "../types.js";
import { clear, el, parseJsonArea } from "./dom.js";

export function renderInspector(root: HTMLElement, api: ServiceApi): void {
  const container = el("div", "inspector");
  const envArea = el("textarea");
  envArea.placeholder = "environment document";
  const variationArea = el("textarea");
  variationArea.placeholder = "variation document";
  const go = el("button", "primary", "Compare");
  const output = el("div", "output");
  container.append(envArea, variationArea, go, output);
  root.appendChild(container);

  go.addEventListener("click", () => {
    clear(output);
    void api
      .compare(parseJsonArea(envArea) as EnvDoc, parseJsonArea(variationArea) as VariationDoc)
      .then((comparison) => {
        output.appendChild(
          el("p", comparison.match.satisfied ? "verdict pass" : "verdict fail",
            comparison.match.satisfied ? "environment satisfies the variation" : "environment misses the variation"),
        );
        for (const [index, witnesses] of Object.entries(comparison.match.failure_witness)) {
          for (const witness of witnesses) {
            output.appendChild(el("h4", "", `element[${index}] vs ${witness.candidate}`));
            output.appendChild(renderTree(witness.comparison));
          }
        }
        if (comparison.match.satisfied) {
          output.appendChild(el("pre", "", JSON.stringify(comparison.match.assignment, null, 2)));
        }
      })
      .catch((error) => output.appendChild(el("div", "banner error", String(error))));
  });
}

export function renderTree(comparison: ComparisonDoc): HTMLElement {
  const list = el("ul", "tree");
  for (const row of flattenComparison(comparison)) {
    const item = el(
      "li",
      row.equal ? "row pass" : "row fail",
      `${row.label}: ${row.summary}${row.equal ? "" : "  ✗"}`,
    );
    item.style.paddingLeft = `${row.depth}em`;
    for (const reason of row.reasons) {
      item.appendChild(el("div", "reason", reason));
    }
    list.appendChild(item);
  }
  return list;
}
