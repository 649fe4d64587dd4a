// Comparison inspector model: flattens a comparison tree into rows with
// depth, pass/fail and human-readable reason labels (LessEqual(6, 4) style).

import type { ComparisonDoc, ReasonDoc, ValueDoc, VariationDoc } from "./types.js";

export interface InspectorRow {
  depth: number;
  label: string;
  equal: boolean;
  summary: string;
  reasons: string[];
}

export function reasonLabel(reason: ReasonDoc): string {
  const args = reason.predicate.args.map(renderArg).join(", ");
  return `${reason.kind}: ${reason.predicate.op}(${args}) expected ${reason.expected}, got ${reason.actual}`;
}

function renderArg(arg: unknown): string {
  if (typeof arg === "number") return fmtNumber(arg);
  if (Array.isArray(arg)) return `[${arg.map(renderArg).join(", ")}]`;
  return String(arg);
}

function fmtNumber(x: number): string {
  return (Math.round(x * 1e9) / 1e9).toString();
}

export function describeDoc(doc: VariationDoc | ValueDoc): string {
  switch (doc.type) {
    case "Number":
    case "Integer":
    case "Boolean":
      return String(doc["value"]);
    case "Concept":
    case "InstanceRef":
      return String(doc["id"]);
    case "Interval": {
      const lo = doc["lower_closed"] ? "[" : "(";
      const hi = doc["upper_closed"] ? "]" : ")";
      return `${lo}${fmtNumber(Number(doc["lower"]))}, ${fmtNumber(Number(doc["upper"]))}${hi}`;
    }
    case "Fixed":
      return `fixed ${describeDoc(doc["value"] as ValueDoc)}`;
    case "Union":
      return `union of ${(doc["members"] as VariationDoc[]).map(describeDoc).join(" | ")}`;
    case "Intersection":
      return `intersection of ${(doc["members"] as VariationDoc[]).map(describeDoc).join(" & ")}`;
    case "Whole":
      return "any value";
    case "Empty":
      return "no value";
    case "ConceptVariation":
      return `${doc["base"]}${doc["include_subconcepts"] ? " (and subconcepts)" : ""}`;
    case "Location":
      return `at ${doc["reference"]}`;
    case "Pose":
      return "pose";
    case "Instance":
      return `instance ${doc["id"]}`;
    case "InstanceRangePropertiesVariation": {
      const concept = describeDoc(doc["concept"] as VariationDoc);
      const props = Object.keys(doc["properties"] as Record<string, unknown>);
      return `${concept} with ${props.join(", ")}`;
    }
    case "MapRangeInstanceSubset":
      return `${(doc["elements"] as unknown[]).length} element variation(s)`;
    case "EnvironmentDataRangeEntityVariation":
      return "environment goal";
    default:
      return doc.type;
  }
}

export function flattenComparison(cmp: ComparisonDoc, label = "comparison", depth = 0): InspectorRow[] {
  const rows: InspectorRow[] = [
    {
      depth,
      label,
      equal: cmp.equal,
      summary: `${describeDoc(cmp.value)} vs ${describeDoc(cmp.target)}`,
      reasons: cmp.reasons.map(reasonLabel),
    },
  ];
  for (const sub of cmp.sub_comparisons) {
    rows.push(...flattenComparison(sub.comparison, sub.label, depth + 1));
  }
  return rows;
}

/** Variation tree rows for the wizard completion view. */
export function flattenVariation(doc: VariationDoc, label = "goal", depth = 0): InspectorRow[] {
  const rows: InspectorRow[] = [
    { depth, label: `${label}: ${doc.type}`, equal: true, summary: describeDoc(doc), reasons: [] },
  ];
  if (doc.type === "EnvironmentDataRangeEntityVariation") {
    rows.push(...flattenVariation(doc["entities"] as VariationDoc, "entities", depth + 1));
  } else if (doc.type === "MapRangeInstanceSubset") {
    (doc["elements"] as VariationDoc[]).forEach((element, i) => {
      rows.push(...flattenVariation(element, `element[${i}]`, depth + 1));
    });
  } else if (doc.type === "InstanceRangePropertiesVariation") {
    rows.push(...flattenVariation(doc["concept"] as VariationDoc, "concept", depth + 1));
    const properties = doc["properties"] as Record<string, VariationDoc>;
    for (const [name, pv] of Object.entries(properties)) {
      rows.push(...flattenVariation(pv, name, depth + 1));
    }
  } else if (doc.type === "Union" || doc.type === "Intersection") {
    (doc["members"] as VariationDoc[]).forEach((member, i) => {
      rows.push(...flattenVariation(member, `member[${i}]`, depth + 1));
    });
  }
  return rows;
}
