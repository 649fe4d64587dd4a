// Wire types for the /v1 service documents. The UI consumes these verbatim
// and never invents choices or goal logic of its own.

export type Answer = boolean | number | string | ValueDoc;

export interface QuestionOption {
  id: string;
  label: string;
}

export interface QuestionDoc {
  id: string;
  kind:
    | "SelectRelevantEntities"
    | "SelectRelevantProperties"
    | "SelectVariationKind"
    | "ProvideParameters"
    | "GeneralizeConcept";
  prompt: string;
  options: QuestionOption[];
  default: Answer | null;
  entity: string | null;
  property: string | null;
  variation_kind: string | null;
  parameter: string | null;
  free_form: "number" | "value" | null;
}

export interface ValueDoc {
  type: string;
  [key: string]: unknown;
}

export interface VariationDoc {
  type: string;
  [key: string]: unknown;
}

export interface SessionCreated {
  session: string;
  version: number;
  question: QuestionDoc;
}

export interface AnswerAccepted {
  session: string;
  version: number;
  question?: QuestionDoc;
  completed?: VariationDoc;
}

export interface TranscriptDoc {
  id: string;
  version: number;
  complete: boolean;
  question_count: number;
  bound: number;
  pending: QuestionDoc | null;
  result: VariationDoc | null;
}

export interface PredicateDoc {
  op: string;
  args: unknown[];
}

export interface ReasonDoc {
  kind: string;
  predicate: PredicateDoc;
  expected: boolean;
  actual: boolean;
}

export interface ComparisonDoc {
  equal: boolean;
  target: VariationDoc | ValueDoc;
  value: ValueDoc;
  reasons: ReasonDoc[];
  sub_comparisons: { label: string; comparison: ComparisonDoc }[];
}

export interface MatchResultDoc {
  satisfied: boolean;
  assignment: Record<string, string>;
  failure_witness: Record<string, { candidate: string; comparison: ComparisonDoc }[]>;
}

export interface EnvironmentComparisonDoc {
  match: MatchResultDoc;
  differences: Record<string, Record<string, unknown[]>>;
}

export interface SkillInstanceDoc {
  template: string;
  bindings: Record<string, string | number | boolean>;
  duration: number;
}

export interface PlanDoc {
  steps: { alternatives: { skill: SkillInstanceDoc; precondition_plan: PlanDoc | null }[] }[];
  step_count: number;
}

export interface PlanResultDoc {
  satisfiable: boolean;
  assignment: Record<string, string>;
  total_cost: number | null;
  plan: PlanDoc;
}

export interface TraceEntryDoc {
  skill: SkillInstanceDoc;
  pre_digest: string;
  post_digest: string;
  duration: number;
  preconditions_passed: boolean;
  levels?: Record<string, number>;
}

export interface TraceDoc {
  entries: TraceEntryDoc[];
  total_duration: number;
  final_env: { instances: unknown[] };
  verdict: { status: "Satisfied" | "NotSatisfied"; comparison?: EnvironmentComparisonDoc } | null;
  failure: { step_index: number } | null;
  initial_levels?: Record<string, number>;
}

export interface ErrorDoc {
  code: string;
  path: string;
  message: string;
}

export interface EnvDoc {
  instances: { id: string; concept: string; values: Record<string, ValueDoc> }[];
}
