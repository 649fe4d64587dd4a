// Wizard state machine. The service session is forward-only, so editing an
// earlier answer replays a fresh session with the kept prefix and re-submits
// from there. All choices come from the service; none are invented here.

import { ServiceApi, StaleVersionError } from "./api.js";
import type { Answer, EnvDoc, QuestionDoc, VariationDoc } from "./types.js";

export interface WizardState {
  phase: "idle" | "asking" | "completed" | "error";
  sessionId: string | null;
  version: number;
  question: QuestionDoc | null;
  history: { question: QuestionDoc; answer: Answer }[];
  bound: number;
  result: VariationDoc | null;
  /** Set when an answer raced another client; the session was refetched. */
  staleNotice: string | null;
  errorMessage: string | null;
}

export function initialState(): WizardState {
  return {
    phase: "idle",
    sessionId: null,
    version: 0,
    question: null,
    history: [],
    bound: 0,
    result: null,
    staleNotice: null,
    errorMessage: null,
  };
}

export class WizardStore {
  private state: WizardState = initialState();
  private listeners: (() => void)[] = [];
  private before: EnvDoc | null = null;
  private after: EnvDoc | null = null;

  constructor(private readonly api: ServiceApi) {}

  get(): WizardState {
    return this.state;
  }

  subscribe(listener: () => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private set(partial: Partial<WizardState>): void {
    this.state = { ...this.state, ...partial };
    for (const listener of this.listeners) listener();
  }

  questionCount(): number {
    return this.state.history.length;
  }

  async start(before: EnvDoc, after: EnvDoc): Promise<void> {
    this.before = before;
    this.after = after;
    try {
      const created = await this.api.createSession(before, after);
      const transcript = await this.api.transcript(created.session);
      this.set({
        phase: "asking",
        sessionId: created.session,
        version: created.version,
        question: created.question,
        history: [],
        bound: transcript.bound,
        result: null,
        staleNotice: null,
        errorMessage: null,
      });
    } catch (error) {
      this.set({ phase: "error", errorMessage: String(error) });
    }
  }

  async answer(value: Answer): Promise<void> {
    const { sessionId, version, question } = this.state;
    if (!sessionId || !question) throw new Error("no pending question");
    try {
      const accepted = await this.api.postAnswer(sessionId, version, value);
      const history = [...this.state.history, { question, answer: value }];
      if (accepted.completed) {
        this.set({
          phase: "completed",
          version: accepted.version,
          question: null,
          history,
          result: accepted.completed,
          staleNotice: null,
        });
      } else {
        this.set({
          phase: "asking",
          version: accepted.version,
          question: accepted.question ?? null,
          history,
          staleNotice: null,
        });
      }
    } catch (error) {
      if (error instanceof StaleVersionError) {
        // Someone else advanced this session: refetch and let the user retry.
        const transcript = await this.api.transcript(sessionId);
        this.set({
          version: transcript.version,
          question: transcript.pending,
          staleNotice: "This session moved on elsewhere; state refreshed, please retry.",
        });
        return;
      }
      this.set({ errorMessage: String(error) });
    }
  }

  /** Re-submit from an edited point: new session, kept prefix, new answer. */
  async editAnswer(index: number, value: Answer): Promise<void> {
    if (!this.before || !this.after) throw new Error("wizard was never started");
    const prefix = this.state.history.slice(0, index).map((h) => h.answer);
    await this.start(this.before, this.after);
    for (const keep of prefix) {
      await this.answer(keep);
    }
    await this.answer(value);
  }

  async exportDocument(): Promise<string> {
    if (!this.state.sessionId || this.state.phase !== "completed") {
      throw new Error("no completed variation to export");
    }
    return this.api.variationDocument(this.state.sessionId);
  }
}
