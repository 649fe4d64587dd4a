// In-memory stand-in for the /v1 service with the same session semantics:
// scripted questions, version counter, stale rejection. Used by unit tests;
// the e2e test talks to the real service instead.

import { ServiceApi, ServiceError, StaleVersionError } from "../src/api.js";
import type {
  Answer,
  AnswerAccepted,
  EnvDoc,
  QuestionDoc,
  SessionCreated,
  TranscriptDoc,
  VariationDoc,
} from "../src/types.js";

export function question(id: string, prompt: string, overrides: Partial<QuestionDoc> = {}): QuestionDoc {
  return {
    id,
    kind: "SelectRelevantEntities",
    prompt,
    options: [
      { id: "yes", label: "yes" },
      { id: "no", label: "no" },
    ],
    default: true,
    entity: null,
    property: null,
    variation_kind: null,
    parameter: null,
    free_form: null,
    ...overrides,
  };
}

interface FakeSession {
  answers: Answer[];
  version: number;
}

export class FakeService implements ServiceApi {
  sessions = new Map<string, FakeSession>();
  private counter = 0;

  constructor(
    readonly script: QuestionDoc[],
    readonly result: VariationDoc,
    readonly bound = 20,
  ) {}

  async createSession(_before: EnvDoc, _after: EnvDoc): Promise<SessionCreated> {
    this.counter += 1;
    const id = `s${this.counter}`;
    this.sessions.set(id, { answers: [], version: 1 });
    return { session: id, version: 1, question: this.script[0] };
  }

  async postAnswer(sessionId: string, version: number, answer: Answer): Promise<AnswerAccepted> {
    const session = this.session(sessionId);
    if (session.version !== version) {
      throw new StaleVersionError(409, {
        code: "stale_version",
        path: "$",
        message: `expected version ${session.version}, got ${version}`,
      });
    }
    session.answers.push(answer);
    session.version += 1;
    if (session.answers.length >= this.script.length) {
      return { session: sessionId, version: session.version, completed: this.result };
    }
    return {
      session: sessionId,
      version: session.version,
      question: this.script[session.answers.length],
    };
  }

  async transcript(sessionId: string): Promise<TranscriptDoc> {
    const session = this.session(sessionId);
    const done = session.answers.length >= this.script.length;
    return {
      id: sessionId,
      version: session.version,
      complete: done,
      question_count: session.answers.length,
      bound: this.bound,
      pending: done ? null : this.script[session.answers.length],
      result: done ? this.result : null,
    };
  }

  async variationDocument(sessionId: string): Promise<string> {
    const session = this.session(sessionId);
    if (session.answers.length < this.script.length) {
      throw new ServiceError(409, { code: "incomplete", path: "$", message: "not done" });
    }
    return JSON.stringify(this.result, null, 2) + "\n";
  }

  compare(): never {
    throw new Error("not part of the fake");
  }

  plan(): never {
    throw new Error("not part of the fake");
  }

  execute(): never {
    throw new Error("not part of the fake");
  }

  private session(id: string): FakeSession {
    const session = this.sessions.get(id);
    if (!session) {
      throw new ServiceError(404, { code: "not_found", path: "$", message: id });
    }
    return session;
  }
}
