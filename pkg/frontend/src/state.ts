// Session state machine for the single-page test flow.
//
// Phases move start -> question -> (submitting -> question)* ->
// submitting -> done, and any phase may fall to error (with retry).
// The machine never sees correct answers (the API does not send them)
// and never recomputes scores: the result screen renders exactly what
// GET /result returned.  The answered count always reflects what the
// server accepted, so a 409 resync snaps the UI back to server truth.

import { ApiError } from "./api.js";
import type {
  AnswerAccepted,
  CompetenceSummary,
  QuestionPayload,
  ResultPayload,
  SessionCreated,
  SessionStatePayload,
} from "./types.js";

/** What the machine needs from the backend; ApiClient satisfies it. */
export interface PlacementApi {
  listCompetences(): Promise<CompetenceSummary[]>;
  createSession(learnerRef: string, competenceRef: string, mode?: string): Promise<SessionCreated>;
  submitAnswer(sessionId: string, itemId: string, choiceId: string): Promise<AnswerAccepted>;
  sessionState(sessionId: string): Promise<SessionStatePayload>;
  result(sessionId: string): Promise<ResultPayload>;
}

export type Phase = "start" | "question" | "submitting" | "done" | "error";

export interface UiState {
  phase: Phase;
  busy: boolean;
  competences: CompetenceSummary[];
  learnerRef: string;
  competenceRef: string;
  sessionId: string | null;
  totalQuestions: number;
  answered: number;
  question: QuestionPayload | null;
  selectedChoice: string | null;
  result: ResultPayload | null;
  errorMessage: string | null;
}

export type Listener = (state: UiState) => void;

const initialState = (): UiState => ({
  phase: "start",
  busy: false,
  competences: [],
  learnerRef: "",
  competenceRef: "",
  sessionId: null,
  totalQuestions: 0,
  answered: 0,
  question: null,
  selectedChoice: null,
  result: null,
  errorMessage: null,
});

export class PlacementTestUi {
  private state: UiState = initialState();
  private listeners: Listener[] = [];
  private inFlight = false;
  private recover: (() => Promise<void>) | null = null;

  constructor(private readonly api: PlacementApi) {}

  getState(): UiState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private update(patch: Partial<UiState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  private fail(error: unknown, recover: (() => Promise<void>) | null): void {
    const message =
      error instanceof ApiError
        ? error.message
        : error instanceof Error
          ? error.message
          : String(error);
    this.recover = recover;
    this.update({ phase: "error", busy: false, errorMessage: message });
  }

  // -- start screen --------------------------------------------------

  async loadCompetences(): Promise<void> {
    try {
      const competences = await this.api.listCompetences();
      this.update({ competences });
    } catch (error) {
      this.fail(error, () => this.loadCompetences());
    }
  }

  /** Field edits update silently (the input already shows the text);
   * listeners fire only when the start button's enablement flips. */
  setLearner(learnerRef: string): void {
    this.updateField({ learnerRef });
  }

  setCompetence(competenceRef: string): void {
    this.updateField({ competenceRef });
  }

  private updateField(patch: Partial<UiState>): void {
    const could = this.canStart();
    this.state = { ...this.state, ...patch };
    if (this.canStart() !== could) {
      for (const listener of this.listeners) listener(this.state);
    }
  }

  canStart(): boolean {
    return (
      this.state.competences.length > 0 &&
      this.state.learnerRef.trim() !== "" &&
      this.state.competenceRef !== "" &&
      !this.state.busy
    );
  }

  async start(): Promise<void> {
    if (this.state.phase !== "start" || !this.canStart()) return;
    this.update({ busy: true, errorMessage: null });
    try {
      const created = await this.api.createSession(
        this.state.learnerRef.trim(),
        this.state.competenceRef,
      );
      this.update({
        phase: "question",
        busy: false,
        sessionId: created.sessionId,
        totalQuestions: created.totalQuestions,
        answered: 0,
        question: created.firstQuestion,
        selectedChoice: null,
      });
    } catch (error) {
      this.fail(error, () => this.restart());
    }
  }

  private async restart(): Promise<void> {
    this.update({ phase: "start", busy: false, errorMessage: null });
  }

  // -- question flow -------------------------------------------------

  select(choiceId: string): void {
    if (this.state.phase !== "question" || !this.state.question) return;
    if (!this.state.question.choices.some((c) => c.choiceId === choiceId)) return;
    this.update({ selectedChoice: choiceId });
  }

  /** Post the selected answer; no-ops unless exactly one submit is
   * possible (a second call while submitting is swallowed). */
  async submit(): Promise<void> {
    const { phase, question, selectedChoice, sessionId } = this.state;
    if (phase !== "question" || !question || !selectedChoice || !sessionId || this.inFlight) {
      return;
    }
    this.inFlight = true;
    this.update({ phase: "submitting" });
    try {
      const accepted = await this.api.submitAnswer(sessionId, question.itemId, selectedChoice);
      if (accepted.completed) {
        await this.finish();
      } else if (accepted.nextQuestion) {
        this.update({
          phase: "question",
          answered: accepted.answered,
          question: accepted.nextQuestion,
          selectedChoice: null,
        });
      } else {
        await this.resync();
      }
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        // stale position: the server is the truth, refetch it
        await this.resync();
      } else {
        this.fail(error, () => this.resync());
      }
    } finally {
      this.inFlight = false;
    }
  }

  /** Refetch the session and snap the UI to the server's position. */
  async resync(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId) {
      await this.restart();
      return;
    }
    try {
      const remote = await this.api.sessionState(sessionId);
      if (remote.state === "completed") {
        await this.finish();
        return;
      }
      this.update({
        phase: "question",
        answered: remote.answered,
        totalQuestions: remote.totalQuestions,
        question: remote.currentQuestion ?? null,
        selectedChoice: null,
        errorMessage: null,
      });
    } catch (error) {
      this.fail(error, () => this.resync());
    }
  }

  private async finish(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId) return;
    const result = await this.api.result(sessionId);
    this.update({
      phase: "done",
      answered: this.state.totalQuestions,
      result,
      question: null,
      selectedChoice: null,
    });
  }

  // -- error screen ----------------------------------------------------

  async retry(): Promise<void> {
    if (this.state.phase !== "error") return;
    const recover = this.recover ?? (() => this.restart());
    this.recover = null;
    this.update({ errorMessage: null });
    await recover();
  }
}
