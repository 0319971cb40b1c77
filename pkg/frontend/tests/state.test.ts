// State machine tests against a scripted fake backend.

import { beforeEach, describe, expect, it } from "vitest";

import { ApiError } from "../src/api.js";
import { PlacementTestUi, type Phase, type PlacementApi } from "../src/state.js";
import type {
  AnswerAccepted,
  CompetenceSummary,
  QuestionPayload,
  ResultPayload,
  SessionCreated,
  SessionStatePayload,
} from "../src/types.js";

const COMPETENCES: CompetenceSummary[] = [
  {
    id: "sql",
    title: "SQL",
    description: "",
    prerequisites: ["relational-algebra"],
    requiredQuestions: 3,
    choicesPerQuestion: 2,
  },
];

function question(index: number, total = 3): QuestionPayload {
  return {
    itemId: `q${index}`,
    body: `question ${index}?`,
    choices: [
      { choiceId: `q${index}-a`, text: "first" },
      { choiceId: `q${index}-b`, text: "second" },
    ],
    index,
    total,
  };
}

const RESULT: ResultPayload = {
  theta: 1.4881638614125479,
  standardError: 0.4739849403889764,
  status: "converged",
  perElement: [{ elementId: "e1", answered: 3, correct: 2, fractionCorrect: 2 / 3 }],
  iterations: 5,
};

/** Minimal scripted backend: three questions, then completion. */
class FakeApi implements PlacementApi {
  posts = 0;
  answered = 0;
  failNextSubmitWith: ApiError | null = null;
  submitDelay: Promise<void> | null = null;

  async listCompetences(): Promise<CompetenceSummary[]> {
    return COMPETENCES;
  }

  async createSession(learnerRef: string): Promise<SessionCreated> {
    if (learnerRef === "ghost") {
      throw new ApiError(404, { code: "not_found", message: "unknown learner ghost" });
    }
    return { sessionId: "s1", totalQuestions: 3, firstQuestion: question(1) };
  }

  async submitAnswer(): Promise<AnswerAccepted> {
    if (this.submitDelay) await this.submitDelay;
    if (this.failNextSubmitWith) {
      const failure = this.failNextSubmitWith;
      this.failNextSubmitWith = null;
      throw failure;
    }
    this.posts += 1;
    this.answered += 1;
    if (this.answered >= 3) {
      return { answered: 3, totalQuestions: 3, completed: true };
    }
    return {
      answered: this.answered,
      totalQuestions: 3,
      nextQuestion: question(this.answered + 1),
    };
  }

  async sessionState(): Promise<SessionStatePayload> {
    const completed = this.answered >= 3;
    return {
      sessionId: "s1",
      learnerRef: "learner-001",
      competenceRef: "sql",
      totalQuestions: 3,
      answered: this.answered,
      state: completed ? "completed" : "in_progress",
      ...(completed ? { completed: true } : { currentQuestion: question(this.answered + 1) }),
    };
  }

  async result(): Promise<ResultPayload> {
    return RESULT;
  }
}

async function startReady(api: PlacementApi): Promise<PlacementTestUi> {
  const ui = new PlacementTestUi(api);
  await ui.loadCompetences();
  ui.setLearner("learner-001");
  ui.setCompetence("sql");
  return ui;
}

describe("start screen", () => {
  it("cannot start until a learner and competence are chosen", async () => {
    const ui = new PlacementTestUi(new FakeApi());
    await ui.loadCompetences();
    expect(ui.canStart()).toBe(false);
    ui.setLearner("learner-001");
    expect(ui.canStart()).toBe(false);
    ui.setCompetence("sql");
    expect(ui.canStart()).toBe(true);
  });

  it("cannot start on an empty competence list", async () => {
    const api = new FakeApi();
    api.listCompetences = async () => [];
    const ui = new PlacementTestUi(api);
    await ui.loadCompetences();
    ui.setLearner("learner-001");
    ui.setCompetence("sql");
    expect(ui.canStart()).toBe(false);
  });

  it("starting shows the first question with zero answered", async () => {
    const ui = await startReady(new FakeApi());
    await ui.start();
    const state = ui.getState();
    expect(state.phase).toBe("question");
    expect(state.answered).toBe(0);
    expect(state.totalQuestions).toBe(3);
    expect(state.question?.itemId).toBe("q1");
  });

  it("an unknown learner lands in the error phase with the 404 message", async () => {
    const ui = await startReady(new FakeApi());
    ui.setLearner("ghost");
    await ui.start();
    const state = ui.getState();
    expect(state.phase).toBe("error");
    expect(state.errorMessage).toContain("unknown learner");
  });

  it("retry from a failed start returns to the start screen", async () => {
    const ui = await startReady(new FakeApi());
    ui.setLearner("ghost");
    await ui.start();
    await ui.retry();
    expect(ui.getState().phase).toBe("start");
  });
});

describe("question flow", () => {
  it("walks start -> question -> (submitting -> question)* -> submitting -> done", async () => {
    const ui = await startReady(new FakeApi());
    const phases: Phase[] = [ui.getState().phase];
    ui.subscribe((state) => phases.push(state.phase));

    await ui.start();
    for (const choice of ["q1-a", "q2-b", "q3-a"]) {
      ui.select(choice);
      await ui.submit();
    }

    expect(ui.getState().phase).toBe("done");
    const transitions = phases.filter((phase, i) => phases[i - 1] !== phase);
    expect(transitions).toEqual([
      "start",
      "question",
      "submitting",
      "question",
      "submitting",
      "question",
      "submitting",
      "done",
    ]);
  });

  it("keeps exactly one choice selected", async () => {
    const ui = await startReady(new FakeApi());
    await ui.start();
    ui.select("q1-a");
    ui.select("q1-b");
    expect(ui.getState().selectedChoice).toBe("q1-b");
    ui.select("not-a-choice");
    expect(ui.getState().selectedChoice).toBe("q1-b");
  });

  it("ignores submit without a selection", async () => {
    const api = new FakeApi();
    const ui = await startReady(api);
    await ui.start();
    await ui.submit();
    expect(api.posts).toBe(0);
    expect(ui.getState().phase).toBe("question");
  });

  it("suppresses a double submit: one post reaches the backend", async () => {
    const api = new FakeApi();
    let release!: () => void;
    api.submitDelay = new Promise((resolve) => (release = resolve));
    const ui = await startReady(api);
    await ui.start();
    ui.select("q1-a");

    const first = ui.submit();
    const second = ui.submit();
    expect(ui.getState().phase).toBe("submitting");
    release();
    await Promise.all([first, second]);

    expect(api.posts).toBe(1);
    expect(ui.getState().answered).toBe(1);
    expect(ui.getState().question?.itemId).toBe("q2");
  });

  it("progress equals the count the server accepted", async () => {
    const ui = await startReady(new FakeApi());
    await ui.start();
    ui.select("q1-a");
    await ui.submit();
    expect(ui.getState().answered).toBe(1);
    ui.select("q2-a");
    await ui.submit();
    expect(ui.getState().answered).toBe(2);
  });

  it("a 409 resyncs to the server position instead of erroring", async () => {
    const api = new FakeApi();
    const ui = await startReady(api);
    await ui.start();

    // another tab already answered q1
    api.answered = 1;
    api.failNextSubmitWith = new ApiError(409, {
      code: "invalid_state",
      message: "expected answer for q2",
    });
    ui.select("q1-a");
    await ui.submit();

    const state = ui.getState();
    expect(state.phase).toBe("question");
    expect(state.answered).toBe(1);
    expect(state.question?.itemId).toBe("q2");
    expect(state.selectedChoice).toBeNull();
  });

  it("a 409 on an already-completed session lands on the result", async () => {
    const api = new FakeApi();
    const ui = await startReady(api);
    await ui.start();
    api.answered = 3;
    api.failNextSubmitWith = new ApiError(409, {
      code: "invalid_state",
      message: "session is already completed",
    });
    ui.select("q1-a");
    await ui.submit();
    expect(ui.getState().phase).toBe("done");
    expect(ui.getState().result?.theta).toBe(RESULT.theta);
  });

  it("a network failure during submit goes to error and retry resyncs", async () => {
    const api = new FakeApi();
    const ui = await startReady(api);
    await ui.start();
    api.failNextSubmitWith = new ApiError(0, { code: "internal", message: "network failure" });
    ui.select("q1-a");
    await ui.submit();
    expect(ui.getState().phase).toBe("error");

    await ui.retry();
    const state = ui.getState();
    expect(state.phase).toBe("question");
    expect(state.question?.itemId).toBe("q1");
  });
});

describe("result", () => {
  it("renders exactly the payload the server sent, no recomputation", async () => {
    const ui = await startReady(new FakeApi());
    await ui.start();
    for (const choice of ["q1-a", "q2-a", "q3-b"]) {
      ui.select(choice);
      await ui.submit();
    }
    const state = ui.getState();
    expect(state.result).toEqual(RESULT);
    expect(state.answered).toBe(3);
  });
});
