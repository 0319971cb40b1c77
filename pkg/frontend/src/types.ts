// Wire types of the placement-test API. The server never sends the
// correct choice or per-question correctness; these types are the
// whole vocabulary the UI has.

export interface ChoicePayload {
  choiceId: string;
  text: string;
}

export interface QuestionPayload {
  itemId: string;
  body: string;
  choices: ChoicePayload[];
  index: number;
  total: number;
}

export interface SessionCreated {
  sessionId: string;
  totalQuestions: number;
  firstQuestion: QuestionPayload;
}

export interface AnswerAccepted {
  answered: number;
  totalQuestions: number;
  nextQuestion?: QuestionPayload;
  completed?: boolean;
}

export interface SessionStatePayload {
  sessionId: string;
  learnerRef: string;
  competenceRef: string;
  totalQuestions: number;
  answered: number;
  state: "in_progress" | "completed";
  currentQuestion?: QuestionPayload;
  completed?: boolean;
}

export interface ElementScorePayload {
  elementId: string;
  answered: number;
  correct: number;
  fractionCorrect: number;
}

export interface ResultPayload {
  theta: number;
  standardError: number | null;
  status: "converged" | "max_iterations_reached" | "non_finite_mle";
  perElement: ElementScorePayload[];
  iterations: number;
}

export interface CompetenceSummary {
  id: string;
  title: string;
  description: string;
  prerequisites: string[];
  requiredQuestions: number;
  choicesPerQuestion: number;
}

export interface ApiErrorPayload {
  code: "not_found" | "invalid_state" | "validation_failed" | "internal";
  message: string;
  detail?: unknown;
}
