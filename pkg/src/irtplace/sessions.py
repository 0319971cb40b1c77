"""Placement-test sessions: build the form, serve questions, score
answers 0/1, estimate ability at completion, and record the outcome in
the learner profile.

A session is a serial state machine; the engine serializes mutations
per session so concurrent submitters cannot double-answer a question.
Every transition is appended to a line-delimited event log (one JSON
object per line) from which an interrupted session can be resumed.
"""

from __future__ import annotations

import json
import random
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from .kernel import (
    AbilityEstimate,
    EstimationConfig,
    EstimationStatus,
    Response,
    estimate_ability,
    item_information,
)
from .model import CompetenceDefinition, CompetencyRecord, ItemDefinition
from .repository import Repository


class SelectionMode(str, Enum):
    """How the test form is assembled.

    FIXED_BY_IMPORTANCE picks the n most important linked questions up
    front and serves them easiest-first.  ADAPTIVE_MAX_INFO re-estimates
    ability after every answer and serves the unused linked question
    with maximum information at the provisional estimate.
    """

    FIXED_BY_IMPORTANCE = "fixed_by_importance"
    ADAPTIVE_MAX_INFO = "adaptive_max_info"


class SessionState(str, Enum):
    IN_PROGRESS = "in_progress"
    COMPLETED = "completed"


class SessionStateError(RuntimeError):
    """An operation that the session's current state does not allow."""


class UnknownSessionError(KeyError):
    pass


class UnknownReferenceError(KeyError):
    pass


class InsufficientItemsError(ValueError):
    pass


@dataclass(frozen=True)
class ScoredAnswer:
    item_id: str
    choice_id: str
    u: int


@dataclass(frozen=True)
class ElementScore:
    """Descriptive per-element breakdown: how many of the element's
    questions were answered and how many correctly."""

    element_id: str
    answered: int
    correct: int

    @property
    def fraction_correct(self) -> float:
        return self.correct / self.answered if self.answered else 0.0


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    kind: str
    at: datetime
    payload: dict


@dataclass
class TestSession:
    id: str
    learner_ref: str
    competence_ref: str
    mode: SelectionMode
    total_questions: int
    form: list[str]
    cursor: int = 0
    answers: list[ScoredAnswer] = field(default_factory=list)
    state: SessionState = SessionState.IN_PROGRESS
    result: AbilityEstimate | None = None
    element_scores: list[ElementScore] | None = None
    choice_orders: dict[str, tuple[str, ...]] = field(default_factory=dict)

    @property
    def current_item_id(self) -> str | None:
        if self.state is SessionState.COMPLETED or self.cursor >= len(self.form):
            return None
        return self.form[self.cursor]


def build_form(
    competence: CompetenceDefinition,
    bank: list[ItemDefinition],
    mode: SelectionMode,
    theta_initial: float = 0.0,
) -> list[ItemDefinition]:
    """Assemble the form for one session.

    FIXED_BY_IMPORTANCE returns all n questions, the highest-importance
    linked ones ordered by ascending difficulty (the test gets harder as
    it goes).  ADAPTIVE_MAX_INFO returns only the opening question, the
    one most informative at theta_initial; the rest are chosen per
    answer.  Ties break on item identifier so selection is deterministic.
    """
    linked = [item for item in bank if item.competence_ref == competence.id]
    n = competence.required_questions
    if len(linked) < n:
        raise InsufficientItemsError(
            f"competence {competence.id}: {len(linked)} linked items, needs {n}"
        )
    if mode is SelectionMode.FIXED_BY_IMPORTANCE:
        chosen = sorted(linked, key=lambda item: (-item.importance, item.id))[:n]
        return sorted(chosen, key=lambda item: (item.scale.b, item.id))
    return [_max_info_item(theta_initial, linked)]


def _max_info_item(
    theta: float, candidates: list[ItemDefinition]
) -> ItemDefinition:
    # ties break toward the lexicographically smaller identifier
    return min(candidates, key=lambda item: (-item_information(theta, item.scale), item.id))


class AssessmentEngine:
    """Creates, advances, finalizes and resumes placement sessions
    against one repository."""

    def __init__(
        self,
        repository: Repository,
        config: EstimationConfig | None = None,
        event_dir: str | Path | None = None,
    ):
        self.repository = repository
        self.config = config or EstimationConfig()
        self.event_dir = Path(event_dir) if event_dir is not None else None
        if self.event_dir is not None:
            self.event_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, TestSession] = {}
        self._events: dict[str, list[SessionEvent]] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        # profiles are shared across sessions; appends must not interleave
        self._profile_lock = threading.Lock()

    # -- bookkeeping --------------------------------------------------

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            if session_id not in self._locks:
                self._locks[session_id] = threading.Lock()
            return self._locks[session_id]

    def _emit(self, session: TestSession, kind: str, payload: dict) -> None:
        events = self._events.setdefault(session.id, [])
        event = SessionEvent(
            seq=len(events), kind=kind, at=datetime.now(timezone.utc), payload=payload
        )
        events.append(event)
        if self.event_dir is not None:
            record = {"seq": event.seq, "kind": event.kind, "at": event.at.isoformat()}
            record.update(event.payload)
            with open(self.event_dir / f"{session.id}.jsonl", "a", encoding="utf-8") as log:
                log.write(json.dumps(record) + "\n")

    def events_for(self, session_id: str) -> list[SessionEvent]:
        return list(self._events.get(session_id, []))

    def _get_item(self, item_id: str) -> ItemDefinition:
        item = self.repository.item_by_id(item_id)
        if item is None:
            raise UnknownReferenceError(f"unknown item {item_id}")
        return item

    # -- lifecycle ----------------------------------------------------

    def create_session(
        self,
        learner_ref: str,
        competence_ref: str,
        mode: SelectionMode = SelectionMode.FIXED_BY_IMPORTANCE,
        choice_shuffle_seed: int | None = None,
        session_id: str | None = None,
    ) -> TestSession:
        if learner_ref not in self.repository.profiles:
            raise UnknownReferenceError(f"unknown learner {learner_ref}")
        competence = self.repository.competences.get(competence_ref)
        if competence is None:
            raise UnknownReferenceError(f"unknown competence {competence_ref}")
        form_items = build_form(
            competence, self.repository.items, mode, self.config.theta_initial
        )
        session = TestSession(
            id=session_id or uuid.uuid4().hex,
            learner_ref=learner_ref,
            competence_ref=competence_ref,
            mode=mode,
            total_questions=competence.required_questions,
            form=[item.id for item in form_items],
        )
        if choice_shuffle_seed is not None:
            rng = random.Random(choice_shuffle_seed)
            for item in self.repository.items_for(competence_ref):
                order = list(item.choice_ids())
                rng.shuffle(order)
                session.choice_orders[item.id] = tuple(order)
        with self._registry_lock:
            self._sessions[session.id] = session
        self._emit(
            session,
            "created",
            {
                "session": session.id,
                "learner": learner_ref,
                "competence": competence_ref,
                "mode": mode.value,
                "total_questions": session.total_questions,
                "form": list(session.form),
                "choice_shuffle_seed": choice_shuffle_seed,
            },
        )
        self._emit(session, "question_served", {"item": session.form[0]})
        return session

    def get_session(self, session_id: str) -> TestSession:
        session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSessionError(f"unknown session {session_id}")
        return session

    def current_item(self, session: TestSession) -> ItemDefinition:
        item_id = session.current_item_id
        if item_id is None:
            raise SessionStateError(f"session {session.id} has no pending question")
        return self._get_item(item_id)

    def choice_order(self, session: TestSession, item: ItemDefinition) -> list[str]:
        order = session.choice_orders.get(item.id)
        return list(order) if order is not None else item.choice_ids()

    def submit_answer(self, session_id: str, item_id: str, choice_id: str) -> TestSession:
        """Score one answer and advance the session.

        The answer must target the currently served question of an
        in-progress session; the choice must be one of the question's
        options.  Scoring assigns u = 1 when the choice is the correct
        one and u = 0 otherwise.  On the last question the session is
        finalized: ability estimated, profile record appended.
        """
        with self._lock_for(session_id):
            session = self.resume_session(session_id)
            if session.state is SessionState.COMPLETED:
                raise SessionStateError(f"session {session.id} is already completed")
            expected = session.current_item_id
            if item_id != expected:
                raise SessionStateError(
                    f"session {session.id}: expected answer for {expected}, got {item_id}"
                )
            item = self._get_item(item_id)
            if choice_id not in item.choice_ids():
                raise SessionStateError(
                    f"session {session.id}: {choice_id!r} is not a choice of {item_id}"
                )
            u = 1 if choice_id == item.correct_choice else 0
            session.answers.append(ScoredAnswer(item_id=item_id, choice_id=choice_id, u=u))
            session.cursor += 1
            self._emit(
                session, "answer_scored", {"item": item_id, "choice": choice_id, "u": u}
            )
            if session.cursor >= session.total_questions:
                self._finalize(session)
            else:
                if session.mode is SelectionMode.ADAPTIVE_MAX_INFO:
                    self._append_adaptive_item(session)
                self._emit(session, "question_served", {"item": session.current_item_id})
            return session

    def _responses(self, session: TestSession) -> list[Response]:
        return [
            Response(item=self._get_item(answer.item_id).scale, u=answer.u)
            for answer in session.answers
        ]

    def _provisional_theta(self, session: TestSession) -> float:
        estimate = estimate_ability(self._responses(session), self.config)
        if estimate.status is EstimationStatus.NON_FINITE_MLE:
            return self.config.theta_initial
        return estimate.theta

    def _append_adaptive_item(self, session: TestSession) -> None:
        used = set(session.form)
        candidates = [
            item
            for item in self.repository.items_for(session.competence_ref)
            if item.id not in used
        ]
        if not candidates:
            raise InsufficientItemsError(
                f"session {session.id}: no unused items left for adaptive selection"
            )
        session.form.append(_max_info_item(self._provisional_theta(session), candidates).id)

    def _element_scores(self, session: TestSession) -> list[ElementScore]:
        answered: dict[str, int] = {}
        correct: dict[str, int] = {}
        for answer in session.answers:
            element = self._get_item(answer.item_id).element_ref
            answered[element] = answered.get(element, 0) + 1
            correct[element] = correct.get(element, 0) + answer.u
        competence = self.repository.competences[session.competence_ref]
        ordered = [e.id for e in competence.elements if e.id in answered]
        ordered += [e for e in answered if e not in ordered]
        return [
            ElementScore(element_id=e, answered=answered[e], correct=correct[e]) for e in ordered
        ]

    def _finalize(self, session: TestSession) -> None:
        estimate = estimate_ability(self._responses(session), self.config)
        session.result = estimate
        session.element_scores = self._element_scores(session)
        session.state = SessionState.COMPLETED
        profile = self.repository.profiles[session.learner_ref]
        with self._profile_lock:
            profile.add_record(
                CompetencyRecord(
                    competence_ref=session.competence_ref,
                    theta=estimate.theta,
                    standard_error=estimate.standard_error,
                    status=estimate.status,
                    items=len(session.answers),
                    timestamp=datetime.now(timezone.utc),
                )
            )
        self._emit(
            session,
            "estimated",
            {
                "theta": estimate.theta,
                "standard_error": estimate.standard_error,
                "status": estimate.status.value,
                "iterations": len(estimate.trace),
                "per_element": [
                    {"element": s.element_id, "answered": s.answered, "correct": s.correct}
                    for s in session.element_scores
                ],
            },
        )

    def result(self, session_id: str) -> tuple[AbilityEstimate, list[ElementScore]]:
        session = self.resume_session(session_id)
        if session.state is not SessionState.COMPLETED or session.result is None:
            raise SessionStateError(f"session {session_id} is not completed")
        return session.result, session.element_scores or []

    # -- resume -------------------------------------------------------

    def resume_session(self, session_id: str) -> TestSession:
        """Return the live session, or rebuild it by replaying its event log.

        Replay reproduces the exact state-machine position; a completed
        session's estimate is recomputed (deterministically) without
        appending another profile record.
        """
        with self._registry_lock:
            if session_id in self._sessions:
                return self._sessions[session_id]
        if self.event_dir is None:
            raise UnknownSessionError(f"unknown session {session_id}")
        log_path = self.event_dir / f"{session_id}.jsonl"
        if not log_path.exists():
            raise UnknownSessionError(f"unknown session {session_id}")
        session = self._replay(log_path)
        with self._registry_lock:
            self._sessions[session.id] = session
        return session

    def _replay(self, log_path: Path) -> TestSession:
        session: TestSession | None = None
        events: list[SessionEvent] = []
        with open(log_path, encoding="utf-8") as log:
            for line in log:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                kind = record["kind"]
                events.append(
                    SessionEvent(
                        seq=record["seq"],
                        kind=kind,
                        at=datetime.fromisoformat(record["at"]),
                        payload={
                            k: v for k, v in record.items() if k not in ("seq", "kind", "at")
                        },
                    )
                )
                if kind == "created":
                    session = TestSession(
                        id=record["session"],
                        learner_ref=record["learner"],
                        competence_ref=record["competence"],
                        mode=SelectionMode(record["mode"]),
                        total_questions=record["total_questions"],
                        form=list(record["form"]),
                    )
                    seed = record.get("choice_shuffle_seed")
                    if seed is not None:
                        rng = random.Random(seed)
                        for item in self.repository.items_for(session.competence_ref):
                            order = list(item.choice_ids())
                            rng.shuffle(order)
                            session.choice_orders[item.id] = tuple(order)
                elif session is None:
                    raise ValueError(f"{log_path}: event before 'created'")
                elif kind == "answer_scored":
                    session.answers.append(
                        ScoredAnswer(
                            item_id=record["item"],
                            choice_id=record["choice"],
                            u=record["u"],
                        )
                    )
                    session.cursor += 1
                elif kind == "question_served":
                    if record["item"] not in session.form:
                        session.form.append(record["item"])
        if session is None:
            raise ValueError(f"{log_path}: no 'created' event")
        if session.cursor >= session.total_questions:
            # Recompute the deterministic estimate; the profile record was
            # appended when the session originally completed.
            session.result = estimate_ability(self._responses(session), self.config)
            session.element_scores = self._element_scores(session)
            session.state = SessionState.COMPLETED
        self._events[session.id] = events
        return session
