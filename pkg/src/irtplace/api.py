"""HTTP/JSON service for the placement-test session lifecycle.

Routes (JSON bodies, UTF-8):

    POST /api/sessions                    start a session, returns the first question
    GET  /api/sessions/{id}               current state (for client resync)
    POST /api/sessions/{id}/answers       submit one answer, returns next question or completion
    GET  /api/sessions/{id}/result        ability estimate of a completed session
    GET  /api/competences                 list competence definitions
    GET  /api/competences/{id}            one competence definition
    GET  /api/learners/{id}               learner profile with competency records

Errors use one shape {"code", "message", "detail"?} with code/status
pairs not_found/404, invalid_state/409, validation_failed/422,
internal/500.  Question payloads never carry the correct choice, and
answer responses never reveal per-question correctness: this is a
placement test, not a tutor.  No authentication is performed; the
learner reference is trusted input, so deploy behind something that
authenticates if that matters to you.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .kernel import EstimationConfig
from .model import CompetenceDefinition, ItemDefinition, LearnerProfile
from .repository import Repository
from .sessions import (
    AssessmentEngine,
    InsufficientItemsError,
    SelectionMode,
    SessionState,
    SessionStateError,
    TestSession,
    UnknownReferenceError,
    UnknownSessionError,
)


logger = logging.getLogger("irtplace.api")


class CreateSessionRequest(BaseModel):
    learnerRef: str
    competenceRef: str
    mode: str = SelectionMode.FIXED_BY_IMPORTANCE.value
    choiceShuffleSeed: int | None = None


class AnswerRequest(BaseModel):
    itemId: str
    choiceId: str


def _error(status: int, code: str, message: str, detail: dict | None = None) -> JSONResponse:
    body: dict = {"code": code, "message": message}
    if detail:
        body["detail"] = detail
    return JSONResponse(status_code=status, content=body)


def _finite_or_none(value: float) -> float | None:
    return value if math.isfinite(value) else None


def _question_payload(
    engine: AssessmentEngine, session: TestSession, item: ItemDefinition
) -> dict:
    texts = {choice.id: choice.text for choice in item.choices}
    return {
        "itemId": item.id,
        "body": item.body,
        "choices": [
            {"choiceId": choice_id, "text": texts[choice_id]}
            for choice_id in engine.choice_order(session, item)
        ],
        "index": session.cursor + 1,
        "total": session.total_questions,
    }


def _competence_payload(competence: CompetenceDefinition) -> dict:
    return {
        "id": competence.id,
        "title": competence.title,
        "description": competence.description,
        "prerequisites": list(competence.prerequisites),
        "requiredQuestions": competence.required_questions,
        "choicesPerQuestion": competence.choices_per_question,
        "elements": [
            {
                "id": element.id,
                "ability": element.ability.value,
                "kind": element.kind.value,
                "knowledge": [
                    {"label": k.label, "kind": k.kind.value} for k in element.knowledge_items
                ],
                "performance": {
                    "context": element.performance.context.value,
                    "complexity": element.performance.complexity,
                    "autonomy": element.performance.autonomy.value,
                    "scope": element.performance.scope.value,
                    "frequency": element.performance.frequency,
                },
            }
            for element in competence.elements
        ],
    }


def _profile_payload(profile: LearnerProfile) -> dict:
    return {
        "id": profile.id,
        "name": profile.name,
        "affiliation": profile.affiliation,
        "competencyRecords": [
            {
                "competenceRef": record.competence_ref,
                "theta": record.theta,
                "standardError": _finite_or_none(record.standard_error),
                "status": record.status.value,
                "items": record.items,
                "timestamp": record.timestamp.isoformat(),
            }
            for record in profile.records
        ],
    }


def create_app(
    repo_dir: str | Path,
    config: EstimationConfig | None = None,
    event_dir: str | Path | None = None,
    static_dir: str | Path | None = None,
    write_profiles: bool = True,
) -> FastAPI:
    """Build the service over one repository directory.

    The repository is loaded and cross-validated once at startup;
    findings are logged, and the affected operations fail per-request
    (404 for dangling references, 422 when a competence cannot fill its
    test), so run the validate command before deploying.  Profiles are
    written back to the repository's learners directory whenever a
    session completes (disable with write_profiles=False).
    """
    repository = Repository.load(repo_dir)
    for finding in repository.validate().findings:
        logger.warning("repository %s [%s]: %s", finding.severity, finding.code, finding.message)
    engine = AssessmentEngine(repository, config=config, event_dir=event_dir)

    app = FastAPI(title="irtplace", version="0.1.0", docs_url=None, redoc_url=None)
    app.state.engine = engine

    @app.exception_handler(UnknownSessionError)
    @app.exception_handler(UnknownReferenceError)
    async def _not_found(request: Request, exc: Exception):
        return _error(404, "not_found", str(exc.args[0] if exc.args else exc))

    @app.exception_handler(SessionStateError)
    async def _invalid_state(request: Request, exc: Exception):
        return _error(409, "invalid_state", str(exc))

    @app.exception_handler(InsufficientItemsError)
    async def _validation_failed(request: Request, exc: Exception):
        return _error(422, "validation_failed", str(exc))

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request: Request, exc: RequestValidationError):
        return _error(422, "validation_failed", "invalid request body", {"errors": exc.errors()})

    @app.exception_handler(Exception)
    async def _internal(request: Request, exc: Exception):
        return _error(500, "internal", "internal error")

    @app.post("/api/sessions", status_code=201)
    def create_session(body: CreateSessionRequest):
        try:
            mode = SelectionMode(body.mode)
        except ValueError:
            return _error(422, "validation_failed", f"unknown mode {body.mode!r}")
        session = engine.create_session(
            learner_ref=body.learnerRef,
            competence_ref=body.competenceRef,
            mode=mode,
            choice_shuffle_seed=body.choiceShuffleSeed,
        )
        return {
            "sessionId": session.id,
            "totalQuestions": session.total_questions,
            "firstQuestion": _question_payload(engine, session, engine.current_item(session)),
        }

    @app.get("/api/sessions/{session_id}")
    def session_state(session_id: str):
        session = engine.resume_session(session_id)
        payload = {
            "sessionId": session.id,
            "learnerRef": session.learner_ref,
            "competenceRef": session.competence_ref,
            "totalQuestions": session.total_questions,
            "answered": session.cursor,
            "state": session.state.value,
        }
        if session.state is SessionState.IN_PROGRESS:
            payload["currentQuestion"] = _question_payload(
                engine, session, engine.current_item(session)
            )
        else:
            payload["completed"] = True
        return payload

    @app.post("/api/sessions/{session_id}/answers")
    def submit_answer(session_id: str, body: AnswerRequest):
        session = engine.submit_answer(session_id, body.itemId, body.choiceId)
        payload = {
            "answered": session.cursor,
            "totalQuestions": session.total_questions,
        }
        if session.state is SessionState.COMPLETED:
            payload["completed"] = True
            if write_profiles and repository.root is not None:
                repository.save_profile(repository.profiles[session.learner_ref])
        else:
            payload["nextQuestion"] = _question_payload(
                engine, session, engine.current_item(session)
            )
        return payload

    @app.get("/api/sessions/{session_id}/result")
    def session_result(session_id: str):
        estimate, element_scores = engine.result(session_id)
        return {
            "theta": estimate.theta,
            "standardError": _finite_or_none(estimate.standard_error),
            "status": estimate.status.value,
            "perElement": [
                {
                    "elementId": score.element_id,
                    "answered": score.answered,
                    "correct": score.correct,
                    "fractionCorrect": score.fraction_correct,
                }
                for score in element_scores
            ],
            "iterations": len(estimate.trace),
        }

    @app.get("/api/competences")
    def list_competences():
        return [
            _competence_payload(c)
            for c in sorted(repository.competences.values(), key=lambda c: c.id)
        ]

    @app.get("/api/competences/{competence_id}")
    def get_competence(competence_id: str):
        competence = repository.competences.get(competence_id)
        if competence is None:
            return _error(404, "not_found", f"unknown competence {competence_id}")
        return _competence_payload(competence)

    @app.get("/api/learners/{learner_id}")
    def get_learner(learner_id: str):
        profile = repository.profiles.get(learner_id)
        if profile is None:
            return _error(404, "not_found", f"unknown learner {learner_id}")
        return _profile_payload(profile)

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
