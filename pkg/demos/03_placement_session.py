"""Taking a placement test
==========================

Drives the session state machine directly (no HTTP): a fixed
easiest-first test over the SQL bank, the adaptive maximum-information
variant, and resuming an interrupted session from its event log.
"""

import tempfile
from pathlib import Path

from irtplace import AssessmentEngine, EstimationConfig, SelectionMode, SessionState
from irtplace.fixtures import copy_sql_repo
from irtplace.reference import WRONG_QUESTIONS
from irtplace.repository import Repository

workdir = Path(tempfile.mkdtemp(prefix="irtplace-demo-"))
repo = Repository.load(copy_sql_repo(workdir / "repo"))
engine = AssessmentEngine(
    repo, config=EstimationConfig(theta_initial=1.0), event_dir=workdir / "events"
)

###############################################################################
# A fixed-form session
# --------------------
# The form takes the 20 most important linked questions ordered easiest
# first; answers score 1/0 against the stored correct choice.  We replay
# the reference pattern: wrong on questions 1, 4, 7, 8, 15, 16, 18, 19.

session = engine.create_session("learner-001", "sql")
print("form:", " ".join(session.form))

position = 0
while session.state is SessionState.IN_PROGRESS:
    position += 1
    item = engine.current_item(session)
    if position in WRONG_QUESTIONS:
        choice = next(c.id for c in item.choices if c.id != item.correct_choice)
    else:
        choice = item.correct_choice
    session = engine.submit_answer(session.id, item.id, choice)

result = session.result
print(f"\nestimate: theta = {result.theta:.5f} +/- {result.standard_error:.5f} "
      f"({result.status.value}, {len(result.trace)} iteration rows)")
print("per-element breakdown:")
for score in session.element_scores:
    print(f"  {score.element_id:>18}: {score.correct}/{score.answered} "
          f"({score.fraction_correct:.0%})")

record = repo.profiles["learner-001"].records[-1]
print(f"profile record appended: {record.competence_ref} "
      f"theta={record.theta:.5f} items={record.items}")

###############################################################################
# The adaptive variant
# --------------------
# One question at a time: after each answer the engine re-estimates a
# provisional ability and serves the unused question with maximum
# information there.  Watch the difficulty track the answers.

adaptive = engine.create_session(
    "learner-001", "sql", mode=SelectionMode.ADAPTIVE_MAX_INFO
)
print("\nadaptive run (answering correctly below difficulty 1.2, else wrong):")
while adaptive.state is SessionState.IN_PROGRESS:
    item = engine.current_item(adaptive)
    knows_it = item.scale.b < 1.2
    choice = (
        item.correct_choice
        if knows_it
        else next(c.id for c in item.choices if c.id != item.correct_choice)
    )
    adaptive = engine.submit_answer(adaptive.id, item.id, choice)
    print(f"  served {item.id} (b={item.scale.b:+.1f}) -> {'right' if knows_it else 'wrong'}")
print(f"adaptive estimate: theta = {adaptive.result.theta:.5f} "
      f"+/- {adaptive.result.standard_error:.5f}")

###############################################################################
# Resuming from the event log
# ---------------------------
# Every transition was appended to <events>/<session>.jsonl; a fresh
# engine (think: process restart) replays it and carries on.

interrupted = engine.create_session("learner-001", "sql")
for _ in range(3):
    item = engine.current_item(interrupted)
    interrupted = engine.submit_answer(interrupted.id, item.id, item.correct_choice)

fresh_engine = AssessmentEngine(
    Repository.load(workdir / "repo"),
    config=EstimationConfig(theta_initial=1.0),
    event_dir=workdir / "events",
)
resumed = fresh_engine.resume_session(interrupted.id)
print(f"\nresumed session {resumed.id[:8]}...: {resumed.cursor} of "
      f"{resumed.total_questions} answered, next = {resumed.current_item_id}")
