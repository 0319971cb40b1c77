"""Domain model for the three interchange subsets.

Competence definitions (what is assessed: ability verb, knowledge,
performance descriptors, prerequisites), item definitions (multiple
choice questions with 2PL scale parameters), and learner profiles
(identification plus one competency record per completed placement).
Values are immutable after construction except LearnerProfile, which
accumulates records; constructors enforce the local invariants and
raise ValueError on violations.  Cross-references between documents
are checked at repository level, not here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum

from .kernel import EstimationStatus, ItemParameters


class AbilityVerb(str, Enum):
    APPLY = "Apply"
    SYNTHESIZE = "Synthesize"
    EVALUATE = "Evaluate"
    MEMORIZE = "Memorize"


class ElementKind(str, Enum):
    KNOWLEDGE = "Knowledge"
    SKILL = "Skill"
    ATTITUDE = "Attitude"


class KnowledgeKind(str, Enum):
    CONCEPT = "Concept"
    FACT = "Fact"
    PRINCIPLE = "Principle"
    PROCEDURE = "Procedure"


class PerformanceContext(str, Enum):
    FAMILIAR = "Familiar"
    UNFAMILIAR = "Unfamiliar"


class Autonomy(str, Enum):
    ASSISTED = "Assisted"
    AUTONOMOUS = "Autonomous"


class PerformanceScope(str, Enum):
    PARTIAL = "Partial"
    TOTAL = "Total"


def _require_id(value: str, what: str) -> None:
    if not value or not value.strip():
        raise ValueError(f"{what} identifier must be a non-empty string")


@dataclass(frozen=True)
class Performance:
    """Performance descriptors: context, complexity, autonomy, scope, frequency.

    Complexity and frequency are 1-5 ordinals.
    """

    context: PerformanceContext
    complexity: int
    autonomy: Autonomy
    scope: PerformanceScope
    frequency: int

    def __post_init__(self):
        if not 1 <= self.complexity <= 5:
            raise ValueError(f"complexity must be in 1..5, got {self.complexity}")
        if not 1 <= self.frequency <= 5:
            raise ValueError(f"frequency must be in 1..5, got {self.frequency}")


@dataclass(frozen=True)
class KnowledgeItem:
    """One piece of knowledge: a concept, fact, principle or procedure."""

    label: str
    kind: KnowledgeKind

    def __post_init__(self):
        if not self.label or not self.label.strip():
            raise ValueError("knowledge label must be non-empty")


@dataclass(frozen=True)
class CompetencyElement:
    """Sub-competence: an ability verb applied with a required performance.

    Skill elements must carry at least one knowledge item; attitude
    elements carry none.
    """

    id: str
    ability: AbilityVerb
    kind: ElementKind
    knowledge_items: tuple[KnowledgeItem, ...]
    performance: Performance

    def __post_init__(self):
        _require_id(self.id, "element")
        if self.kind is ElementKind.SKILL and not self.knowledge_items:
            raise ValueError(f"element {self.id}: a Skill requires at least one knowledge item")
        if self.kind is ElementKind.ATTITUDE and self.knowledge_items:
            raise ValueError(f"element {self.id}: an Attitude carries no knowledge items")


@dataclass(frozen=True)
class CompetenceDefinition:
    """A competence to assess: elements, prerequisites, and test shape.

    required_questions is the test length n; choices_per_question the
    number m of options each question presents.
    """

    id: str
    title: str
    description: str
    prerequisites: tuple[str, ...]
    elements: tuple[CompetencyElement, ...]
    required_questions: int
    choices_per_question: int

    def __post_init__(self):
        _require_id(self.id, "competence")
        if not self.elements:
            raise ValueError(f"competence {self.id}: elements must be non-empty")
        if self.required_questions < 1:
            raise ValueError(f"competence {self.id}: required_questions must be >= 1")
        if self.choices_per_question < 2:
            raise ValueError(f"competence {self.id}: choices_per_question must be >= 2")
        element_ids = [e.id for e in self.elements]
        if len(set(element_ids)) != len(element_ids):
            raise ValueError(f"competence {self.id}: duplicate element identifiers")

    def element_ids(self) -> set[str]:
        return {e.id for e in self.elements}


@dataclass(frozen=True)
class Choice:
    id: str
    text: str

    def __post_init__(self):
        _require_id(self.id, "choice")


@dataclass(frozen=True)
class ItemDefinition:
    """One multiple-choice question with its 2PL scale and importance.

    importance in [0, 1] ranks items when a bank holds more questions
    than a test needs; element_ref and competence_ref tie the question
    to the competency element it probes.
    """

    id: str
    body: str
    choices: tuple[Choice, ...]
    correct_choice: str
    scale: ItemParameters
    importance: float
    element_ref: str
    competence_ref: str

    def __post_init__(self):
        _require_id(self.id, "item")
        if len(self.choices) < 2:
            raise ValueError(f"item {self.id}: at least 2 choices required")
        choice_ids = [c.id for c in self.choices]
        if len(set(choice_ids)) != len(choice_ids):
            raise ValueError(f"item {self.id}: duplicate choice identifiers")
        if self.correct_choice not in choice_ids:
            raise ValueError(
                f"item {self.id}: correct_choice {self.correct_choice!r} is not a listed choice"
            )
        if not (math.isfinite(self.importance) and 0.0 <= self.importance <= 1.0):
            raise ValueError(f"item {self.id}: importance must be in [0, 1]")
        _require_id(self.element_ref, "item element_ref")
        _require_id(self.competence_ref, "item competence_ref")

    def choice_ids(self) -> list[str]:
        return [c.id for c in self.choices]


@dataclass(frozen=True)
class CompetencyRecord:
    """One placement outcome stored in a learner profile."""

    competence_ref: str
    theta: float
    standard_error: float
    status: EstimationStatus
    items: int
    timestamp: datetime

    def __post_init__(self):
        _require_id(self.competence_ref, "record competence_ref")
        if not -3.0 <= self.theta <= 3.0:
            raise ValueError(f"record theta {self.theta} outside [-3, 3]")
        if self.items < 1:
            raise ValueError("record item count must be >= 1")
        if self.timestamp.tzinfo is None:
            raise ValueError("record timestamp must be timezone-aware")


@dataclass
class LearnerProfile:
    """Learner identification plus accumulated competency records."""

    id: str
    name: str = ""
    affiliation: str = ""
    records: list[CompetencyRecord] = field(default_factory=list)

    def __post_init__(self):
        _require_id(self.id, "learner")
        self._check_record_keys(self.records)

    @staticmethod
    def _check_record_keys(records: list[CompetencyRecord]) -> None:
        keys = [(r.competence_ref, r.timestamp) for r in records]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate (competence, timestamp) competency record")

    def add_record(self, record: CompetencyRecord) -> None:
        self._check_record_keys(self.records + [record])
        self.records.append(record)
