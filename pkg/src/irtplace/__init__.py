"""Adaptive placement-test engine.

2PL ability estimation with Newton-Raphson maximum likelihood, XML
models for competences, item banks and learner profiles, a session
state machine with an HTTP service, and a simulation harness for
estimator validation.
"""

from .kernel import (
    AbilityEstimate,
    EstimationConfig,
    EstimationStatus,
    IterationRow,
    ItemParameters,
    NonFiniteMLEError,
    Response,
    estimate_ability,
    item_information,
    log_likelihood,
    newton_update,
    prob_correct,
    prob_incorrect,
    score_gradient,
    standard_error,
    total_information,
)
from .model import (
    AbilityVerb,
    Autonomy,
    Choice,
    CompetenceDefinition,
    CompetencyElement,
    CompetencyRecord,
    ElementKind,
    ItemDefinition,
    KnowledgeItem,
    KnowledgeKind,
    LearnerProfile,
    Performance,
    PerformanceContext,
    PerformanceScope,
)
from .repository import Repository, ValidationReport, validate_repository
from .sessions import (
    AssessmentEngine,
    InsufficientItemsError,
    SelectionMode,
    SessionState,
    SessionStateError,
    TestSession,
    UnknownReferenceError,
    UnknownSessionError,
    build_form,
)
from .simulate import (
    RecoveryReport,
    SimulationSpec,
    grid_search_mle,
    run_recovery,
    simulate_responses,
)
from .xml_io import (
    XmlParseError,
    XmlValidationError,
    parse_competence,
    parse_item_bank,
    parse_profile,
    serialize_competence,
    serialize_item_bank,
    serialize_profile,
)

__version__ = "0.1.0"

__all__ = [
    "AbilityEstimate",
    "AbilityVerb",
    "AssessmentEngine",
    "Autonomy",
    "Choice",
    "CompetenceDefinition",
    "CompetencyElement",
    "CompetencyRecord",
    "ElementKind",
    "EstimationConfig",
    "EstimationStatus",
    "InsufficientItemsError",
    "ItemDefinition",
    "ItemParameters",
    "IterationRow",
    "KnowledgeItem",
    "KnowledgeKind",
    "LearnerProfile",
    "NonFiniteMLEError",
    "Performance",
    "PerformanceContext",
    "PerformanceScope",
    "RecoveryReport",
    "Repository",
    "Response",
    "SelectionMode",
    "SessionState",
    "SessionStateError",
    "SimulationSpec",
    "TestSession",
    "UnknownReferenceError",
    "UnknownSessionError",
    "ValidationReport",
    "XmlParseError",
    "XmlValidationError",
    "build_form",
    "estimate_ability",
    "grid_search_mle",
    "item_information",
    "log_likelihood",
    "newton_update",
    "parse_competence",
    "parse_item_bank",
    "parse_profile",
    "prob_correct",
    "prob_incorrect",
    "run_recovery",
    "score_gradient",
    "serialize_competence",
    "serialize_item_bank",
    "serialize_profile",
    "simulate_responses",
    "standard_error",
    "total_information",
    "validate_repository",
]
