"""Two-parameter logistic (2PL) scoring core.

Response probabilities, Fisher information, and Newton-Raphson
maximum-likelihood estimation of a latent ability theta from
dichotomous (right/wrong) item responses.  Everything in this module
is a pure function of its inputs and safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

# Probabilities are kept strictly inside (0, 1) so logs and divisions
# never blow up; at placement-test scale the clamp is never active.
PROB_FLOOR = 1e-12

# Below this total information the likelihood carries no usable
# curvature and a Newton step is meaningless.
INFO_FLOOR = 1e-12

# Iterates are confined to a wide guard interval so exp() cannot
# overflow, and a single Newton step is capped: on flat likelihoods
# (few items, ability far from every difficulty) the raw step can
# overshoot by several logits and oscillate between the guards.
GUARD_INTERVAL = (-6.0, 6.0)
MAX_NEWTON_STEP = 1.0


class EstimationStatus(str, Enum):
    CONVERGED = "converged"
    MAX_ITERATIONS_REACHED = "max_iterations_reached"
    NON_FINITE_MLE = "non_finite_mle"


class NonFiniteMLEError(ArithmeticError):
    """The likelihood has no usable interior maximum (zero information)."""


@dataclass(frozen=True)
class ItemParameters:
    """2PL item parameters: discrimination ``a`` and difficulty ``b``.

    ``a`` scales how sharply the response probability rises around the
    difficulty; ``b`` is the ability at which a correct answer has
    probability one half.  Both live on the logit scale.
    """

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise ValueError(f"discrimination a must be finite and > 0, got {self.a}")
        if not math.isfinite(self.b):
            raise ValueError(f"difficulty b must be finite, got {self.b}")


@dataclass(frozen=True)
class Response:
    """One scored answer: the item taken and its dichotomous score u.

    u = 1 for a correct answer, u = 0 for a wrong one.
    """

    item: ItemParameters
    u: int

    def __post_init__(self):
        if self.u not in (0, 1):
            raise ValueError(f"response score u must be 0 or 1, got {self.u}")


@dataclass(frozen=True)
class EstimationConfig:
    """Knobs of the Newton-Raphson ability search.

    theta_initial is the starting ability; iteration stops once the
    update falls below ``tolerance`` or after ``max_iterations`` steps.
    The reported ability is clamped into ``theta_bounds``.
    """

    theta_initial: float = 0.0
    tolerance: float = 1e-5
    max_iterations: int = 50
    theta_bounds: tuple[float, float] = (-3.0, 3.0)

    def __post_init__(self):
        if not (math.isfinite(self.tolerance) and self.tolerance > 0):
            raise ValueError("tolerance must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        lo, hi = self.theta_bounds
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ValueError("theta_bounds must be a finite (lower, upper) pair")
        if not math.isfinite(self.theta_initial):
            raise ValueError("theta_initial must be finite")


@dataclass(frozen=True)
class IterationRow:
    """Snapshot of one Newton iteration, with every per-item column.

    Column layout mirrors the worked tables this engine is checked
    against: for item i at ability theta_s, p/q are the correct and
    incorrect response probabilities, numerator_i = a_i (u_i - p_i) and
    denominator_i = a_i^2 p_i q_i, plus their sums over items.
    """

    s: int
    theta_s: float
    p: tuple[float, ...]
    q: tuple[float, ...]
    numerator: tuple[float, ...]
    denominator: tuple[float, ...]
    numerator_sum: float
    denominator_sum: float


@dataclass(frozen=True)
class AbilityEstimate:
    """Result of the ability search: theta, its standard error, how the
    iteration ended, and the full per-iteration trace."""

    theta: float
    standard_error: float
    status: EstimationStatus
    trace: tuple[IterationRow, ...]


def _check_theta(theta: float) -> float:
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta}")
    return float(theta)


def _check_responses(responses: Sequence[Response]) -> Sequence[Response]:
    if len(responses) == 0:
        raise ValueError("at least one response is required")
    return responses


def prob_correct(theta: float, item: ItemParameters) -> float:
    """Probability of answering the item correctly at ability theta.

    P(theta) = 1 / (1 + e^(-a (theta - b))), the 2PL response curve.
    Strictly increasing in theta and equal to 0.5 at theta = b.
    """
    _check_theta(theta)
    x = item.a * (theta - item.b)
    if x >= 0:
        p = 1.0 / (1.0 + math.exp(-x)) if x < 745.0 else 1.0
    else:
        e = math.exp(x) if x > -745.0 else 0.0
        p = e / (1.0 + e)
    return min(max(p, PROB_FLOOR), 1.0 - PROB_FLOOR)


def prob_incorrect(theta: float, item: ItemParameters) -> float:
    """Probability of a wrong answer: Q(theta) = 1 - P(theta)."""
    return 1.0 - prob_correct(theta, item)


def item_information(theta: float, item: ItemParameters) -> float:
    """Fisher information a^2 P Q of one item at ability theta.

    Peaks at theta = b with value a^2 / 4; items tell the most about
    abilities near their own difficulty.
    """
    p = prob_correct(theta, item)
    return item.a * item.a * p * (1.0 - p)


def log_likelihood(theta: float, responses: Sequence[Response]) -> float:
    """Log-likelihood sum u ln P + (1 - u) ln Q of the response pattern."""
    _check_responses(responses)
    total = 0.0
    for r in responses:
        p = prob_correct(theta, r.item)
        total += math.log(p) if r.u == 1 else math.log(1.0 - p)
    return total


def score_gradient(theta: float, responses: Sequence[Response]) -> float:
    """First derivative of the log-likelihood: sum a_i (u_i - P_i(theta)).

    Positive when the answers look stronger than theta predicts (the
    estimate should move up), negative when weaker.
    """
    _check_responses(responses)
    return sum(r.item.a * (r.u - prob_correct(theta, r.item)) for r in responses)


def total_information(theta: float, responses: Sequence[Response]) -> float:
    """Total Fisher information sum a_i^2 P_i Q_i over the responses.

    For the 2PL this equals the negated second derivative of the
    log-likelihood exactly, item scores drop out of the curvature.
    """
    _check_responses(responses)
    return sum(item_information(theta, r.item) for r in responses)


def standard_error(theta: float, responses: Sequence[Response]) -> float:
    """Standard error of the ability estimate: 1 / sqrt(total information)."""
    info = total_information(theta, responses)
    if info < INFO_FLOOR:
        raise NonFiniteMLEError(f"total information {info} is below {INFO_FLOOR}")
    return 1.0 / math.sqrt(info)


def _iteration_row(s: int, theta: float, responses: Sequence[Response]) -> IterationRow:
    p, q, num, den = [], [], [], []
    for r in responses:
        pi = prob_correct(theta, r.item)
        p.append(pi)
        q.append(1.0 - pi)
        num.append(r.item.a * (r.u - pi))
        den.append(r.item.a * r.item.a * pi * (1.0 - pi))
    return IterationRow(
        s=s,
        theta_s=theta,
        p=tuple(p),
        q=tuple(q),
        numerator=tuple(num),
        denominator=tuple(den),
        numerator_sum=sum(num),
        denominator_sum=sum(den),
    )


def newton_update(
    theta_s: float, responses: Sequence[Response], s: int = 0
) -> tuple[float, IterationRow]:
    """One Newton-Raphson step of the ability search.

    Returns theta_s + gradient / information together with the
    iteration row recording every per-item column at theta_s.

    Raises NonFiniteMLEError when the total information is below the
    positive floor, in which case no step can be taken.
    """
    _check_theta(theta_s)
    _check_responses(responses)
    row = _iteration_row(s, theta_s, responses)
    if row.denominator_sum < INFO_FLOOR:
        raise NonFiniteMLEError(
            f"total information {row.denominator_sum} at theta={theta_s} is below {INFO_FLOOR}"
        )
    return theta_s + row.numerator_sum / row.denominator_sum, row


def _clamp(x: float, lo: float, hi: float) -> float:
    return min(max(x, lo), hi)


def _safe_standard_error(theta: float, responses: Sequence[Response]) -> float:
    try:
        return standard_error(theta, responses)
    except NonFiniteMLEError:
        return math.inf


def estimate_ability(
    responses: Sequence[Response], config: EstimationConfig | None = None
) -> AbilityEstimate:
    """Maximum-likelihood ability estimate by Newton-Raphson iteration.

    Starting from ``config.theta_initial``, repeats theta <- theta +
    gradient/information until the update magnitude falls below
    ``config.tolerance`` (status CONVERGED) or ``config.max_iterations``
    is exhausted.  The reported theta is clamped into
    ``config.theta_bounds``; the trace keeps one row per iteration plus,
    on convergence, a final row evaluated at the accepted estimate.

    An all-correct or all-incorrect pattern has no interior maximum:
    the estimate is pinned to the corresponding bound and flagged
    NON_FINITE_MLE rather than raising, so a placement always yields a
    usable value.
    """
    if config is None:
        config = EstimationConfig()
    _check_responses(responses)
    lo, hi = config.theta_bounds

    scores = {r.u for r in responses}
    if scores == {1} or scores == {0}:
        pinned = hi if scores == {1} else lo
        return AbilityEstimate(
            theta=pinned,
            standard_error=_safe_standard_error(pinned, responses),
            status=EstimationStatus.NON_FINITE_MLE,
            trace=(_iteration_row(0, pinned, responses),),
        )

    theta = float(config.theta_initial)
    rows: list[IterationRow] = []
    status = EstimationStatus.MAX_ITERATIONS_REACHED
    for s in range(config.max_iterations):
        try:
            proposed, row = newton_update(theta, responses, s=s)
        except NonFiniteMLEError:
            status = EstimationStatus.NON_FINITE_MLE
            break
        rows.append(row)
        step = proposed - theta
        if abs(step) > MAX_NEWTON_STEP:
            step = math.copysign(MAX_NEWTON_STEP, step)
        proposed = _clamp(theta + step, *GUARD_INTERVAL)
        if abs(proposed - theta) < config.tolerance:
            theta = proposed
            status = EstimationStatus.CONVERGED
            rows.append(_iteration_row(s + 1, theta, responses))
            break
        theta = proposed

    reported = _clamp(theta, lo, hi)
    return AbilityEstimate(
        theta=reported,
        standard_error=_safe_standard_error(reported, responses),
        status=status,
        trace=tuple(rows),
    )
