"""
Differential-privacy primitives: query sensitivity, the Laplace and
exponential mechanisms, and a sequential-composition budget accountant.

Sensitivities use the replace-one neighbouring relation on normalized data,
Δ_Q = (2/m)·max_j Σ_i |Q_ij|.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Union

import numpy as np
from scipy.special import softmax

from .domain import Clique
from .errors import BudgetExceededError, MechanismError
from .factor import Factor
from .measurements import LinearMeasurement

logger = logging.getLogger(__name__)

Budget = Union[int, float, Fraction]

LAPLACE = "laplace"
EXPONENTIAL = "exponential"


def as_fraction(value: Budget) -> Fraction:
    """Exact rational for a budget; floats are read by their shortest repr."""
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    return Fraction(repr(float(value)))


@dataclass(frozen=True)
class LedgerEntry:
    """One privacy-budget debit."""
    epsilon: Fraction
    mechanism: str
    clique: Optional[Clique] = None
    round: Optional[int] = None
    measurement: Optional[LinearMeasurement] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "round": self.round,
            "mechanism": self.mechanism,
            "clique": list(self.clique) if self.clique is not None else None,
            "epsilon": float(self.epsilon),
            "epsilon_exact": str(self.epsilon),
        }


class PrivacyAccountant:
    """Tracks ε spent under sequential composition against a fixed budget."""

    def __init__(self, budget: Budget, non_private: bool = False):
        """
        Args:
            budget: Total ε available.
            non_private: Mark every output as non-private (noiseless test runs).
        """
        self.budget = as_fraction(budget)
        if self.budget <= 0:
            raise MechanismError(f"privacy budget must be positive, got {budget}")
        self.non_private = non_private
        self.ledger: List[LedgerEntry] = []

    @property
    def consumed(self) -> Fraction:
        return sum((entry.epsilon for entry in self.ledger), Fraction(0))

    @property
    def remaining(self) -> Fraction:
        return self.budget - self.consumed

    def spend(self, epsilon: Budget, mechanism: str, clique: Optional[Clique] = None,
              round: Optional[int] = None) -> LedgerEntry:
        """Debit ``epsilon``.

        Raises:
            BudgetExceededError: If the debit would exceed the budget.
        """
        epsilon = as_fraction(epsilon)
        if epsilon <= 0:
            raise MechanismError(f"epsilon must be positive, got {epsilon}")
        if self.consumed + epsilon > self.budget:
            raise BudgetExceededError(
                f"spending {float(epsilon):.6g} on {mechanism} exceeds the remaining "
                f"budget {float(self.remaining):.6g} of {float(self.budget):.6g}"
            )
        entry = LedgerEntry(epsilon, mechanism, clique, round)
        self.ledger.append(entry)
        logger.info("spent epsilon %.6g on %s%s", float(epsilon), mechanism,
                    f" for {clique}" if clique is not None else "")
        return entry

    def attach(self, entry: LedgerEntry, measurement: LinearMeasurement) -> None:
        """Record the measurement released by a ledger entry."""
        index = next(i for i, e in enumerate(self.ledger) if e is entry)
        self.ledger[index] = LedgerEntry(entry.epsilon, entry.mechanism, entry.clique,
                                         entry.round, measurement)

    @property
    def measurements(self) -> List[LinearMeasurement]:
        return [e.measurement for e in self.ledger if e.measurement is not None]

    def report(self) -> Dict[str, Any]:
        return {
            "budget": float(self.budget),
            "consumed": float(self.consumed),
            "consumed_exact": str(self.consumed),
            "non_private": self.non_private,
            "entries": [entry.to_dict() for entry in self.ledger],
        }


def sensitivity(Q: np.ndarray, m: int) -> float:
    """L1 sensitivity (2/m)·‖Q‖₁ of a query on normalized data of m records."""
    Q = np.atleast_2d(np.asarray(Q, dtype=np.float64))
    if Q.size == 0:
        raise MechanismError("sensitivity of an empty query matrix")
    if m < 1:
        raise MechanismError(f"record count must be >= 1, got {m}")
    return 2.0 / m * float(np.abs(Q).sum(axis=0).max())


def laplace_measure(
    data_marginal: Factor,
    Q: np.ndarray,
    epsilon: Budget,
    m: int,
    rng: np.random.Generator,
    accountant: Optional[PrivacyAccountant] = None,
    noiseless: bool = False,
    round: Optional[int] = None,
) -> LinearMeasurement:
    """Release y = Q·μ_C + Lap(b) with b calibrated to the marginal's scale.

    ``data_marginal`` may be normalized (sums to 1) or counts (sums to m); the
    noise scale is sensitivity(Q, m)·sum(μ_C)/ε in both cases.
    With ``noiseless`` the exact answer is returned (test mode only).
    """
    eps = as_fraction(epsilon)
    if eps <= 0:
        raise MechanismError(f"epsilon must be positive, got {epsilon}")
    Q = np.atleast_2d(np.asarray(Q, dtype=np.float64))
    x = data_marginal.datavector()
    if Q.shape[1] != x.size:
        raise MechanismError(
            f"query with {Q.shape[1]} columns cannot measure clique {data_marginal.clique}"
        )
    entry = None
    if accountant is not None:
        entry = accountant.spend(eps, LAPLACE, data_marginal.clique, round)
    scale = sensitivity(Q, m) * data_marginal.sum() / float(eps)
    answer = Q @ x
    if noiseless:
        logger.warning("noiseless measurement on %s: output is not private", data_marginal.clique)
        noise_scale = scale if scale > 0 else 1.0
    else:
        answer = answer + rng.laplace(0.0, scale, size=answer.shape)
        noise_scale = scale
    measurement = LinearMeasurement(data_marginal.clique, Q, answer, noise_scale,
                                    epsilon=float(eps), mechanism=LAPLACE)
    if entry is not None:
        accountant.attach(entry, measurement)
    return measurement


def exponential_select(
    scores: np.ndarray,
    epsilon: Budget,
    score_sensitivity: float,
    rng: np.random.Generator,
    accountant: Optional[PrivacyAccountant] = None,
    round: Optional[int] = None,
) -> int:
    """Pick index i with probability ∝ exp(ε·score_i / (2Δ))."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    if scores.size == 0:
        raise MechanismError("exponential mechanism needs at least one candidate")
    if not np.all(np.isfinite(scores)):
        raise MechanismError("exponential mechanism scores must be finite")
    eps = as_fraction(epsilon)
    if eps <= 0:
        raise MechanismError(f"epsilon must be positive, got {epsilon}")
    if score_sensitivity <= 0:
        raise MechanismError(f"score sensitivity must be positive, got {score_sensitivity}")
    if accountant is not None:
        accountant.spend(eps, EXPONENTIAL, None, round)
    probabilities = softmax(float(eps) * scores / (2.0 * score_sensitivity))
    return int(rng.choice(scores.size, p=probabilities))
