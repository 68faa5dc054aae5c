"""
Noisy linear measurements of clique marginals and the statistics derived
from them (noise rescaling, record-total estimate, Lipschitz constant).
"""
import logging
from collections import OrderedDict
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .domain import Clique, Domain
from .errors import MeasurementError, TotalUnidentifiableError
from .query_blocks import clique_query

logger = logging.getLogger(__name__)

POWER_ITERATION_TOL = 1e-6
POWER_ITERATION_MAX = 10_000


@dataclass(frozen=True, eq=False)
class LinearMeasurement:
    """y = Q μ_C + noise, with i.i.d. Laplace noise of scale ``noise_scale``.

    Columns of ``query`` follow the row-major order of the canonical clique.
    """
    clique: Clique
    query: np.ndarray
    answer: np.ndarray
    noise_scale: float = 1.0
    epsilon: Optional[float] = None
    mechanism: Optional[str] = None

    def __post_init__(self):
        query = np.array(self.query, dtype=np.float64)
        if query.ndim == 1:
            query = query[None, :]
        answer = np.array(self.answer, dtype=np.float64).reshape(-1)
        if query.ndim != 2:
            raise MeasurementError(f"query for {tuple(self.clique)} must be a matrix")
        if answer.size != query.shape[0]:
            raise MeasurementError(
                f"answer has {answer.size} entries but query has {query.shape[0]} rows"
            )
        scale = float(self.noise_scale)
        if not np.isfinite(scale) or scale <= 0:
            raise MeasurementError(f"noise scale must be positive, got {self.noise_scale}")
        query.flags.writeable = False
        answer.flags.writeable = False
        object.__setattr__(self, "clique", tuple(self.clique))
        object.__setattr__(self, "query", query)
        object.__setattr__(self, "answer", answer)
        object.__setattr__(self, "noise_scale", scale)

    @property
    def rows(self) -> int:
        return self.query.shape[0]

    def check_domain(self, domain: Domain) -> None:
        """Raise unless the clique is canonical and the columns fit it."""
        if domain.canonical(self.clique) != self.clique:
            raise MeasurementError(f"clique {self.clique} is not in domain order")
        n_c = domain.size(self.clique)
        if self.query.shape[1] != n_c:
            raise MeasurementError(
                f"query over {self.clique} has {self.query.shape[1]} columns, expected {n_c}"
            )

    def to_record(self) -> Dict[str, Any]:
        record = {
            "clique": list(self.clique),
            "matrix": self.query.tolist(),
            "answer": self.answer.tolist(),
            "noise_scale": self.noise_scale,
        }
        if self.epsilon is not None:
            record["epsilon"] = self.epsilon
        if self.mechanism is not None:
            record["mechanism"] = self.mechanism
        return record

    @classmethod
    def from_record(cls, record: Mapping[str, Any], domain: Domain) -> "LinearMeasurement":
        """Parse one measurement-file record.

        Raises:
            MeasurementError: If required keys are missing or shapes disagree.
        """
        for key in ("clique", "answer"):
            if key not in record:
                raise MeasurementError(f"measurement record is missing {key!r}")
        clique = domain.canonical(record["clique"])
        measurement = cls(
            clique=clique,
            query=clique_query(domain, clique, record),
            answer=record["answer"],
            noise_scale=record.get("noise_scale", 1.0),
            epsilon=record.get("epsilon"),
            mechanism=record.get("mechanism"),
        )
        measurement.check_domain(domain)
        return measurement


def rescale_measurements(ms: Sequence[LinearMeasurement]) -> List[LinearMeasurement]:
    """Divide each measurement's Q and y by its noise scale and set b = 1."""
    return [
        replace(m, query=m.query / m.noise_scale, answer=m.answer / m.noise_scale, noise_scale=1.0)
        for m in ms
    ]


def estimate_total(ms: Sequence[LinearMeasurement], atol: float = 1e-8) -> Tuple[float, float]:
    """Inverse-variance weighted estimate of the record total.

    A measurement is eligible when the all-ones row lies in the row space of
    its query, so v = 1ᵀQ⁺ satisfies vQ = 1ᵀ and v·y is unbiased for the total.

    Returns:
        (total, variance) of the combined estimate.

    Raises:
        TotalUnidentifiableError: If no measurement is eligible.
    """
    weighted, precision = 0.0, 0.0
    for m in ms:
        ones = np.ones(m.query.shape[1])
        v = ones @ np.linalg.pinv(m.query)
        if not np.allclose(v @ m.query, ones, atol=atol):
            logger.debug("measurement on %s does not identify the total", m.clique)
            continue
        estimate = float(v @ m.answer)
        variance = 2.0 * m.noise_scale ** 2 * float(v @ v)
        weighted += estimate / variance
        precision += 1.0 / variance
    if precision == 0.0:
        raise TotalUnidentifiableError(
            "no measurement has the all-ones row in its row space; supply the total"
        )
    total, variance = weighted / precision, 1.0 / precision
    if total <= 0:
        logger.warning("estimated total %.6g is not positive; using 1.0", total)
        total = 1.0
    return total, variance


def _power_iteration(blocks: Sequence[np.ndarray], tol: float) -> float:
    """Largest eigenvalue of Σ QᵀQ using only products with each Q."""
    n = blocks[0].shape[1]
    v = np.random.default_rng(0).standard_normal(n)
    v /= np.linalg.norm(v)
    previous = 0.0
    for _ in range(POWER_ITERATION_MAX):
        w = sum(q.T @ (q @ v) for q in blocks)
        estimate = float(v @ w)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
        if abs(estimate - previous) <= tol * abs(estimate):
            break
        previous = estimate
    return float(v @ sum(q.T @ (q @ v) for q in blocks))


def lipschitz_constant(
    ms: Sequence[LinearMeasurement], aggregate: str = "max", tol: float = POWER_ITERATION_TOL
) -> float:
    """Lipschitz constant of the L2 loss gradient.

    Measurements on the same clique are stacked; each clique contributes
    λ_max(Σ QᵀQ). ``aggregate="max"`` takes the largest block (exact when
    measurement cliques are disjoint); ``"sum"`` adds them, which stays an
    upper bound when cliques overlap.
    """
    if not ms:
        raise MeasurementError("cannot compute a Lipschitz constant without measurements")
    if aggregate not in ("max", "sum"):
        raise ValueError(f"aggregate must be 'max' or 'sum', got {aggregate!r}")
    groups: "OrderedDict[Clique, List[np.ndarray]]" = OrderedDict()
    for m in ms:
        groups.setdefault(m.clique, []).append(m.query)
    constants = [_power_iteration(blocks, tol) for blocks in groups.values()]
    return max(constants) if aggregate == "max" else float(sum(constants))
