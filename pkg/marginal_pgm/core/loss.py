"""
Convex losses over clique marginals.
"""
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .clique_vector import CliqueVector
from .domain import Clique
from .errors import CliqueCoverageError, MeasurementError, UnsupportedLossError
from .factor import LOG, Factor
from .measurements import LinearMeasurement, rescale_measurements

L1 = "l1"
L2 = "l2"
CUSTOM = "custom"

Evaluator = Callable[[CliqueVector], Tuple[float, CliqueVector]]


@dataclass(frozen=True)
class LossSpec:
    """A loss L(μ) over marginals.

    ``l1`` is Σ‖Qμ_C − y‖₁ and ``l2`` is ½Σ‖Qμ_C − y‖². With ``rescaled`` the
    measurements are first divided by their noise scales. A ``custom`` loss
    supplies its own (value, gradient) evaluator.
    """
    kind: str
    measurements: Sequence[LinearMeasurement] = ()
    rescaled: bool = False
    evaluator: Optional[Evaluator] = field(default=None, compare=False)

    def __post_init__(self):
        kind = str(self.kind).lower()
        if kind not in (L1, L2, CUSTOM):
            raise UnsupportedLossError(f"unknown loss kind {self.kind!r}")
        if kind == CUSTOM and self.evaluator is None:
            raise UnsupportedLossError("a custom loss needs an evaluator")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "measurements", tuple(self.measurements))
        effective = rescale_measurements(self.measurements) if self.rescaled else list(self.measurements)
        object.__setattr__(self, "_effective", tuple(effective))

    @property
    def effective_measurements(self) -> Tuple[LinearMeasurement, ...]:
        """Measurements as the loss sees them (rescaled if requested)."""
        return self._effective

    @property
    def cliques(self) -> List[Clique]:
        seen: List[Clique] = []
        for m in self.measurements:
            if m.clique not in seen:
                seen.append(m.clique)
        return seen


def loss_value_and_gradient(mu: CliqueVector, spec: LossSpec) -> Tuple[float, CliqueVector]:
    """Evaluate L(μ) and ∇L(μ).

    Gradients on measurement cliques are broadcast into the first stored
    clique that contains them, so the gradient is keyed like ``mu``.

    Raises:
        CliqueCoverageError: If a measurement clique is not inside any clique of ``mu``.
    """
    if spec.kind == CUSTOM:
        value, grad = spec.evaluator(mu)
        return float(value), grad

    domain = mu.domain
    grads: Dict[Clique, np.ndarray] = {c: np.zeros(f.values.shape) for c, f in mu.items()}
    value = 0.0
    for m in spec.effective_measurements:
        key = mu.supporting_clique(m.clique)
        if key is None:
            raise CliqueCoverageError(f"measurement clique {m.clique} is not covered by {mu.cliques}")
        x = mu[key].project(m.clique).datavector()
        if m.query.shape[1] != x.size:
            raise MeasurementError(
                f"query over {m.clique} has {m.query.shape[1]} columns, expected {x.size}"
            )
        residual = m.query @ x - m.answer
        if spec.kind == L1:
            value += float(np.abs(residual).sum())
            g = m.query.T @ np.sign(residual)
        else:
            value += 0.5 * float(residual @ residual)
            g = m.query.T @ residual
        grads[key] = grads[key] + Factor(domain, m.clique, g).aligned(key)
    # gradients live in parameter (log) space alongside theta
    return value, CliqueVector(domain, {c: Factor(domain, c, g, LOG) for c, g in grads.items()})
