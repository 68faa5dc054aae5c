"""
Proximal estimation of a graphical model from a marginal-based loss.

``mirror_descent`` repeats θ ← θ − η∇L(μ(θ)); every iterate μ comes from the
marginal oracle and therefore lies in the marginal polytope.
``accelerated_estimate`` is the accelerated dual-averaging variant for losses
with Lipschitz-continuous gradients.
"""
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .clique_vector import CliqueVector
from .errors import DegenerateFactorError, EstimationError, NumericFailureError, UnsupportedLossError
from .junction_tree import JunctionTree, marginal_oracle
from .loss import L1, L2, LossSpec, loss_value_and_gradient
from .measurements import lipschitz_constant
from .model import GraphicalModel

logger = logging.getLogger(__name__)

DEFAULT_ITERATIONS = 10_000
DEFAULT_TOLERANCE = 1e-9
STOP_WINDOW = 20
MAX_HALVINGS = 20

ALG1 = "alg1"
ALG2 = "alg2"

INV_SQRT = "inv_sqrt"
CONSTANT = "constant"
LIPSCHITZ = "lipschitz"


@dataclass(frozen=True)
class StepRule:
    """Step-size schedule for mirror descent.

    ``inv_sqrt``: η_t = η₀/√t; ``constant``: η_t = η₀; ``lipschitz``:
    η_t = 1/(K·total). When ``eta0`` is None it defaults to
    1/‖∇L(μ₀)‖_∞ at the starting point. ``line_search`` halves a step
    (at most 20 times) until the loss decreases.
    """
    kind: str = INV_SQRT
    eta0: Optional[float] = None
    line_search: bool = False
    lipschitz: Optional[float] = None

    def __post_init__(self):
        if self.kind not in (INV_SQRT, CONSTANT, LIPSCHITZ):
            raise ValueError(f"unknown step rule {self.kind!r}")
        if self.eta0 is not None and not self.eta0 > 0:
            raise ValueError(f"eta0 must be positive, got {self.eta0}")
        if self.lipschitz is not None and not self.lipschitz > 0:
            raise ValueError(f"lipschitz must be positive, got {self.lipschitz}")

    def initial(self, grad: CliqueVector, spec: LossSpec, total: float,
                lipschitz_aggregate: str = "sum") -> float:
        """Resolve the base step η₀.

        Args:
            grad: Loss gradient at the starting point.
            spec: Loss the steps are taken on.
            total: Scale of the marginals.
            lipschitz_aggregate: ``"max"`` or ``"sum"`` over measurement
                cliques when ``lipschitz`` has to be computed.

        Returns:
            The base step size.
        """
        if self.kind == LIPSCHITZ:
            return 1.0 / (_resolve_lipschitz(spec, self.lipschitz, lipschitz_aggregate) * total)
        if self.eta0 is not None:
            return self.eta0
        scale = grad.max_abs()
        return 1.0 / scale if scale > 0 else 1.0

    def size(self, t: int, eta0: float) -> float:
        """Step size at iteration ``t`` (1-based)."""
        if self.kind == INV_SQRT:
            return eta0 / math.sqrt(t)
        return eta0

    def describe(self) -> str:
        suffix = "+line_search" if self.line_search else ""
        return f"{self.kind}{suffix}"


@dataclass
class EstimationReport:
    """What an estimator did: per-iteration losses, steps and timings."""
    algorithm: str
    step_rule: str
    iterations: int = 0
    loss_trace: List[float] = field(default_factory=list)
    step_sizes: List[float] = field(default_factory=list)
    iteration_seconds: List[float] = field(default_factory=list)
    final_loss: float = float("nan")
    converged: bool = False
    theta_max_abs: float = 0.0
    lipschitz: Optional[float] = None
    model_loss: Optional[float] = None
    averaged_marginals: Optional[CliqueVector] = field(default=None, repr=False)

    @property
    def wall_time(self) -> float:
        return float(sum(self.iteration_seconds))

    def record(self, loss: float, step: float, seconds: float) -> None:
        """Append one iteration to the trace."""
        self.loss_trace.append(float(loss))
        self.step_sizes.append(float(step))
        self.iteration_seconds.append(float(seconds))
        self.iterations = len(self.loss_trace)

    def to_dict(self) -> Dict[str, Any]:
        report = {
            "algorithm": self.algorithm,
            "step_rule": self.step_rule,
            "iterations": self.iterations,
            "final_loss": self.final_loss,
            "model_loss": self.model_loss,
            "converged": self.converged,
            "theta_max_abs": self.theta_max_abs,
            "lipschitz": self.lipschitz,
            "wall_time_seconds": self.wall_time,
            "loss_trace": self.loss_trace,
            "step_sizes": self.step_sizes,
            "iteration_seconds": self.iteration_seconds,
        }
        if self.averaged_marginals is not None:
            report["averaged_marginals"] = {
                ",".join(c): f.datavector().tolist()
                for c, f in self.averaged_marginals.items_sorted()
            }
        return report


@dataclass(frozen=True)
class EstimatorConfig:
    """Algorithm choice and knobs shared by the pipeline and MWEM."""
    algorithm: str = ALG2
    iterations: int = 1000
    step_rule: StepRule = field(default_factory=StepRule)
    tolerance: Optional[float] = DEFAULT_TOLERANCE
    lipschitz_aggregate: str = "sum"

    def __post_init__(self):
        if self.algorithm not in (ALG1, ALG2):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


def _resolve_lipschitz(spec: LossSpec, given: Optional[float], aggregate: str = "sum") -> float:
    """``given`` when set, otherwise the constant of the L2 measurements."""
    if given is not None:
        return float(given)
    if spec.kind not in (L2,):
        raise EstimationError(f"a Lipschitz constant must be supplied for {spec.kind} loss")
    constant = lipschitz_constant(spec.effective_measurements, aggregate=aggregate)
    if constant <= 0:
        raise EstimationError("measurements have a zero Lipschitz constant")
    return constant


def _initial_theta(tree: JunctionTree, theta0: Optional[CliqueVector]) -> CliqueVector:
    if theta0 is None:
        return CliqueVector.zeros(tree.domain, tree.maximal_cliques)
    return theta0


def _evaluate(tree, theta, spec, total, iteration):
    """Oracle plus loss, with non-finite values reported as NumericFailureError."""
    if not theta.is_finite():
        raise NumericFailureError(f"parameters became non-finite at iteration {iteration}", iteration)
    try:
        mu, log_z = marginal_oracle(tree, theta, total)
    except DegenerateFactorError as err:
        raise NumericFailureError(f"oracle failed at iteration {iteration}: {err}", iteration) from err
    value, grad = loss_value_and_gradient(mu, spec)
    if not np.isfinite(value) or not grad.is_finite():
        raise NumericFailureError(f"loss or gradient is not finite at iteration {iteration}", iteration)
    return mu, log_z, value, grad


def _stalled(trace: List[float], tol: Optional[float]) -> bool:
    if tol is None or len(trace) <= STOP_WINDOW:
        return False
    before, now = trace[-STOP_WINDOW - 1], trace[-1]
    return abs(before - now) <= tol * max(abs(before), np.finfo(float).tiny)


def mirror_descent(
    tree: JunctionTree,
    spec: LossSpec,
    total: float = 1.0,
    steps: int = DEFAULT_ITERATIONS,
    step_rule: Optional[StepRule] = None,
    theta0: Optional[CliqueVector] = None,
    tol: Optional[float] = DEFAULT_TOLERANCE,
    lipschitz_aggregate: str = "sum",
    log_every: int = 100,
) -> Tuple[GraphicalModel, EstimationReport]:
    """Proximal (entropic mirror descent) estimation.

    Args:
        tree: Junction tree covering every measurement clique.
        spec: Convex loss over marginals.
        total: Scale of the marginals (1 for probabilities, m for counts).
        steps: Maximum number of iterations T.
        step_rule: Step-size schedule (default ``inv_sqrt`` without line search).
        theta0: Warm-start parameters keyed by the tree's cliques.
        tol: Early-stop threshold on the relative loss change over 20
            iterations; None always runs ``steps`` iterations.
        lipschitz_aggregate: How per-clique Lipschitz constants combine for
            the ``lipschitz`` rule (``"max"`` or ``"sum"``).
        log_every: Iterations between DEBUG progress lines.

    Returns:
        The model for the final θ and the report of the run.

    Raises:
        NumericFailureError: If the loss or gradient stops being finite.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    rule = step_rule or StepRule()
    theta = _initial_theta(tree, theta0)
    mu, log_z, value, grad = _evaluate(tree, theta, spec, total, 0)
    eta0 = rule.initial(grad, spec, total, lipschitz_aggregate)
    report = EstimationReport(ALG1, rule.describe())
    if rule.kind == LIPSCHITZ:
        report.lipschitz = 1.0 / (eta0 * total)
    logger.info("mirror descent: %d steps, rule %s, eta0 %.4g, start loss %.6g",
                steps, rule.describe(), eta0, value)

    exhausted = 0
    for t in range(1, steps + 1):
        started = time.perf_counter()
        eta = rule.size(t, eta0)
        candidate = theta - grad * eta
        new = _evaluate(tree, candidate, spec, total, t)
        if rule.line_search:
            halvings = 0
            while not new[2] < value and halvings < MAX_HALVINGS:
                eta *= 0.5
                halvings += 1
                candidate = theta - grad * eta
                new = _evaluate(tree, candidate, spec, total, t)
            if halvings:
                logger.debug("iteration %d: %d line-search halvings, eta %.4g", t, halvings, eta)
            if not new[2] < value:
                # no decrease found, keep the current iterate
                exhausted += 1
                candidate, new = theta, (mu, log_z, value, grad)
        theta = candidate
        mu, log_z, value, grad = new
        report.record(value, eta, time.perf_counter() - started)
        if log_every and t % log_every == 0:
            logger.debug("iteration %d: loss %.10g, eta %.4g", t, value, eta)
        if _stalled(report.loss_trace, tol):
            report.converged = True
            logger.info("mirror descent stopped early at iteration %d", t)
            break

    if exhausted:
        logger.warning("line search found no decrease in %d iterations", exhausted)
    report.final_loss = value
    report.model_loss = value
    report.theta_max_abs = theta.max_abs()
    logger.info("mirror descent finished: %d iterations, loss %.10g", report.iterations, value)
    return GraphicalModel(tree, theta, float(total), mu, log_z), report


def accelerated_estimate(
    tree: JunctionTree,
    spec: LossSpec,
    total: float = 1.0,
    steps: int = DEFAULT_ITERATIONS,
    lipschitz: Optional[float] = None,
    theta0: Optional[CliqueVector] = None,
    tol: Optional[float] = DEFAULT_TOLERANCE,
    lipschitz_aggregate: str = "sum",
    log_every: int = 100,
) -> Tuple[GraphicalModel, EstimationReport]:
    """Accelerated dual-averaging estimation for smooth losses.

    Each round averages gradients at ω = (1−c)μ + cν with c = 2/(t+1), sets
    θ = θ₀ − t(t+1)/(4·K·total)·ḡ and takes ν = μ(θ), where θ₀ is the
    warm start (zeros by default). The returned model holds the
    last θ (its marginals are ν); the averaged μ is in
    ``report.averaged_marginals`` and ``report.final_loss`` is L(μ).

    Raises:
        UnsupportedLossError: For L1 loss, whose gradient is not Lipschitz.
        NumericFailureError: If the loss or gradient stops being finite.
    """
    if spec.kind == L1:
        raise UnsupportedLossError("accelerated estimation needs a smooth loss; use alg1 for l1")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    K = _resolve_lipschitz(spec, lipschitz, lipschitz_aggregate)
    centre = _initial_theta(tree, theta0)
    theta = centre
    nu, log_z, _, _ = _evaluate(tree, theta, spec, total, 0)
    mu = nu
    gbar = CliqueVector.zeros(tree.domain, tree.maximal_cliques)
    report = EstimationReport(ALG2, f"dual_averaging(K={K:.6g})", lipschitz=K)
    logger.info("accelerated estimation: %d steps, K %.6g, total %.6g", steps, K, total)

    value = float("nan")
    for t in range(1, steps + 1):
        started = time.perf_counter()
        c = 2.0 / (t + 1)
        omega = mu * (1 - c) + nu * c
        _, grad = loss_value_and_gradient(omega, spec)
        gbar = gbar * (1 - c) + grad * c
        coefficient = t * (t + 1) / (4.0 * K * total)
        theta = centre - gbar * coefficient
        nu, log_z, _, _ = _evaluate(tree, theta, spec, total, t)
        mu = mu * (1 - c) + nu * c
        value, _ = loss_value_and_gradient(mu, spec)
        if not np.isfinite(value):
            raise NumericFailureError(f"loss is not finite at iteration {t}", t)
        report.record(value, coefficient, time.perf_counter() - started)
        if log_every and t % log_every == 0:
            logger.debug("iteration %d: loss %.10g", t, value)
        if _stalled(report.loss_trace, tol):
            report.converged = True
            logger.info("accelerated estimation stopped early at iteration %d", t)
            break

    report.final_loss = value
    report.model_loss, _ = loss_value_and_gradient(nu, spec)
    report.averaged_marginals = mu
    report.theta_max_abs = theta.max_abs()
    logger.info("accelerated estimation finished: %d iterations, loss %.10g",
                report.iterations, value)
    return GraphicalModel(tree, theta, float(total), nu, log_z), report


def estimate(
    tree: JunctionTree,
    spec: LossSpec,
    total: float,
    config: Optional[EstimatorConfig] = None,
    theta0: Optional[CliqueVector] = None,
) -> Tuple[GraphicalModel, EstimationReport]:
    """Run the configured estimator."""
    config = config or EstimatorConfig()
    if config.algorithm == ALG1:
        return mirror_descent(tree, spec, total, config.iterations, config.step_rule,
                              theta0=theta0, tol=config.tolerance,
                              lipschitz_aggregate=config.lipschitz_aggregate)
    return accelerated_estimate(tree, spec, total, config.iterations,
                                lipschitz=config.step_rule.lipschitz, theta0=theta0,
                                tol=config.tolerance,
                                lipschitz_aggregate=config.lipschitz_aggregate)
