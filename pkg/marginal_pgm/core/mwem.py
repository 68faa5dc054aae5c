"""
MWEM with a graphical-model estimator in place of multiplicative weights.

Each round spends ε/(2T) selecting the worst-approximated workload query with
the exponential mechanism and ε/(2T) measuring it with the Laplace mechanism,
then re-estimates the model from every measurement taken so far.
"""
import logging
from typing import Callable, List, Optional, Tuple

import numpy as np

from .dataset import Dataset
from .errors import FeasibilityError, MechanismError, ModelTooLargeError
from .estimation import EstimationReport, EstimatorConfig, estimate
from .inference import model_marginal
from .junction_tree import DEFAULT_PARAMETER_CAP, build_junction_tree
from .loss import L2, LossSpec
from .mechanisms import PrivacyAccountant, as_fraction, exponential_select, laplace_measure
from .model import GraphicalModel
from .workloads import Workload

logger = logging.getLogger(__name__)


def mwem_pgm(
    data: Dataset,
    workload: Workload,
    epsilon: float,
    rounds: int,
    estimator: Optional[EstimatorConfig] = None,
    rng: Optional[np.random.Generator] = None,
    noiseless: bool = False,
    parameter_cap: int = DEFAULT_PARAMETER_CAP,
    callback: Optional[Callable[[int, GraphicalModel, EstimationReport], None]] = None,
) -> Tuple[GraphicalModel, PrivacyAccountant]:
    """Run MWEM+PGM over the rows of every workload matrix.

    Scores are count-scale absolute errors |w·c_C − w·ĉ_C| with sensitivity
    2·max|w|. The model is estimated at the known record count with rescaled
    L2 loss. ``callback`` is called after each round with the round number,
    the model and its estimation report.

    Returns:
        The final model and the accountant, whose ledger holds every
        measurement in the order taken.

    Raises:
        FeasibilityError: If the junction tree for the measured cliques would
            exceed ``parameter_cap``.
    """
    if rounds < 1:
        raise MechanismError(f"rounds must be >= 1, got {rounds}")
    if data.domain != workload.domain:
        raise MechanismError("workload and dataset use different domains")
    estimator = estimator or EstimatorConfig()
    rng = rng if rng is not None else np.random.default_rng()
    domain = data.domain
    m = data.records_count
    total = float(m)
    accountant = PrivacyAccountant(epsilon, non_private=noiseless)
    per_mechanism = as_fraction(epsilon) / (2 * rounds)

    candidates = [(clique, row) for clique, W in workload for row in W]
    truth = {clique: data.marginal(clique) for clique in workload.cliques}
    score_sensitivity = 2.0 * max(float(np.abs(row).max()) for _, row in candidates)
    if score_sensitivity == 0:
        raise MechanismError("workload has only zero queries")

    cliques: List = []
    tree = build_junction_tree(domain, cliques)
    model = GraphicalModel.from_potentials(tree, total=total)
    for t in range(1, rounds + 1):
        estimates = {c: model_marginal(model, c).datavector() for c in workload.cliques}
        scores = np.array([
            abs(float(row @ truth[c].datavector()) - float(row @ estimates[c]))
            for c, row in candidates
        ])
        index = exponential_select(scores, per_mechanism, score_sensitivity, rng, accountant, t)
        clique, row = candidates[index]
        logger.info("round %d: selected a query on %s (score %.4g)", t, clique, scores[index])

        theta0 = None
        if clique not in cliques:
            proposed = build_junction_tree(domain, cliques + [clique])
            try:
                proposed.check_size(parameter_cap)
            except ModelTooLargeError as err:
                union = tuple(sorted({a for c in cliques + [clique] for a in c}, key=domain.index))
                raise FeasibilityError(
                    f"measuring {clique} in round {t} makes the model over {union} too large: {err}",
                    clique=union,
                ) from err
            cliques.append(clique)
            tree = proposed
        else:
            theta0 = model.theta

        laplace_measure(truth[clique], row[None, :], per_mechanism, m, rng,
                        accountant, noiseless=noiseless, round=t)
        spec = LossSpec(L2, accountant.measurements, rescaled=True)
        model, report = estimate(tree, spec, total, estimator, theta0=theta0)
        logger.info("round %d: %d measurements, loss %.6g", t, len(spec.measurements),
                    report.final_loss)
        if callback is not None:
            callback(t, model, report)

    return model, accountant
