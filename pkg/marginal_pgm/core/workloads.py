"""
Query workloads and the workload-error metric.
"""
import itertools
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from .domain import Clique, Domain
from .errors import DegenerateWorkloadError, MechanismError
from .factor import Factor
from .inference import model_marginal
from .model import GraphicalModel
from .query_blocks import clique_query


@dataclass(frozen=True, eq=False)
class Workload:
    """Sub-workloads (C, W_C) whose columns index the cells of clique C."""
    domain: Domain
    entries: Tuple[Tuple[Clique, np.ndarray], ...]

    def __post_init__(self):
        entries = []
        for clique, matrix in self.entries:
            clique = self.domain.canonical(clique)
            matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
            if matrix.shape[1] != self.domain.size(clique):
                raise MechanismError(
                    f"workload matrix for {clique} has {matrix.shape[1]} columns, "
                    f"expected {self.domain.size(clique)}"
                )
            entries.append((clique, matrix))
        if not entries:
            raise MechanismError("workload is empty")
        object.__setattr__(self, "entries", tuple(entries))

    @classmethod
    def identity(cls, domain: Domain, cliques: Iterable[Iterable[str]]) -> "Workload":
        """Workload of full marginal queries on ``cliques``."""
        cliques = [domain.canonical(c) for c in cliques]
        return cls(domain, tuple((c, np.eye(domain.size(c))) for c in cliques))

    @classmethod
    def from_config(cls, domain: Domain, records: Sequence[Mapping[str, Any]]) -> "Workload":
        """Workload records ``{clique, query | blocks | matrix}`` (identity by default)."""
        return cls(domain, tuple(
            (domain.canonical(r["clique"]), clique_query(domain, r["clique"], r)) for r in records
        ))

    @property
    def cliques(self) -> List[Clique]:
        return [c for c, _ in self.entries]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def workload_error_by_clique(
    true_marginals: Mapping[Clique, Factor], model: GraphicalModel, workload: Workload
) -> Dict[Clique, float]:
    """‖W_C(μ_C − μ̂_C)‖₁ / (2‖W_C μ_C‖₁) per clique, both sides normalized to 1."""
    errors = {}
    for clique, W in workload:
        truth = true_marginals[clique].datavector()
        estimate = model_marginal(model, clique).datavector()
        if truth.sum() <= 0 or estimate.sum() <= 0:
            raise DegenerateWorkloadError(f"marginal on {clique} has no mass")
        true_answers = W @ (truth / truth.sum())
        denominator = float(np.abs(true_answers).sum())
        if denominator == 0.0:
            raise DegenerateWorkloadError(f"workload on {clique} has zero true answers")
        difference = true_answers - W @ (estimate / estimate.sum())
        errors[clique] = float(np.abs(difference).sum()) / (2.0 * denominator)
    return errors


def workload_error(
    true_marginals: Mapping[Clique, Factor], model: GraphicalModel, workload: Workload
) -> float:
    """Average normalized workload error; equals total variation when W_C = I."""
    errors = workload_error_by_clique(true_marginals, model, workload)
    return float(np.mean(list(errors.values())))


def adjacent_triples_workload(d: int, cardinality: int = 10) -> Tuple[List[Clique], Workload]:
    """Identity measurements on every run of three adjacent attributes x1..xd."""
    if d < 3:
        raise MechanismError(f"adjacent triples need d >= 3, got {d}")
    domain = Domain(tuple(f"x{i}" for i in range(1, d + 1)), (cardinality,) * d)
    cliques = [domain.attributes[i:i + 3] for i in range(d - 2)]
    return cliques, Workload.identity(domain, cliques)


def all_kway_workload(domain: Domain, k: int) -> Workload:
    """Identity workload over every k-way marginal."""
    if not 1 <= k <= len(domain):
        raise MechanismError(f"k must be in [1, {len(domain)}], got {k}")
    return Workload.identity(domain, itertools.combinations(domain.attributes, k))
