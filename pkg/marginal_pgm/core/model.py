"""
The estimated distribution: a junction tree with log-potentials θ.
"""
from dataclasses import dataclass
from typing import Dict, List, Optional

from .clique_vector import CliqueVector
from .domain import Clique, Domain
from .factor import Factor
from .junction_tree import JunctionTree, marginal_oracle, tree_entropy


@dataclass(frozen=True, eq=False)
class GraphicalModel:
    """p_θ(x) ∝ exp(Σ_C θ_C(x_C)) scaled to ``total`` records.

    ``marginals`` caches the oracle output for ``theta`` and
    ``log_partition`` its log normalizer.
    """
    tree: JunctionTree
    theta: CliqueVector
    total: float
    marginals: CliqueVector
    log_partition: float

    @classmethod
    def from_potentials(
        cls, tree: JunctionTree, theta: Optional[CliqueVector] = None, total: float = 1.0
    ) -> "GraphicalModel":
        """Build a model by running the marginal oracle (θ = 0 gives the uniform model)."""
        if theta is None:
            theta = CliqueVector.zeros(tree.domain, tree.maximal_cliques)
        marginals, log_z = marginal_oracle(tree, theta, total)
        return cls(tree, theta, float(total), marginals, log_z)

    @property
    def domain(self) -> Domain:
        return self.tree.domain

    @property
    def cliques(self) -> List[Clique]:
        return list(self.tree.maximal_cliques)

    def clique_marginal(self, clique) -> Optional[Factor]:
        """Marginal on ``clique`` if some tree clique contains it, else None."""
        key = self.tree.containing_clique(clique)
        if key is None:
            return None
        return self.marginals[key].project(clique)

    def entropy(self) -> float:
        """Shannon entropy (nats) of the normalized model distribution."""
        return tree_entropy(self.marginals * (1.0 / self.total), self.tree)

    def marginals_dict(self) -> Dict[str, list]:
        """Flat row-major clique marginals keyed by ``"A,B"`` names."""
        return {",".join(c): f.datavector().tolist() for c, f in self.marginals.items_sorted()}
