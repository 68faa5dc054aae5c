"""
Junction trees over measurement cliques and exact marginal inference.

The tree is built by greedy min-fill triangulation of the union graph of the
measurement cliques followed by a maximum-weight spanning tree over the
resulting maximal cliques. ``marginal_oracle`` runs two-pass log-space belief
propagation on it.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy.special import entr

from .clique_vector import CliqueVector
from .domain import Clique, Domain
from .errors import InconsistentMarginalsError, ModelTooLargeError, ParameterMismatchError
from .factor import LOG, Factor, log_normalize

logger = logging.getLogger(__name__)

BYTES_PER_VALUE = 8
DEFAULT_PARAMETER_CAP = 50_000_000


@dataclass(frozen=True)
class ModelSize:
    """Feasibility summary of a junction tree."""
    clique_sizes: Dict[Clique, int]
    parameter_count: int
    largest_clique: int
    peak_bytes: int

    def to_dict(self) -> dict:
        return {
            "cliques": [list(c) for c in self.clique_sizes],
            "clique_sizes": list(self.clique_sizes.values()),
            "parameter_count": self.parameter_count,
            "largest_clique": self.largest_clique,
            "peak_bytes": self.peak_bytes,
        }

    def __str__(self) -> str:
        return (
            f"{len(self.clique_sizes)} cliques, largest clique has "
            f"{self.largest_clique} attributes, {self.parameter_count} parameters, "
            f"~{self.peak_bytes / 2**20:.1f} MiB working set"
        )


@dataclass(frozen=True, eq=False)
class JunctionTree:
    """A tree of maximal cliques with the running-intersection property."""
    domain: Domain
    maximal_cliques: Tuple[Clique, ...]
    edges: Tuple[Tuple[Clique, Clique], ...]
    elimination_order: Tuple[str, ...]
    _graph: nx.Graph = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        if self._graph is None:
            graph = nx.Graph()
            graph.add_nodes_from(self.maximal_cliques)
            graph.add_edges_from(self.edges)
            object.__setattr__(self, "_graph", graph)

    @property
    def root(self) -> Clique:
        """Clique the message schedule starts from."""
        return self.maximal_cliques[0]

    def message_schedule(self) -> List[Tuple[Clique, Clique]]:
        """(parent, child) pairs in breadth-first order from the root."""
        return list(nx.bfs_edges(self._graph, self.root))

    def neighbors(self, clique: Clique) -> List[Clique]:
        return list(self._graph.neighbors(clique))

    @staticmethod
    def separator(first: Clique, second: Clique) -> Tuple[str, ...]:
        """Attributes shared by two cliques, in the order of ``first``."""
        return tuple(a for a in first if a in second)

    def containing_clique(self, clique: Iterable[str]) -> Optional[Clique]:
        """First maximal clique that contains ``clique``."""
        target = set(clique)
        for candidate in self.maximal_cliques:
            if target <= set(candidate):
                return candidate
        return None

    def model_size(self) -> ModelSize:
        """Parameter count and peak memory estimate of a model on this tree."""
        sizes = {c: self.domain.size(c) for c in self.maximal_cliques}
        params = sum(sizes.values())
        separators = sum(self.domain.size(self.separator(a, b)) for a, b in self.edges)
        # theta, beliefs and marginals per clique plus two messages per edge
        peak = BYTES_PER_VALUE * (3 * params + 2 * separators)
        largest = max((len(c) for c in self.maximal_cliques), default=0)
        return ModelSize(sizes, params, largest, peak)

    def check_size(self, parameter_cap: int) -> ModelSize:
        """Return the ModelSize, raising if it exceeds ``parameter_cap``."""
        size = self.model_size()
        if size.parameter_count > parameter_cap:
            worst = max(size.clique_sizes, key=size.clique_sizes.get)
            raise ModelTooLargeError(
                f"junction tree needs {size.parameter_count} parameters "
                f"(cap {parameter_cap}); largest clique {worst} has "
                f"{size.clique_sizes[worst]} cells",
                model_size=size,
            )
        return size


def _min_fill_order(domain: Domain, graph: nx.Graph) -> Tuple[List[str], List[Clique]]:
    """Greedy min-fill elimination, ties broken by domain attribute order."""
    graph = graph.copy()
    order, induced = [], []
    while graph.number_of_nodes():
        def fill(v):
            nbrs = list(graph.neighbors(v))
            missing = sum(1 for a, b in itertools.combinations(nbrs, 2) if not graph.has_edge(a, b))
            return missing, domain.index(v)

        var = min(graph.nodes, key=fill)
        nbrs = list(graph.neighbors(var))
        graph.add_edges_from(itertools.combinations(nbrs, 2))
        graph.remove_node(var)
        order.append(var)
        induced.append(domain.canonical(nbrs + [var]))
    return order, induced


def build_junction_tree(domain: Domain, cliques: Sequence[Iterable[str]]) -> JunctionTree:
    """Build a junction tree whose maximal cliques cover ``cliques``.

    Attributes that appear in no clique get singleton cliques so the tree
    always spans the whole domain.
    """
    cliques = [domain.canonical(c) for c in cliques]
    union = nx.Graph()
    union.add_nodes_from(domain.attributes)
    for clique in cliques:
        union.add_edges_from(itertools.combinations(clique, 2))

    order, induced = _min_fill_order(domain, union)
    maximal = []
    for candidate in induced:
        if any(set(candidate) < set(other) for other in induced):
            continue
        if candidate not in maximal:
            maximal.append(candidate)
    maximal.sort(key=lambda c: [domain.index(a) for a in c])

    clique_graph = nx.Graph()
    clique_graph.add_nodes_from(maximal)
    for i, j in itertools.combinations(range(len(maximal)), 2):
        weight = len(set(maximal[i]) & set(maximal[j]))
        clique_graph.add_edge(maximal[i], maximal[j], weight=weight)
    spanning = nx.maximum_spanning_tree(clique_graph, weight="weight", algorithm="kruskal")
    edges = tuple(
        sorted(
            (tuple(sorted((a, b), key=maximal.index)) for a, b in spanning.edges()),
            key=lambda e: (maximal.index(e[0]), maximal.index(e[1])),
        )
    )
    tree = JunctionTree(domain, tuple(maximal), edges, tuple(order))
    logger.debug("elimination order %s; maximal cliques %s", order, maximal)
    return tree


def _check_parameters(tree: JunctionTree, theta: CliqueVector) -> None:
    if set(theta.cliques) != set(tree.maximal_cliques):
        raise ParameterMismatchError(
            f"parameters keyed by {theta.cliques} but tree cliques are "
            f"{list(tree.maximal_cliques)}"
        )


def marginal_oracle(
    tree: JunctionTree, theta: CliqueVector, total: float = 1.0
) -> Tuple[CliqueVector, float]:
    """Exact clique marginals and log-partition of p_θ.

    Args:
        tree: Junction tree whose maximal cliques key ``theta``.
        theta: Log-space parameters θ_C.
        total: Scale of the returned marginals.

    Returns:
        (mu, logZ) with every μ_C summing to ``total``.
    """
    _check_parameters(tree, theta)
    domain = tree.domain
    potentials = {c: theta[c].with_values(theta[c].values, LOG) for c in tree.maximal_cliques}
    schedule = tree.message_schedule()
    messages: Dict[Tuple[Clique, Clique], Factor] = {}

    def send(source: Clique, target: Clique) -> None:
        belief = potentials[source]
        for neighbor in tree.neighbors(source):
            if neighbor != target:
                belief = belief.product(messages[(neighbor, source)])
        messages[(source, target)] = belief.logsumexp(tree.separator(source, target))

    for parent, child in reversed(schedule):
        send(child, parent)
    for parent, child in schedule:
        send(parent, child)

    marginals, log_z = {}, None
    for clique in tree.maximal_cliques:
        belief = potentials[clique]
        for neighbor in tree.neighbors(clique):
            belief = belief.product(messages[(neighbor, clique)])
        mu, clique_log_z = log_normalize(belief, total)
        marginals[clique] = mu
        if clique == tree.root:
            log_z = clique_log_z
    return CliqueVector(domain, marginals), log_z


def tree_entropy(mu: CliqueVector, tree: JunctionTree, rtol: float = 1e-9) -> float:
    """Shannon entropy of the junction-tree distribution with marginals ``mu``.

    H = Σ_C H(μ_C) − Σ_S H(μ_S), with 0·log 0 = 0.
    """
    total = 0.0
    for clique in tree.maximal_cliques:
        total += float(entr(mu.project(clique).values).sum())
    for first, second in tree.edges:
        sep = tree.separator(first, second)
        left = mu.project(first).project(sep).values
        right = mu.project(second).project(sep).values
        if not np.allclose(left, right, rtol=rtol, atol=rtol * max(1.0, np.abs(left).max())):
            raise InconsistentMarginalsError(
                f"marginals on {first} and {second} disagree on separator {sep}"
            )
        total -= float(entr(left).sum())
    return total
