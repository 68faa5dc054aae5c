"""
Queries against an estimated model that never build the full table:
marginals on arbitrary attribute sets, factored (Kronecker) linear queries,
and synthetic records.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np
import pandas as pd

from .dataset import Dataset
from .domain import Domain
from .errors import BlockParameterError, FeasibilityError
from .factor import LINEAR, Factor
from .junction_tree import DEFAULT_PARAMETER_CAP
from .model import GraphicalModel
from .query_blocks import BlockKind, block_from_config

logger = logging.getLogger(__name__)

DEFAULT_ELIMINATION_CAP = DEFAULT_PARAMETER_CAP


@dataclass(frozen=True, eq=False)
class FactoredQuery:
    """Q = Q_1 ⊗ … ⊗ Q_d with one dense block per domain attribute."""
    domain: Domain
    blocks: Mapping[str, np.ndarray]

    def __post_init__(self):
        blocks = {}
        for attr in self.domain:
            if attr not in self.blocks:
                raise BlockParameterError(f"factored query has no block for {attr!r}")
            block = np.atleast_2d(np.asarray(self.blocks[attr], dtype=np.float64))
            if block.ndim != 2 or block.shape[1] != self.domain.cardinality(attr):
                raise BlockParameterError(
                    f"block for {attr!r} has shape {block.shape}, "
                    f"needs {self.domain.cardinality(attr)} columns"
                )
            blocks[attr] = block
        extra = set(self.blocks) - set(self.domain)
        if extra:
            raise BlockParameterError(f"blocks for unknown attributes {sorted(extra)}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_config(cls, domain: Domain, entries: Mapping[str, Any]) -> "FactoredQuery":
        """Blocks from config entries; omitted attributes are marginalized out."""
        return cls(domain, {
            attr: block_from_config(entries.get(attr, BlockKind.ONES), domain.cardinality(attr))
            for attr in domain
        })

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.blocks[a].shape[0] for a in self.domain)


@dataclass(frozen=True)
class QueryAnswer:
    """Answers Q·p̂ shaped (r_1, …, r_d) with singleton axes squeezed."""
    values: np.ndarray
    scale: str

    def to_dict(self) -> Dict[str, Any]:
        return {"shape": list(self.values.shape), "scale": self.scale,
                "values": np.asarray(self.values).ravel().tolist()}


def _exp_potentials(model: GraphicalModel, domain: Domain) -> Tuple[List[Factor], float]:
    """exp(θ_C − max θ_C) per clique on ``domain`` and the sum of the shifts."""
    factors, shift = [], 0.0
    for clique, theta in model.theta.items():
        top = float(np.max(theta.values))
        factors.append(Factor(domain, clique, np.exp(theta.values - top), LINEAR))
        shift += top
    return factors, shift


def _eliminate(
    factors: List[Factor], variables: Sequence[str], domain: Domain, cap: int
) -> Tuple[Factor, float]:
    """Sum ``variables`` out of the product of ``factors``.

    The order is greedy min-fill on the current interaction graph. Each
    intermediate is divided by its largest magnitude and the logs of those
    divisors are returned so the caller can undo the scaling.

    Raises:
        FeasibilityError: If an intermediate clique has more than ``cap`` cells.
    """
    factors = list(factors)
    remaining = list(variables)
    log_scale = 0.0
    while remaining:
        adjacent = {frozenset(p) for f in factors for p in itertools.combinations(f.clique, 2)}

        def fill(var):
            nbrs = set()
            for f in factors:
                if var in f.clique:
                    nbrs.update(f.clique)
            nbrs.discard(var)
            missing = sum(1 for p in itertools.combinations(sorted(nbrs), 2)
                          if frozenset(p) not in adjacent)
            return missing, domain.index(var)

        var = min(remaining, key=fill)
        remaining.remove(var)
        touching = [f for f in factors if var in f.clique]
        factors = [f for f in factors if var not in f.clique]
        if not touching:
            continue
        union = domain.canonical(set().union(*(f.clique for f in touching)))
        if domain.size(union) > cap:
            raise FeasibilityError(
                f"eliminating {var!r} needs an intermediate over {union} with "
                f"{domain.size(union)} cells (cap {cap})",
                clique=union,
            )
        product = touching[0]
        for f in touching[1:]:
            product = product.product(f)
        reduced = product.project([a for a in product.clique if a != var])
        magnitude = reduced.max_abs()
        if magnitude > 0:
            reduced = reduced * (1.0 / magnitude)
            log_scale += math.log(magnitude)
        factors.append(reduced)
        logger.debug("eliminated %s, intermediate %s", var, reduced.clique)

    result = Factor.scalar(domain, 1.0)
    for f in factors:
        result = result.product(f)
    if domain.size(result.clique) > cap:
        raise FeasibilityError(f"result over {result.clique} exceeds the cap {cap}",
                               clique=result.clique)
    return result, log_scale


def model_marginal(
    model: GraphicalModel, target: Iterable[str], cap: int = DEFAULT_ELIMINATION_CAP
) -> Factor:
    """Marginal of p̂_θ on ``target`` at the model's total.

    Targets inside a junction-tree clique are projected from the cached
    marginal; others are computed by variable elimination.
    """
    domain = model.domain
    target = domain.canonical(target)
    cached = model.clique_marginal(target)
    if cached is not None:
        return cached
    factors, _ = _exp_potentials(model, domain)
    eliminate = [a for a in domain if a not in target]
    result, _ = _eliminate(factors, eliminate, domain, cap)
    result = result.expand(target) if result.clique != target else result
    mass = result.sum()
    return result * (model.total / mass)


def _augmented_name(domain: Domain, attr: str) -> str:
    name = f"z[{attr}]"
    while name in domain:
        name = "_" + name
    return name


def answer_factored_query(
    model: GraphicalModel, query: FactoredQuery, cap: int = DEFAULT_ELIMINATION_CAP
) -> QueryAnswer:
    """Compute (Q_1 ⊗ … ⊗ Q_d)·p̂_θ at the model's total.

    Single-row blocks are folded in as unary factors on x_i; every multi-row
    block becomes a factor over (x_i, z_i) with a new output variable z_i.
    All x variables are eliminated and the result divided by Z.

    Raises:
        FeasibilityError: If an elimination intermediate exceeds ``cap`` cells.
    """
    domain = model.domain
    if query.domain != domain:
        raise BlockParameterError("query domain differs from the model domain")
    outputs = [(a, _augmented_name(domain, a), query.blocks[a].shape[0])
               for a in domain if query.blocks[a].shape[0] > 1]
    augmented = domain.extend([z for _, z, _ in outputs], [r for _, _, r in outputs])

    factors, shift = _exp_potentials(model, augmented)
    z_of = {a: z for a, z, _ in outputs}
    for attr in domain:
        block = query.blocks[attr]
        if attr in z_of:
            factors.append(Factor(augmented, (attr, z_of[attr]), block.T))
        else:
            factors.append(Factor(augmented, (attr,), block[0]))

    result, log_scale = _eliminate(factors, list(domain.attributes), augmented, cap)
    z_clique = tuple(z for _, z, _ in outputs)
    if result.clique != z_clique:
        result = result.expand(z_clique)
    factor = math.exp(log_scale + shift - model.log_partition) * model.total
    values = np.asarray(result.values * factor)
    scale = "normalized" if model.total == 1.0 else "counts"
    return QueryAnswer(values, scale)


def sample_synthetic(model: GraphicalModel, count: int, seed=None) -> Dataset:
    """Draw ``count`` i.i.d. records by forward sampling along the junction tree.

    The root clique is drawn from its marginal; each child clique is drawn
    from its marginal conditioned on the already sampled separator.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    rng = np.random.default_rng(seed)
    domain, tree = model.domain, model.tree
    records = np.zeros((count, len(domain)), dtype=np.int64)
    columns = {a: i for i, a in enumerate(domain)}

    def draw(probabilities: np.ndarray, size: int) -> np.ndarray:
        p = np.clip(probabilities, 0.0, None)
        mass = p.sum()
        p = p / mass if mass > 0 else np.full(p.size, 1.0 / p.size)
        return rng.choice(p.size, size=size, p=p)

    root = tree.root
    flat = draw(model.marginals[root].datavector(), count)
    for attr, codes in zip(root, np.unravel_index(flat, domain.shape_of(root))):
        records[:, columns[attr]] = codes

    for parent, child in tree.message_schedule():
        sep = tree.separator(parent, child)
        rest = tuple(a for a in child if a not in sep)
        if not rest:
            continue
        values = model.marginals[child].values
        order = [child.index(a) for a in sep + rest]
        n_sep, n_rest = domain.size(sep), domain.size(rest)
        table = np.transpose(values, order).reshape(n_sep, n_rest)
        if sep:
            sep_codes = tuple(records[:, columns[a]] for a in sep)
            sep_index = np.ravel_multi_index(sep_codes, domain.shape_of(sep))
        else:
            sep_index = np.zeros(count, dtype=np.int64)
        drawn = np.zeros(count, dtype=np.int64)
        for s in np.unique(sep_index):
            rows = np.flatnonzero(sep_index == s)
            drawn[rows] = draw(table[s], rows.size)
        for attr, codes in zip(rest, np.unravel_index(drawn, domain.shape_of(rest))):
            records[:, columns[attr]] = codes

    return Dataset(domain, pd.DataFrame(records, columns=list(domain)))
