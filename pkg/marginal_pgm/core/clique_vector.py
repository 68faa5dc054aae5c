"""
Collections of factors keyed by clique (parameter vectors θ and marginals μ).
"""
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

import numpy as np

from .domain import Clique, Domain
from .errors import CliqueError, DomainMismatchError
from .factor import LOG, Factor


class CliqueVector(Mapping):
    """An immutable mapping Clique -> Factor over one shared domain.

    Supports the vector-space operations the estimators need (addition,
    scaling, inner products) clique by clique.
    """

    def __init__(self, domain: Domain, factors: Mapping[Clique, Factor]):
        self.domain = domain
        entries: Dict[Clique, Factor] = {}
        for clique, factor in factors.items():
            if factor.domain != domain:
                raise DomainMismatchError(f"factor over {clique} uses another domain")
            if domain.canonical(clique) != factor.clique:
                raise CliqueError(f"key {clique} does not match factor clique {factor.clique}")
            entries[factor.clique] = factor
        self._entries = entries

    @classmethod
    def zeros(cls, domain: Domain, cliques: Iterable[Clique], space: str = LOG) -> "CliqueVector":
        """Zero factors on every clique (the uniform model in log space)."""
        return cls(domain, {c: Factor.zeros(domain, c, space) for c in cliques})

    @classmethod
    def uniform(cls, domain: Domain, cliques: Iterable[Clique], total: float = 1.0) -> "CliqueVector":
        """Uniform marginals scaled to ``total`` on every clique."""
        return cls(domain, {c: Factor.uniform(domain, c, total) for c in cliques})

    # Mapping protocol

    def __getitem__(self, clique: Clique) -> Factor:
        return self._entries[self.domain.canonical(clique)]

    def __iter__(self) -> Iterator[Clique]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, clique: object) -> bool:
        try:
            return self.domain.canonical(clique) in self._entries
        except (CliqueError, TypeError):
            return False

    @property
    def cliques(self) -> List[Clique]:
        return list(self._entries)

    def supporting_clique(self, clique: Iterable[str]) -> Optional[Clique]:
        """First stored clique that contains ``clique``, if any."""
        target = set(clique)
        for key in self._entries:
            if target <= set(key):
                return key
        return None

    def project(self, clique: Iterable[str]) -> Factor:
        """Marginal on ``clique`` from a supporting stored factor."""
        clique = self.domain.canonical(clique)
        if clique in self._entries:
            return self._entries[clique]
        key = self.supporting_clique(clique)
        if key is None:
            raise CliqueError(f"no stored clique supports {clique}")
        return self._entries[key].project(clique)

    # vector-space operations

    def map(self, fn: Callable[[Factor], Factor]) -> "CliqueVector":
        """Apply ``fn`` to every factor."""
        return CliqueVector(self.domain, {c: fn(f) for c, f in self._entries.items()})

    def _zip(self, other: "CliqueVector", fn) -> "CliqueVector":
        if set(other) != set(self._entries):
            raise CliqueError("clique vectors have different clique sets")
        return CliqueVector(self.domain, {c: fn(f, other[c]) for c, f in self._entries.items()})

    def __add__(self, other):
        if isinstance(other, CliqueVector):
            return self._zip(other, lambda a, b: a + b)
        return self.map(lambda f: f + other)

    def __sub__(self, other):
        if isinstance(other, CliqueVector):
            return self._zip(other, lambda a, b: a - b)
        return self.map(lambda f: f - other)

    def __mul__(self, scalar: float):
        return self.map(lambda f: f * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return self.map(lambda f: -f)

    def dot(self, other: "CliqueVector") -> float:
        """Sum of per-clique inner products ⟨self, other⟩.

        Args:
            other: Vector over the same cliques.

        Returns:
            float: The inner product.
        """
        return float(sum(f.dot(other[c]) for c, f in self._entries.items()))

    def max_abs(self) -> float:
        """Largest absolute entry over all cliques (0 when empty)."""
        return max((f.max_abs() for f in self._entries.values()), default=0.0)

    def is_finite(self) -> bool:
        """True when no entry is NaN or infinite."""
        return all(np.all(np.isfinite(f.values)) for f in self._entries.values())

    def with_space(self, space: str) -> "CliqueVector":
        return self.map(lambda f: f.with_values(f.values, space))

    def as_log(self) -> "CliqueVector":
        return self.with_space(LOG)

    def totals(self) -> Dict[Clique, float]:
        """Mass of each clique factor."""
        return {c: f.sum() for c, f in self._entries.items()}

    def items_sorted(self) -> List[Tuple[Clique, Factor]]:
        """Entries ordered by the domain positions of their attributes."""
        return sorted(self._entries.items(), key=lambda kv: [self.domain.index(a) for a in kv[0]])

    def __repr__(self) -> str:
        return f"CliqueVector(cliques={self.cliques})"
