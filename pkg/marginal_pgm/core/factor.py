"""
Dense factors over subsets of a domain's attributes.

A factor's axes always follow the domain's global attribute order, so aligning
two factors is a reshape (never a transpose): every clique is a subsequence of
the domain order and of any canonical superset.
"""
import math
from dataclasses import dataclass
from typing import Iterable, Tuple, Union

import numpy as np
from scipy.special import logsumexp

from .domain import Clique, Domain
from .errors import (
    CliqueError,
    DegenerateFactorError,
    DomainMismatchError,
    FactorSpaceError,
)

LINEAR = "linear"
LOG = "log"


@dataclass(frozen=True, eq=False)
class Factor:
    """A dense real-valued table over ``clique``.

    ``space`` tags whether ``values`` hold linear quantities (marginals,
    counts) or log quantities (parameters, messages).
    """
    domain: Domain
    clique: Clique
    values: np.ndarray
    space: str = LINEAR

    def __post_init__(self):
        if self.space not in (LINEAR, LOG):
            raise FactorSpaceError(f"unknown factor space {self.space!r}")
        clique = self.domain.canonical(self.clique)
        if clique != tuple(self.clique):
            raise CliqueError(f"clique {tuple(self.clique)} is not in domain order")
        shape = self.domain.shape_of(clique)
        values = np.array(self.values, dtype=np.float64)
        if values.size != math.prod(shape):
            raise CliqueError(
                f"{values.size} values do not fit clique {clique} of shape {shape}"
            )
        values = values.reshape(shape)
        values.flags.writeable = False
        object.__setattr__(self, "clique", clique)
        object.__setattr__(self, "values", values)

    # construction

    @classmethod
    def zeros(cls, domain: Domain, clique: Iterable[str], space: str = LINEAR) -> "Factor":
        """All-zero factor; in log space this is the constant-one potential."""
        clique = domain.canonical(clique)
        return cls(domain, clique, np.zeros(domain.shape_of(clique)), space)

    @classmethod
    def uniform(cls, domain: Domain, clique: Iterable[str], total: float = 1.0) -> "Factor":
        """Linear factor spreading ``total`` evenly over the cells of ``clique``.

        Args:
            domain: Domain the clique belongs to.
            clique: Attributes of the factor.
            total: Mass to spread.

        Returns:
            Factor: The uniform factor.
        """
        clique = domain.canonical(clique)
        return cls(domain, clique, np.full(domain.shape_of(clique), total / domain.size(clique)))

    @classmethod
    def scalar(cls, domain: Domain, value: float, space: str = LINEAR) -> "Factor":
        """Factor over the empty clique holding one number."""
        return cls(domain, (), np.asarray(value, dtype=np.float64), space)

    def with_values(self, values: np.ndarray, space: str = None) -> "Factor":
        """Same clique with new ``values`` (and optionally a new space)."""
        return Factor(self.domain, self.clique, values, space or self.space)

    # alignment helpers

    def _check_domain(self, other: "Factor") -> None:
        if other.domain != self.domain:
            raise DomainMismatchError(
                f"factors over different domains: {self.domain.attributes} "
                f"vs {other.domain.attributes}"
            )

    def _check_space(self, other: "Factor") -> None:
        if other.space != self.space:
            raise FactorSpaceError(f"cannot combine {self.space} and {other.space} factors")

    def aligned(self, target: Iterable[str]) -> np.ndarray:
        """View of ``values`` reshaped with singleton axes for ``target``."""
        target = self.domain.canonical(target)
        if not set(self.clique) <= set(target):
            raise CliqueError(f"{self.clique} is not a subset of {target}")
        shape = tuple(
            self.domain.cardinality(a) if a in self.clique else 1 for a in target
        )
        return self.values.reshape(shape)

    def expand(self, target: Iterable[str]) -> "Factor":
        """Broadcast to a superset clique (the transpose action of projection)."""
        target = self.domain.canonical(target)
        values = np.broadcast_to(self.aligned(target), self.domain.shape_of(target))
        return Factor(self.domain, target, values, self.space)

    # algebra

    def product(self, other: "Factor") -> "Factor":
        """Pointwise product in linear space, pointwise sum in log space."""
        self._check_domain(other)
        self._check_space(other)
        union = self.domain.canonical(set(self.clique) | set(other.clique))
        a, b = self.aligned(union), other.aligned(union)
        values = a + b if self.space == LOG else a * b
        return Factor(self.domain, union, np.broadcast_to(values, self.domain.shape_of(union)),
                      self.space)

    def project(self, target: Iterable[str]) -> "Factor":
        """Sum out every attribute not in ``target`` (linear space)."""
        if self.space != LINEAR:
            raise FactorSpaceError("project requires a linear-space factor; use logsumexp")
        target, axes = self._eliminated_axes(target)
        return Factor(self.domain, target, self.values.sum(axis=axes), LINEAR)

    def logsumexp(self, target: Iterable[str]) -> "Factor":
        """Log-space counterpart of :meth:`project`."""
        if self.space != LOG:
            raise FactorSpaceError("logsumexp requires a log-space factor")
        target, axes = self._eliminated_axes(target)
        if not axes:
            return self
        return Factor(self.domain, target, logsumexp(self.values, axis=axes), LOG)

    def _eliminated_axes(self, target: Iterable[str]) -> Tuple[Clique, Tuple[int, ...]]:
        target = self.domain.canonical(target)
        if not set(target) <= set(self.clique):
            raise CliqueError(f"{target} is not a subset of {self.clique}")
        axes = tuple(i for i, a in enumerate(self.clique) if a not in target)
        return target, axes

    def exp(self) -> "Factor":
        """Linear-space factor exp(values)."""
        return Factor(self.domain, self.clique, np.exp(self.values), LINEAR)

    def log(self) -> "Factor":
        """Log-space factor log(values); zeros map to -inf."""
        with np.errstate(divide="ignore"):
            return Factor(self.domain, self.clique, np.log(self.values), LOG)

    def sum(self) -> float:
        return float(self.values.sum())

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def dot(self, other: "Factor") -> float:
        """Inner product with a factor over the same clique.

        Raises:
            CliqueError: If the cliques differ.
        """
        self._check_domain(other)
        if other.clique != self.clique:
            raise CliqueError(f"dot of factors over {self.clique} and {other.clique}")
        return float(np.sum(self.values * other.values))

    def datavector(self) -> np.ndarray:
        """Flat row-major copy of the values in canonical axis order."""
        return self.values.ravel().copy()

    def _binary(self, other: Union["Factor", float], op) -> "Factor":
        if isinstance(other, Factor):
            self._check_domain(other)
            if other.clique != self.clique:
                union = self.domain.canonical(set(self.clique) | set(other.clique))
                values = op(self.aligned(union), other.aligned(union))
                values = np.broadcast_to(values, self.domain.shape_of(union))
                return Factor(self.domain, union, values, self.space)
            return self.with_values(op(self.values, other.values))
        return self.with_values(op(self.values, float(other)))

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, np.divide)

    def __neg__(self):
        return self.with_values(-self.values)

    def __repr__(self) -> str:
        return f"Factor(clique={self.clique}, space={self.space}, shape={self.values.shape})"


def factor_product(f: Factor, g: Factor) -> Factor:
    """Product of two factors over the union of their cliques."""
    return f.product(g)


def factor_project(f: Factor, target: Iterable[str]) -> Factor:
    """Marginalize ``f`` onto ``target`` without materializing M_A."""
    return f.project(target)


def log_normalize(f: Factor, total: float = 1.0) -> Tuple[Factor, float]:
    """Exponentiate a log factor and scale it to sum to ``total``.

    Returns:
        The linear-space factor and the log normalizer ``logsumexp(values)``.
    """
    if f.space != LOG:
        raise FactorSpaceError("log_normalize requires a log-space factor")
    values = f.values
    shift = np.max(values) if values.size else -np.inf
    if not np.isfinite(shift):
        raise DegenerateFactorError(f"factor over {f.clique} has no finite entries")
    weights = np.exp(values - shift)
    mass = weights.sum()
    log_z = float(shift + np.log(mass))
    return Factor(f.domain, f.clique, weights * (total / mass), LINEAR), log_z
